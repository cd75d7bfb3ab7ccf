//! Multi-indices and the graded index set of invariant blocks.
//!
//! A block index `γ` is an integer `n`-tuple whose entries are all `≥ -1`
//! with at most one entry equal to `-1`. The set of such indices is graded by
//! the degree `|γ|`, starting at `-1`. Monomial exponents are the nonnegative
//! members of the same lattice.
//!
//! Directions are zero-based (`0..n`) throughout the library; reports print
//! them one-based.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiIndexError {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("invalid grade {0}: must be at least -1")]
    InvalidGrade(i64),
    #[error("multi-index ({0}) is not a block index: entries must be >= -1 with at most one -1")]
    NotInGamma(MultiIndex),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot parse multi-index {0:?}")]
    Parse(String),
}

/// Integer exponent tuple. Ordering is lexicographic on the entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(entries: Vec<i32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit vector `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn has_negative(&self) -> bool {
        !self.is_nonnegative()
    }

    pub fn is_in_gamma(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|&e| e >= -1) && self.0.iter().filter(|&&e| e == -1).count() <= 1
    }

    /// Slot holding the `-1` entry, if any.
    pub fn negative_slot(&self) -> Option<usize> {
        self.0.iter().position(|&e| e < 0)
    }

    /// `self + k·e_j`.
    pub fn shifted(&self, j: usize, k: i32) -> Self {
        let mut v = self.0.clone();
        v[j] += k;
        MultiIndex(v)
    }

    pub fn plus_unit(&self, j: usize) -> Self {
        self.shifted(j, 1)
    }

    pub fn minus_unit(&self, j: usize) -> Self {
        self.shifted(j, -1)
    }

    pub fn check_dim(&self, n: usize) -> Result<(), MultiIndexError> {
        if self.dim() != n {
            return Err(MultiIndexError::DimensionMismatch { expected: n, found: self.dim() });
        }
        Ok(())
    }

    fn require_gamma(&self) -> Result<(), MultiIndexError> {
        if self.is_in_gamma() {
            Ok(())
        } else {
            Err(MultiIndexError::NotInGamma(self.clone()))
        }
    }

    /// Comma-joined entries, the key format used in files and reports.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = MultiIndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<i32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| MultiIndexError::Parse(s.to_string()))?;
        if entries.is_empty() {
            return Err(MultiIndexError::Parse(s.to_string()));
        }
        Ok(MultiIndex(entries))
    }
}

impl serde::Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = <std::borrow::Cow<'de, str>>::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(v: Vec<i32>) -> Self {
        MultiIndex(v)
    }
}

/// All `α ∈ ℕⁿ` with `|α| = k`, in lexicographic order.
pub fn enumerate_nonnegative(n: usize, k: usize) -> Result<Vec<MultiIndex>, MultiIndexError> {
    if n == 0 {
        return Err(MultiIndexError::InvalidDimension(n));
    }
    let mut out = Vec::new();
    let mut current = vec![0i32; n];
    compositions(&mut current, 0, k as i32, &mut out);
    Ok(out)
}

// Fills slots `pos..` with nonnegative entries summing to `remaining`, in
// lexicographic order.
fn compositions(current: &mut [i32], pos: usize, remaining: i32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        compositions(current, pos + 1, remaining - v, out);
    }
}

/// The grade `Γ_k = { γ ∈ Γ : |γ| = k }` in lexicographic order.
pub fn enumerate_grade(n: usize, k: i64) -> Result<Vec<MultiIndex>, MultiIndexError> {
    if n == 0 {
        return Err(MultiIndexError::InvalidDimension(n));
    }
    if k < -1 {
        return Err(MultiIndexError::InvalidGrade(k));
    }
    let mut out = Vec::new();
    if k >= 0 {
        out.extend(enumerate_nonnegative(n, k as usize)?);
    }
    if n == 1 {
        if k == -1 {
            out.push(MultiIndex(vec![-1]));
        }
    } else {
        // One slot pinned at -1; the other n-1 slots carry degree k+1.
        for rest in enumerate_nonnegative(n - 1, (k + 1) as usize)? {
            for q in 0..n {
                let mut v = Vec::with_capacity(n);
                v.extend_from_slice(&rest.entries()[..q]);
                v.push(-1);
                v.extend_from_slice(&rest.entries()[q..]);
                out.push(MultiIndex(v));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Dimension of the block `E_γ`: 1 when `γ` has a `-1` entry, `n` otherwise.
pub fn block_dimension(gamma: &MultiIndex) -> Result<usize, MultiIndexError> {
    gamma.require_gamma()?;
    Ok(if gamma.negative_slot().is_some() { 1 } else { gamma.dim() })
}

/// Directions `p` with `γ + e_p ≥ 0`, ascending.
pub fn admissible_directions(gamma: &MultiIndex) -> Result<Vec<usize>, MultiIndexError> {
    gamma.require_gamma()?;
    Ok(match gamma.negative_slot() {
        Some(q) => vec![q],
        None => (0..gamma.dim()).collect(),
    })
}
