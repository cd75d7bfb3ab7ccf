//! Multimoments `m_α = ∫ |z^α|² dμ` and their reciprocals `c_γ`.
//!
//! A [`MomentProvider`] is built once for a target degree and is read-only
//! afterwards. Indices with a `-1` entry have `c_γ = 0` by convention.

mod catalog;
pub mod combinatorics;
pub mod quadrature;
mod spec;
pub mod weight;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::multiindex::{MultiIndex, MultiIndexError};
use combinatorics::{multi_factorial, multinomial_prefactor, radial_reduction};

pub use catalog::{direct_multimoment, CatalogMeasure};
pub use quadrature::QuadratureSettings;
pub use spec::{MeasureKind, MeasureSpec, WeightProfileSpec};
pub use weight::{quadrature_multimoment, quadrature_radial_moment, RadialWeight, Support};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("degree exceeded: moment of index ({index}) is beyond the supported range ({supported})")]
    DegreeExceeded { index: MultiIndex, supported: String },
    #[error("nonpositive moment {value:e} at index ({index})")]
    NonpositiveMoment { index: MultiIndex, value: f64 },
    #[error("moment index ({0}) has a negative entry")]
    NegativeIndex(MultiIndex),
    #[error("radial moment quadrature for j = {j}: {source}")]
    Quadrature { j: usize, source: quadrature::QuadratureError },
    #[error("radial moment quadrature for j = {j} gave nonpositive or non-finite value {value:e}")]
    NonpositiveQuadrature { j: usize, value: f64 },
    #[error("moment sequence is not log-convex at degree(s) {0:?}")]
    LogConvexity(Vec<usize>),
    #[error("closed form disagrees with quadrature at degree {degree}: relative deviation {deviation:e}")]
    ClosedFormMismatch { degree: usize, deviation: f64 },
    #[error("duplicate multimoment index ({0})")]
    DuplicateIndex(MultiIndex),
    #[error("invalid measure spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Index(#[from] MultiIndexError),
}

/// Provenance of a provider, reported alongside the diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum ProviderKind {
    Catalog(CatalogMeasure),
    /// Per-index closed forms of a catalog measure, evaluated without the
    /// radial or product reductions.
    CatalogDirect(CatalogMeasure),
    RadialSequence,
    Product,
    Table,
    RadialQuadrature(String),
}

impl ProviderKind {
    pub fn label(&self) -> String {
        match self {
            ProviderKind::Catalog(c) => format!("catalog:{}", c.name()),
            ProviderKind::CatalogDirect(c) => format!("catalog-direct:{}", c.name()),
            ProviderKind::RadialSequence => "radial-sequence".into(),
            ProviderKind::Product => "product".into(),
            ProviderKind::Table => "table".into(),
            ProviderKind::RadialQuadrature(w) => format!("radial-quadrature:{w}"),
        }
    }

    pub fn is_catalog(&self) -> bool {
        matches!(self, ProviderKind::Catalog(_))
    }
}

#[derive(Debug, Clone)]
struct RadialData {
    /// `m_d = ∫ |z|^{2d} dμ`
    radial: Vec<f64>,
    /// `m_d (n-1)!/(n+d-1)!`, so that `m_α = α! · reduced[|α|]`.
    reduced: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Source {
    Radial(RadialData),
    Product(Vec<Vec<f64>>),
    Table(HashMap<MultiIndex, f64>),
    Direct(CatalogMeasure),
}

#[derive(Debug, Clone)]
pub struct MomentProvider {
    n: usize,
    kind: ProviderKind,
    source: Arc<Source>,
    /// Radial measures that are also products (the Gaussian) keep both forms.
    factors: Option<Arc<Vec<Vec<f64>>>>,
    max_degree: Option<usize>,
    perturbation: Option<(MultiIndex, f64)>,
}

impl MomentProvider {
    /// Provider for a rotation-invariant measure given its radial moments `m_0..m_D`.
    pub fn from_radial(n: usize, radial: Vec<f64>) -> Result<Self, MomentError> {
        check_dimension(n)?;
        check_sequence(&radial, |d| radial_index(n, d))?;
        let reduced = radial
            .iter()
            .enumerate()
            .map(|(d, &m)| {
                let r = m * radial_reduction(n, d);
                if r > 0.0 && r.is_finite() {
                    r
                } else {
                    (m.ln() + radial_reduction(n, d).ln()).exp()
                }
            })
            .collect();
        Ok(Self::radial_unchecked(n, ProviderKind::RadialSequence, radial, reduced))
    }

    pub(crate) fn radial_unchecked(n: usize, kind: ProviderKind, radial: Vec<f64>, reduced: Vec<f64>) -> Self {
        let max_degree = Some(radial.len().saturating_sub(1));
        MomentProvider {
            n,
            kind,
            source: Arc::new(Source::Radial(RadialData { radial, reduced })),
            factors: None,
            max_degree,
            perturbation: None,
        }
    }

    /// Product measure `μ_1 × … × μ_n` from the 1-D moments `∫_ℂ |z|^{2j} dμ_k`.
    pub fn from_factors(factors: Vec<Vec<f64>>) -> Result<Self, MomentError> {
        let n = factors.len();
        check_dimension(n)?;
        for (k, f) in factors.iter().enumerate() {
            check_sequence(f, |j| {
                let mut v = vec![0; n];
                v[k] = j as i32;
                MultiIndex::new(v)
            })?;
        }
        Ok(Self::product_unchecked(ProviderKind::Product, factors))
    }

    pub(crate) fn product_unchecked(kind: ProviderKind, factors: Vec<Vec<f64>>) -> Self {
        let max_degree = factors.iter().map(|f| f.len()).min().map(|l| l.saturating_sub(1));
        MomentProvider {
            n: factors.len(),
            kind,
            source: Arc::new(Source::Product(factors)),
            factors: None,
            max_degree,
            perturbation: None,
        }
    }

    /// Explicit table `α ↦ m_α`.
    pub fn from_table(n: usize, entries: Vec<(MultiIndex, f64)>) -> Result<Self, MomentError> {
        check_dimension(n)?;
        let mut table = HashMap::with_capacity(entries.len());
        for (index, value) in entries {
            index.check_dim(n)?;
            if index.has_negative() {
                return Err(MomentError::NegativeIndex(index));
            }
            if !(value > 0.0) || !value.is_finite() {
                return Err(MomentError::NonpositiveMoment { index, value });
            }
            if table.contains_key(&index) {
                return Err(MomentError::DuplicateIndex(index));
            }
            table.insert(index, value);
        }
        let max_degree = complete_degree(n, &table);
        Ok(MomentProvider {
            n,
            kind: ProviderKind::Table,
            source: Arc::new(Source::Table(table)),
            factors: None,
            max_degree,
            perturbation: None,
        })
    }

    pub(crate) fn direct(n: usize, measure: CatalogMeasure) -> Self {
        MomentProvider {
            n,
            kind: ProviderKind::CatalogDirect(measure),
            source: Arc::new(Source::Direct(measure)),
            factors: None,
            max_degree: None,
            perturbation: None,
        }
    }

    pub(crate) fn with_kind(mut self, kind: ProviderKind) -> Self {
        self.kind = kind;
        self
    }

    pub(crate) fn with_factor_form(mut self, factors: Vec<Vec<f64>>) -> Self {
        self.factors = Some(Arc::new(factors));
        self
    }

    /// Copy of this provider with `m_α` multiplied by `factor`. Used to check
    /// that the verification oracles notice a corrupted moment.
    pub fn with_perturbation(mut self, index: MultiIndex, factor: f64) -> Self {
        self.perturbation = Some((index, factor));
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ProviderKind {
        &self.kind
    }

    /// Largest `D` with every `m_α`, `|α| ≤ D`, available; `None` when unbounded.
    pub fn supported_degree(&self) -> Option<usize> {
        self.max_degree
    }

    /// Radial moments `m_d` when the measure is rotation invariant.
    pub fn radial_sequence(&self) -> Option<&[f64]> {
        match self.source.as_ref() {
            Source::Radial(r) => Some(&r.radial),
            _ => None,
        }
    }

    /// Per-factor 1-D moments when the measure is a product.
    pub fn factor_sequences(&self) -> Option<&[Vec<f64>]> {
        match self.source.as_ref() {
            Source::Product(f) => Some(f),
            _ => self.factors.as_deref().map(|v| v.as_slice()),
        }
    }

    fn exceeded(&self, alpha: &MultiIndex) -> MomentError {
        let supported = match self.max_degree {
            Some(d) => format!("total degree <= {d}"),
            None => "unbounded".to_string(),
        };
        MomentError::DegreeExceeded { index: alpha.clone(), supported }
    }

    /// Log-convexity violations in the one-variable sequences behind this
    /// provider: the radial sequence, each factor, or for tables the moments
    /// along each coordinate axis. Moments of a genuine measure give none.
    pub fn log_convexity_warnings(&self, tol: f64) -> Vec<String> {
        let describe = |label: String, seq: &[f64]| {
            let v = validate_log_convexity(seq, seq.len().saturating_sub(1), tol);
            (!v.is_empty()).then(|| format!("{label} is not log-convex at degree(s) {v:?}"))
        };
        if let Some(m) = self.radial_sequence() {
            return describe("radial moment sequence".to_string(), m).into_iter().collect();
        }
        if let Some(fs) = self.factor_sequences() {
            return fs.iter().enumerate().filter_map(|(k, f)| describe(format!("factor {}", k + 1), f)).collect();
        }
        let Some(top) = self.supported_degree() else { return Vec::new() };
        (0..self.n)
            .filter_map(|k| {
                let axis: Vec<f64> = (0..=top)
                    .map_while(|j| self.moment(&MultiIndex::zeros(self.n).shifted(k, j as i32)).ok())
                    .collect();
                describe(format!("moments along axis {}", k + 1), &axis)
            })
            .collect()
    }

    /// `m_α` for `α ∈ ℕⁿ`.
    pub fn moment(&self, alpha: &MultiIndex) -> Result<f64, MomentError> {
        alpha.check_dim(self.n)?;
        if alpha.has_negative() {
            return Err(MomentError::NegativeIndex(alpha.clone()));
        }
        let degree = alpha.degree() as usize;
        let value = match self.source.as_ref() {
            Source::Radial(r) => {
                let rho = *r.reduced.get(degree).ok_or_else(|| self.exceeded(alpha))?;
                match multi_factorial(alpha) {
                    Some(f) if rho.is_normal() && (f * rho).is_finite() => f * rho,
                    // Subnormal reduced values have lost precision; divide the radial moment instead.
                    _ => r.radial[degree] / combinatorics::multinomial_prefactor(alpha),
                }
            }
            Source::Product(factors) => {
                let mut acc = 1.0;
                for (f, &a) in factors.iter().zip(alpha.entries()) {
                    acc *= *f.get(a as usize).ok_or_else(|| self.exceeded(alpha))?;
                }
                acc
            }
            Source::Table(t) => *t.get(alpha).ok_or_else(|| self.exceeded(alpha))?,
            Source::Direct(c) => direct_multimoment(*c, alpha),
        };
        let value = match &self.perturbation {
            Some((index, factor)) if index == alpha => value * factor,
            _ => value,
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(MomentError::NonpositiveMoment { index: alpha.clone(), value });
        }
        Ok(value)
    }

    /// `c_γ = 1/m_γ`, or 0 when `γ` has a negative entry.
    pub fn c(&self, gamma: &MultiIndex) -> Result<f64, MomentError> {
        gamma.check_dim(self.n)?;
        if gamma.has_negative() {
            return Ok(0.0);
        }
        Ok(1.0 / self.moment(gamma)?)
    }

    /// `c_a / c_b = m_b / m_a`, with the convention `c_a = 0` for negative `a`.
    /// `b` must be nonnegative.
    pub fn c_ratio(&self, a: &MultiIndex, b: &MultiIndex) -> Result<f64, MomentError> {
        if a.has_negative() {
            a.check_dim(self.n)?;
            return Ok(0.0);
        }
        Ok(self.moment(b)? / self.moment(a)?)
    }
}

fn check_dimension(n: usize) -> Result<(), MomentError> {
    if n == 0 {
        return Err(MultiIndexError::InvalidDimension(0).into());
    }
    Ok(())
}

fn radial_index(n: usize, d: usize) -> MultiIndex {
    let mut v = vec![0; n];
    v[0] = d as i32;
    MultiIndex::new(v)
}

fn check_sequence(seq: &[f64], index: impl Fn(usize) -> MultiIndex) -> Result<(), MomentError> {
    if seq.is_empty() {
        return Err(MomentError::InvalidSpec("empty moment sequence".into()));
    }
    for (d, &m) in seq.iter().enumerate() {
        if !(m > 0.0) || !m.is_finite() {
            return Err(MomentError::NonpositiveMoment { index: index(d), value: m });
        }
    }
    Ok(())
}

// Largest D such that the table holds every α with |α| ≤ D.
fn complete_degree(n: usize, table: &HashMap<MultiIndex, f64>) -> Option<usize> {
    let mut d = 0usize;
    loop {
        let grade = crate::multiindex::enumerate_nonnegative(n, d).ok()?;
        if !grade.iter().all(|a| table.contains_key(a)) {
            return d.checked_sub(1);
        }
        d += 1;
    }
}

/// `c_γ = (n+|γ|-1)! / ((n-1)! γ!) · 1/m_{|γ|}` for a rotation-invariant
/// measure with radial moments `m_d`.
pub fn radial_to_multimoment(radial: &[f64], n: usize, gamma: &MultiIndex) -> Result<f64, MomentError> {
    gamma.check_dim(n)?;
    if gamma.has_negative() {
        return Err(MomentError::NegativeIndex(gamma.clone()));
    }
    let d = gamma.degree() as usize;
    let m = *radial.get(d).ok_or_else(|| MomentError::DegreeExceeded {
        index: gamma.clone(),
        supported: format!("radial degree <= {}", radial.len().saturating_sub(1)),
    })?;
    if !(m > 0.0) {
        return Err(MomentError::NonpositiveMoment { index: gamma.clone(), value: m });
    }
    Ok(multinomial_prefactor(gamma) / m)
}

/// `c_γ = Π_k c^{γ_k}_k` with `c^j_k = 1/∫_ℂ |z|^{2j} dμ_k`.
pub fn product_multimoment(factors: &[Vec<f64>], gamma: &MultiIndex) -> Result<f64, MomentError> {
    gamma.check_dim(factors.len())?;
    if gamma.has_negative() {
        return Err(MomentError::NegativeIndex(gamma.clone()));
    }
    let mut c = 1.0;
    for (f, &g) in factors.iter().zip(gamma.entries()) {
        let m = *f.get(g as usize).ok_or_else(|| MomentError::DegreeExceeded {
            index: gamma.clone(),
            supported: format!("factor degree <= {}", f.len().saturating_sub(1)),
        })?;
        if !(m > 0.0) {
            return Err(MomentError::NonpositiveMoment { index: gamma.clone(), value: m });
        }
        c /= m;
    }
    Ok(c)
}

/// Degrees `d` in `1..D` with `m_d² > m_{d-1} m_{d+1} (1 + tol)`.
pub fn validate_log_convexity(m: &[f64], max_degree: usize, tol: f64) -> Vec<usize> {
    let top = max_degree.min(m.len().saturating_sub(1));
    (1..top)
        .filter(|&d| {
            // Compare logarithms to stay clear of overflow for fast-growing sequences.
            2.0 * m[d].ln() > m[d - 1].ln() + m[d + 1].ln() + (1.0 + tol).ln()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mi(v: &[i32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gaussian_and_disc_examples() {
        let fock = CatalogMeasure::Fock.provider(1, 10).unwrap();
        assert!(rel(fock.moment(&mi(&[2])).unwrap(), 2.0 * PI) < 1e-15);
        assert!(rel(fock.c(&mi(&[2])).unwrap(), 1.0 / (2.0 * PI)) < 1e-15);
        let disc = CatalogMeasure::Ball.provider(1, 10).unwrap();
        assert!(rel(disc.moment(&mi(&[3])).unwrap(), PI / 4.0) < 1e-15);
        assert!(rel(disc.moment(&mi(&[0])).unwrap(), PI) < 1e-15);
        assert!(rel(disc.c(&mi(&[0])).unwrap(), 1.0 / PI) < 1e-15);
    }

    #[test]
    fn negative_indices_have_zero_c() {
        let p = CatalogMeasure::Fock.provider(2, 6).unwrap();
        assert_eq!(p.c(&mi(&[-1, 3])).unwrap(), 0.0);
        assert!(p.c(&mi(&[0, 3])).unwrap() > 0.0);
        assert!(matches!(p.moment(&mi(&[-1, 3])), Err(MomentError::NegativeIndex(_))));
    }

    #[test]
    fn radial_conversion_examples() {
        // Gaussian in n = 2: m_d = π² (d+1)!
        let radial: Vec<f64> = (0..6).map(|d| PI * PI * combinatorics::factorial(d + 1)).collect();
        let c = radial_to_multimoment(&radial, 2, &mi(&[1, 1])).unwrap();
        assert!(rel(c, 1.0 / (PI * PI)) < 1e-15);
        assert!(rel(radial_to_multimoment(&radial, 2, &mi(&[0, 0])).unwrap(), 1.0 / radial[0]) < 1e-15);
        let one_d = [2.0, 3.0, 7.0];
        assert_eq!(radial_to_multimoment(&one_d, 1, &mi(&[2])).unwrap(), 1.0 / 7.0);
        assert!(matches!(radial_to_multimoment(&one_d, 1, &mi(&[3])), Err(MomentError::DegreeExceeded { .. })));
    }

    #[test]
    fn product_conversion_examples() {
        let disc: Vec<f64> = (0..5).map(|j| PI / (j as f64 + 1.0)).collect();
        let bidisc = vec![disc.clone(), disc];
        let c = product_multimoment(&bidisc, &mi(&[1, 2])).unwrap();
        assert!(rel(c, 6.0 / (PI * PI)) < 1e-15);
        assert!(rel(product_multimoment(&bidisc, &mi(&[0, 0])).unwrap(), 1.0 / (PI * PI)) < 1e-15);
        let gauss: Vec<f64> = (0..5).map(|j| PI * combinatorics::factorial(j)).collect();
        let c = product_multimoment(&[gauss.clone(), gauss], &mi(&[1, 1])).unwrap();
        assert!(rel(c, 1.0 / (PI * PI)) < 1e-15);
        assert!(product_multimoment(&bidisc, &mi(&[1, 2, 0])).is_err());
    }

    #[test]
    fn log_convexity_examples() {
        let fock: Vec<f64> = (0..30).map(|d| PI * combinatorics::factorial(d)).collect();
        assert!(validate_log_convexity(&fock, 29, 1e-12).is_empty());
        let disc: Vec<f64> = (0..30).map(|d| PI / (d as f64 + 1.0)).collect();
        assert!(validate_log_convexity(&disc, 29, 1e-12).is_empty());
        assert_eq!(validate_log_convexity(&[1.0, 1.0, 3.0, 1.0], 3, 1e-12), vec![2]);
    }

    #[test]
    fn log_convexity_warnings_name_the_sequence() {
        let bad = MomentProvider::from_radial(1, vec![1.0, 1.0, 3.0, 1.0]).unwrap();
        assert_eq!(
            bad.log_convexity_warnings(1e-12),
            vec!["radial moment sequence is not log-convex at degree(s) [2]"]
        );
        let table = MomentProvider::from_table(
            2,
            vec![
                (mi(&[0, 0]), 1.0),
                (mi(&[1, 0]), 2.0),
                (mi(&[0, 1]), 1.0),
                (mi(&[2, 0]), 3.0),
                (mi(&[1, 1]), 1.0),
                (mi(&[0, 2]), 1.0),
            ],
        )
        .unwrap();
        assert_eq!(
            table.log_convexity_warnings(1e-12),
            vec!["moments along axis 1 is not log-convex at degree(s) [1]"]
        );
        let disc = MomentProvider::from_factors(vec![(0..10).map(|j| PI / (j as f64 + 1.0)).collect()]).unwrap();
        assert!(disc.log_convexity_warnings(1e-12).is_empty());
    }

    #[test]
    #[allow(clippy::approx_constant)] // table values echo user input
    fn table_provider() {
        let p = MomentProvider::from_table(1, vec![(mi(&[0]), 3.14159), (mi(&[1]), 3.14159)]).unwrap();
        assert_eq!(p.moment(&mi(&[1])).unwrap(), 3.14159);
        assert_eq!(p.supported_degree(), Some(1));
        assert!(matches!(p.moment(&mi(&[2])), Err(MomentError::DegreeExceeded { .. })));
        let err = MomentProvider::from_table(1, vec![(mi(&[0]), 0.0)]).unwrap_err();
        assert!(matches!(err, MomentError::NonpositiveMoment { .. }));
        let err = MomentProvider::from_table(1, vec![(mi(&[0]), 1.0), (mi(&[0]), 2.0)]).unwrap_err();
        assert!(matches!(err, MomentError::DuplicateIndex(_)));
        let two = MomentProvider::from_table(2, vec![(mi(&[0, 0]), 1.0), (mi(&[0, 1]), 1.0)]).unwrap();
        assert_eq!(two.supported_degree(), Some(0));
        assert!(matches!(two.moment(&mi(&[1, 0])), Err(MomentError::DegreeExceeded { .. })));
    }

    #[test]
    fn perturbation_touches_one_index() {
        let p = CatalogMeasure::Fock.provider(2, 4).unwrap();
        let q = p.clone().with_perturbation(mi(&[1, 0]), 1.0 + 1e-6);
        assert_eq!(p.moment(&mi(&[0, 1])).unwrap(), q.moment(&mi(&[0, 1])).unwrap());
        assert!(rel(q.moment(&mi(&[1, 0])).unwrap(), p.moment(&mi(&[1, 0])).unwrap() * (1.0 + 1e-6)) < 1e-15);
    }

    #[test]
    fn radial_provider_is_permutation_symmetric() {
        let p = MomentProvider::from_radial(3, vec![1.0, 0.7, 0.9, 1.6, 3.5, 9.0]).unwrap();
        for a in crate::multiindex::enumerate_nonnegative(3, 4).unwrap() {
            let mut e = a.entries().to_vec();
            e.reverse();
            assert_eq!(p.moment(&a).unwrap(), p.moment(&MultiIndex::new(e.clone())).unwrap());
            e.rotate_left(1);
            assert_eq!(p.moment(&a).unwrap(), p.moment(&MultiIndex::new(e)).unwrap());
        }
    }
}
