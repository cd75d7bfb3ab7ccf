//! Canonical solutions of monomial forms and the invariant blocks `C_γ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::block_eigenvalues;
use super::polynomial::{polynomial_inner_product, MixedPolynomial};
use super::SpectralError;
use crate::moments::{MomentError, MomentProvider};
use crate::multiindex::{admissible_directions, enumerate_grade, MultiIndex};

/// `S(z^α dz̄_j) = z̄_j z^α − (c_{α−e_j}/c_α) z^{α−e_j}`; the second term is
/// absent when `α_j = 0`.
pub fn canonical_solution_monomial(
    provider: &MomentProvider,
    alpha: &MultiIndex,
    j: usize,
) -> Result<MixedPolynomial, MomentError> {
    if alpha.has_negative() {
        return Err(MomentError::NegativeIndex(alpha.clone()));
    }
    let n = alpha.dim();
    let mut out = MixedPolynomial::term(alpha.clone(), MultiIndex::unit(n, j), Complex64::new(1.0, 0.0));
    let lower = alpha.minus_unit(j);
    if lower.is_nonnegative() {
        let ratio = provider.moment(alpha)? / provider.moment(&lower)?;
        out = out.add(&MixedPolynomial::term(lower, MultiIndex::zeros(n), Complex64::new(-ratio, 0.0)));
    }
    Ok(out)
}

/// `⟨S z^α dz̄_k, S z^β dz̄_ℓ⟩`, which is
/// `m_{α+e_ℓ} − m_α m_β / m_{α−e_k}` when `β = α + e_ℓ − e_k` and 0 otherwise.
pub fn gram_entry(
    provider: &MomentProvider,
    alpha: &MultiIndex,
    k: usize,
    beta: &MultiIndex,
    l: usize,
) -> Result<f64, MomentError> {
    for idx in [alpha, beta] {
        if idx.has_negative() {
            return Err(MomentError::NegativeIndex(idx.clone()));
        }
    }
    if alpha.minus_unit(k) != beta.minus_unit(l) {
        return Ok(0.0);
    }
    let first = provider.moment(&alpha.plus_unit(l))?;
    let lower = alpha.minus_unit(k);
    let second = if lower.is_nonnegative() {
        provider.moment(alpha)? * provider.moment(beta)? / provider.moment(&lower)?
    } else {
        0.0
    };
    Ok(first - second)
}

/// The matrix `C_γ` with its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBlock {
    pub gamma: MultiIndex,
    pub dim: usize,
    /// Zero-based directions labelling rows and columns.
    pub directions: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
    /// The squared norms `λ²`, descending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors in the order of `eigenvalues`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub trace: f64,
}

impl SpectralBlock {
    pub fn grade(&self) -> i64 {
        self.gamma.degree()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Entries of `C_γ` over the admissible directions, computed from moments:
/// `C_{p,q} = m_{γ+e_p+e_q}/√(m_{γ+e_p} m_{γ+e_q}) − √(m_{γ+e_p} m_{γ+e_q})/m_γ`,
/// the last term vanishing when `γ` has a negative entry.
pub fn block_entries(
    provider: &MomentProvider,
    gamma: &MultiIndex,
) -> Result<(Vec<usize>, Vec<Vec<f64>>), MomentError> {
    let directions = admissible_directions(gamma)?;
    let dim = directions.len();
    let base = if gamma.is_nonnegative() { Some(provider.moment(gamma)?) } else { None };
    let first: Vec<f64> = directions.iter().map(|&p| provider.moment(&gamma.plus_unit(p))).collect::<Result<_, _>>()?;
    let mut matrix = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        let p = directions[a];
        // Diagonal by direct division keeps exact moment ratios exact.
        let top = provider.moment(&gamma.plus_unit(p).plus_unit(p))?;
        matrix[a][a] = top / first[a] - base.map_or(0.0, |m| first[a] / m);
        for b in (a + 1)..dim {
            let q = directions[b];
            let mixed = provider.moment(&gamma.plus_unit(p).plus_unit(q))?;
            let (sp, sq) = (first[a].sqrt(), first[b].sqrt());
            let value = mixed / sp / sq - base.map_or(0.0, |m| sp * sq / m);
            matrix[a][b] = value;
            matrix[b][a] = value;
        }
    }
    Ok((directions, matrix))
}

/// Builds and diagonalizes the block for `γ`.
pub fn block_matrix(provider: &MomentProvider, gamma: &MultiIndex) -> Result<SpectralBlock, SpectralError> {
    let wrap = |source: SpectralError| SpectralError::Block { gamma: gamma.clone(), source: Box::new(source) };
    let (directions, matrix) = block_entries(provider, gamma).map_err(|e| wrap(e.into()))?;
    let system = block_eigenvalues(&matrix).map_err(wrap)?;
    let trace = (0..matrix.len()).map(|i| matrix[i][i]).sum();
    Ok(SpectralBlock {
        gamma: gamma.clone(),
        dim: directions.len(),
        directions,
        matrix,
        eigenvalues: system.values,
        eigenvectors: system.vectors,
        trace,
    })
}

/// The same matrix recomputed from mixed polynomials:
/// `√(c_{γ+e_p} c_{γ+e_q}) · ⟨S_p, S_q⟩` with `S_p` the canonical solution of
/// `z^{γ+e_p} dz̄_p`.
pub fn oracle_block_entries(provider: &MomentProvider, gamma: &MultiIndex) -> Result<Vec<Vec<f64>>, MomentError> {
    let directions = admissible_directions(gamma)?;
    let solutions: Vec<(f64, MixedPolynomial)> = directions
        .iter()
        .map(|&p| {
            let alpha = gamma.plus_unit(p);
            Ok((provider.moment(&alpha)?.sqrt(), canonical_solution_monomial(provider, &alpha, p)?))
        })
        .collect::<Result<_, MomentError>>()?;
    let dim = directions.len();
    let mut matrix = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let ip = polynomial_inner_product(provider, &solutions[a].1, &solutions[b].1)?;
            matrix[a][b] = ip.re / solutions[a].0 / solutions[b].0;
        }
    }
    Ok(matrix)
}

/// All blocks with `-1 ≤ |γ| ≤ max_degree`, ordered by grade and then
/// lexicographically. Blocks are evaluated in parallel.
pub fn assemble_blocks(provider: &MomentProvider, max_degree: usize) -> Result<Vec<SpectralBlock>, SpectralError> {
    let n = provider.dim();
    let mut gammas = Vec::new();
    for k in -1..=(max_degree as i64) {
        gammas.extend(enumerate_grade(n, k)?);
    }
    gammas.par_iter().map(|g| block_matrix(provider, g)).collect()
}
