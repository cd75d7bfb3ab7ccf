//! Per-grade statistics of the assembled blocks.

use super::DiagnosticError;
use crate::moments::{MomentError, MomentProvider};
use crate::multiindex::{enumerate_nonnegative, MultiIndex};
use crate::spectral::SpectralBlock;

/// `c_{γ+e_p}/c_{γ+2e_p} − c_γ/c_{γ+e_p}`, the diagonal entry of `C_γ` in
/// direction `p`.
pub fn directional_difference(provider: &MomentProvider, gamma: &MultiIndex, p: usize) -> Result<f64, MomentError> {
    let a = gamma.plus_unit(p);
    Ok(provider.c_ratio(&a, &a.plus_unit(p))? - provider.c_ratio(gamma, &a)?)
}

/// Largest directional difference within one grade and where it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeMaximum {
    pub grade: i64,
    pub value: f64,
    pub gamma: MultiIndex,
    /// Zero-based.
    pub direction: usize,
}

/// Maximum diagonal entry per grade, for blocks ordered by grade. Ties keep
/// the first block in lexicographic order.
pub fn grade_maxima(blocks: &[SpectralBlock]) -> Vec<GradeMaximum> {
    let mut out: Vec<GradeMaximum> = Vec::new();
    for block in blocks {
        for (i, &p) in block.directions.iter().enumerate() {
            let value = block.matrix[i][i];
            match out.last_mut() {
                Some(last) if last.grade == block.grade() => {
                    if value > last.value {
                        *last = GradeMaximum { grade: last.grade, value, gamma: block.gamma.clone(), direction: p };
                    }
                }
                _ => out.push(GradeMaximum { grade: block.grade(), value, gamma: block.gamma.clone(), direction: p }),
            }
        }
    }
    out
}

/// `max` over `Γ_k` of the directional differences, read off the blocks.
pub fn boundedness_statistic(blocks: &[SpectralBlock], k: i64) -> Option<f64> {
    grade_maxima(blocks).into_iter().find(|g| g.grade == k).map(|g| g.value)
}

/// `s_k = Σ_{|α|=k} Σ_p c_α / c_{α+e_p}`.
pub fn hs_partial_sum(provider: &MomentProvider, k: usize) -> Result<f64, MomentError> {
    let n = provider.dim();
    let mut total = 0.0;
    for alpha in enumerate_nonnegative(n, k)? {
        let base = provider.moment(&alpha)?;
        for p in 0..n {
            total += provider.moment(&alpha.plus_unit(p))? / base;
        }
    }
    Ok(total)
}

/// Sum of block traces per grade, in grade order.
pub fn grade_traces(blocks: &[SpectralBlock]) -> Vec<(i64, f64)> {
    let mut out: Vec<(i64, f64)> = Vec::new();
    for block in blocks {
        match out.last_mut() {
            Some((g, t)) if *g == block.grade() => *t += block.trace,
            _ => out.push((block.grade(), block.trace)),
        }
    }
    out
}

/// Relative residuals `|Σ_{ℓ≤k} Σ_{γ∈Γ_ℓ} tr C_γ − s_{k+1}| / s_{k+1}`, one per
/// grade `k` present in `blocks`. `partial_sums[j]` holds `s_j`.
pub fn telescoping_residuals(blocks: &[SpectralBlock], partial_sums: &[f64]) -> Vec<f64> {
    let mut cumulative = 0.0;
    grade_traces(blocks)
        .into_iter()
        .map(|(k, t)| {
            cumulative += t;
            let s = partial_sums[(k + 1) as usize];
            (cumulative - s).abs() / s.abs()
        })
        .collect()
}

/// Per-grade Schatten sums in the two forms compared in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SchattenGrades {
    pub first_grade: i64,
    /// `Σ_{γ∈Γ_k} Σ_j (λ²_{γ,j})^{p/2}`.
    pub exact_terms: Vec<f64>,
    /// `Σ_{γ∈Γ_k} (tr C_γ)^{p/2}`.
    pub surrogate_terms: Vec<f64>,
}

impl SchattenGrades {
    pub fn exact_partial_sums(&self) -> Vec<f64> {
        cumulative(&self.exact_terms)
    }

    pub fn surrogate_partial_sums(&self) -> Vec<f64> {
        cumulative(&self.surrogate_terms)
    }
}

pub fn cumulative(terms: &[f64]) -> Vec<f64> {
    terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect()
}

pub fn schatten_partial_sums(blocks: &[SpectralBlock], p: f64) -> Result<SchattenGrades, DiagnosticError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(DiagnosticError::InvalidExponent(p));
    }
    let half = p / 2.0;
    let mut exact: Vec<f64> = Vec::new();
    let mut surrogate: Vec<f64> = Vec::new();
    let mut grade: Option<i64> = None;
    let first_grade = blocks.first().map_or(-1, |b| b.grade());
    for block in blocks {
        let e: f64 = block.eigenvalues.iter().map(|l| l.max(0.0).powf(half)).sum();
        let s = block.trace.max(0.0).powf(half);
        if grade == Some(block.grade()) {
            *exact.last_mut().expect("grade started") += e;
            *surrogate.last_mut().expect("grade started") += s;
        } else {
            grade = Some(block.grade());
            exact.push(e);
            surrogate.push(s);
        }
    }
    Ok(SchattenGrades { first_grade, exact_terms: exact, surrogate_terms: surrogate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::CatalogMeasure;
    use crate::spectral::assemble_blocks;

    fn mi(v: &[i32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn fock_grade_maximum_is_one() {
        let p = CatalogMeasure::Fock.provider(2, 10).unwrap();
        let blocks = assemble_blocks(&p, 8).unwrap();
        for k in -1..=8 {
            assert!((boundedness_statistic(&blocks, k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_grade_maxima() {
        let p = CatalogMeasure::Ball.provider(1, 12).unwrap();
        let blocks = assemble_blocks(&p, 10).unwrap();
        let maxima = grade_maxima(&blocks);
        assert!((maxima[0].value - 0.5).abs() < 1e-15);
        for g in &maxima[1..] {
            let k = g.grade as f64;
            assert!((g.value - 1.0 / ((k + 2.0) * (k + 3.0))).abs() < 1e-15);
        }
    }

    #[test]
    fn bidisc_witness_is_the_negative_block() {
        let p = CatalogMeasure::Polydisc.provider(2, 12).unwrap();
        let blocks = assemble_blocks(&p, 10).unwrap();
        let last = grade_maxima(&blocks).pop().unwrap();
        assert_eq!(last.gamma, mi(&[-1, 11]));
        assert_eq!(last.direction, 0);
        assert!((last.value - 0.5).abs() < 1e-15);
        // Along (k, 0) in the second direction the value stays at 1/6.
        for k in 0..10 {
            let v = directional_difference(&p, &mi(&[k, 0]), 1).unwrap();
            assert!((v - 1.0 / 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hs_partial_sum_examples() {
        let fock = CatalogMeasure::Fock.provider(1, 12).unwrap();
        for k in 0..10 {
            assert!((hs_partial_sum(&fock, k).unwrap() - (k as f64 + 1.0)).abs() < 1e-12);
        }
        let disc = CatalogMeasure::Ball.provider(1, 12).unwrap();
        assert!((hs_partial_sum(&disc, 5).unwrap() - 6.0 / 7.0).abs() < 1e-15);
        let ball = CatalogMeasure::Ball.provider(3, 4).unwrap();
        let s0: f64 =
            (0..3).map(|p| ball.moment(&MultiIndex::unit(3, p)).unwrap() / ball.moment(&mi(&[0, 0, 0])).unwrap()).sum();
        assert_eq!(hs_partial_sum(&ball, 0).unwrap(), s0);
    }

    #[test]
    fn telescoping_base_case_and_sensitivity() {
        let fock = CatalogMeasure::Fock.provider(1, 6).unwrap();
        let blocks = assemble_blocks(&fock, 3).unwrap();
        let s: Vec<f64> = (0..=5).map(|k| hs_partial_sum(&fock, k).unwrap()).collect();
        let r = telescoping_residuals(&blocks, &s);
        assert_eq!(r[0], 0.0);
        assert!(r.iter().all(|x| *x < 1e-12));

        let disc = CatalogMeasure::Ball.provider(1, 6).unwrap();
        let mut blocks = assemble_blocks(&disc, 3).unwrap();
        let s: Vec<f64> = (0..=5).map(|k| hs_partial_sum(&disc, k).unwrap()).collect();
        assert!(telescoping_residuals(&blocks, &s)[4] < 1e-12);
        blocks[2].trace *= 1.0 + 1e-6;
        assert!(telescoping_residuals(&blocks, &s)[4] > 1e-8);
    }

    #[test]
    fn schatten_examples() {
        let disc = CatalogMeasure::Ball.provider(1, 12).unwrap();
        let blocks = assemble_blocks(&disc, 10).unwrap();
        let two = schatten_partial_sums(&blocks, 2.0).unwrap();
        assert_eq!(two.first_grade, -1);
        assert!((two.exact_terms[0] - 0.5).abs() < 1e-15);
        let total = two.exact_partial_sums().pop().unwrap();
        // 1/2 + Σ_{d=0}^{10} 1/((d+2)(d+3)) = 1/2 + 1/2 − 1/13
        assert!((total - (1.0 - 1.0 / 13.0)).abs() < 1e-14);
        assert_eq!(two.exact_terms, two.surrogate_terms);
        assert!(matches!(schatten_partial_sums(&blocks, 0.0), Err(DiagnosticError::InvalidExponent(_))));
        assert!(schatten_partial_sums(&blocks, -1.0).is_err());
    }

    #[test]
    fn directional_differences_are_nonnegative() {
        for m in [CatalogMeasure::Ball, CatalogMeasure::Polydisc, CatalogMeasure::GeneralizedFock { m: 3.0 }] {
            let p = m.provider(3, 10).unwrap();
            for b in assemble_blocks(&p, 8).unwrap() {
                for i in 0..b.dim {
                    assert!(b.matrix[i][i] >= -1e-12 * b.trace.abs());
                }
            }
        }
    }
}
