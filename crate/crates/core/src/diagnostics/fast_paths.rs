//! Closed-form statistics for rotation-invariant and product measures.
//!
//! For a rotation-invariant measure with radial moments `m_d`, every full
//! block with `|γ| = d − 1` has trace
//! `A(d) = ((d+2n−1)/(d+n))·m_{d+1}/m_d − m_d/m_{d−1}`, and every block with a
//! `−1` entry is the scalar `B(d) = m_{d+1}/((d+n)·m_d)`.

use serde::{Deserialize, Serialize};

use super::heuristics::{boundedness_rule, summability_rule, vanishing_rule, HeuristicConfig, Status};
use super::{DiagnosticError, Verdict, Witness};
use crate::moments::combinatorics::binomial;

fn need(m: &[f64], index: usize) -> Result<f64, DiagnosticError> {
    m.get(index).copied().ok_or(DiagnosticError::InsufficientMoments { needed: index, available: m.len() })
}

/// `(A(d), B(d))`; `A` is undefined at `d = 0`.
pub fn rotational_statistics(m: &[f64], n: usize, d: usize) -> Result<(Option<f64>, f64), DiagnosticError> {
    let up = need(m, d + 1)? / need(m, d)?;
    let (nf, df) = (n as f64, d as f64);
    let b = up / (df + nf);
    let a = if d == 0 { None } else { Some((df + 2.0 * nf - 1.0) / (df + nf) * up - need(m, d)? / need(m, d - 1)?) };
    Ok((a, b))
}

/// `binom(n+d−1, n−1)·m_{d+1}/m_d`, which equals the partial sum `s_d`.
pub fn rotational_hs_statistic(m: &[f64], n: usize, d: usize) -> Result<f64, DiagnosticError> {
    Ok(binomial((n + d - 1) as u64, (n - 1) as u64) * need(m, d + 1)? / need(m, d)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationalSchatten {
    pub p: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationalSection {
    /// `A(d)` for `d = 1..=K+1`.
    pub branch_full: Vec<f64>,
    /// `B(d)` for `d = 0..=K+1`.
    pub branch_one_dimensional: Vec<f64>,
    /// Smallest `d₀` with `A(d) ≥ B(d)` for all computed `d ≥ d₀`.
    pub full_branch_dominates_from: Option<usize>,
    pub boundedness: Verdict,
    pub compactness: Verdict,
    pub hilbert_schmidt: Verdict,
    pub schatten: Vec<RotationalSchatten>,
    /// Every status above equals its general-path counterpart.
    pub agrees_with_general_path: bool,
}

fn grade_witness(first_grade: i64, values: &[f64], pick_last: bool) -> Option<Witness> {
    let idx = if pick_last {
        values.len().checked_sub(1)?
    } else {
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        best
    };
    Some(Witness { grade: first_grade + idx as i64, gamma: None, direction: None, value: values[idx] })
}

/// Rotation-invariant criteria evaluated from `m_0..m_{K+2}`.
pub fn rotational_verdicts(
    m: &[f64],
    n: usize,
    max_degree: usize,
    exponents: &[f64],
    cfg: &HeuristicConfig,
) -> Result<RotationalSection, DiagnosticError> {
    let top = max_degree + 1;
    let mut branch_full = Vec::with_capacity(top);
    let mut branch_one = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let (a, b) = rotational_statistics(m, n, d)?;
        if let Some(a) = a {
            branch_full.push(a);
        }
        branch_one.push(b);
    }

    // Grade k holds full blocks (d = k+1, k ≥ 0) and, for n ≥ 2 or k = −1,
    // one-dimensional blocks.
    let by_grade: Vec<f64> = (-1..=max_degree as i64)
        .map(|k| {
            let d = (k + 1) as usize;
            let b = if n >= 2 || k == -1 { branch_one[d] } else { f64::NEG_INFINITY };
            let a = if k >= 0 { branch_full[d - 1] } else { f64::NEG_INFINITY };
            a.max(b)
        })
        .collect();

    let mut dominates_from = None;
    for d in (1..=top).rev() {
        if branch_full[d - 1] >= branch_one[d] * (1.0 - 1e-12) {
            dominates_from = Some(d);
        } else {
            break;
        }
    }

    let bounded = boundedness_rule(&by_grade, cfg);
    let boundedness = Verdict::new(
        "rotational sup statistic max(A(d), B(d)) by grade",
        -1,
        by_grade.clone(),
        max_degree,
        bounded,
        grade_witness(-1, &by_grade, false),
    );
    let vanishing = vanishing_rule(-1, &by_grade, cfg);
    let compactness = Verdict::new(
        "rotational limit statistic max(A(d), B(d)) by grade",
        -1,
        by_grade.clone(),
        max_degree,
        vanishing,
        grade_witness(-1, &by_grade, true),
    );

    let hs: Vec<f64> = (0..=top).map(|d| rotational_hs_statistic(m, n, d)).collect::<Result<_, _>>()?;
    let increments: Vec<f64> = std::iter::once(hs[0]).chain(hs.windows(2).map(|w| w[1] - w[0])).collect();
    let hs_rule = summability_rule(-1, &increments, cfg);
    let hilbert_schmidt = Verdict::new(
        "rotational binom(n+d-1, n-1)·m_{d+1}/m_d by d",
        0,
        hs.clone(),
        max_degree,
        hs_rule,
        grade_witness(0, &hs, true),
    );

    let mut schatten = Vec::new();
    for &p in exponents {
        if !(p > 0.0) || !p.is_finite() {
            return Err(DiagnosticError::InvalidExponent(p));
        }
        let terms: Vec<f64> = (0..=max_degree)
            .map(|k| binomial((n + k - 1) as u64, (n - 1) as u64) * branch_full[k].max(0.0).powf(p / 2.0))
            .collect();
        let rule = summability_rule(0, &terms, cfg);
        let sums = super::statistics::cumulative(&terms);
        let witness = grade_witness(0, &sums, true);
        schatten.push(RotationalSchatten {
            p,
            verdict: Verdict::new(
                "rotational Σ binom(n+d-2, n-1)·A(d)^{p/2} by grade",
                0,
                sums,
                max_degree,
                rule,
                witness,
            ),
        });
    }

    Ok(RotationalSection {
        branch_full,
        branch_one_dimensional: branch_one,
        full_branch_dominates_from: dominates_from,
        boundedness,
        compactness,
        hilbert_schmidt,
        schatten,
        agrees_with_general_path: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSection {
    /// One verdict per factor on `c^{j+1}/c^{j+2} − c^j/c^{j+1}`, `j = −1..=K`.
    pub factors: Vec<Verdict>,
    pub boundedness: Status,
    pub agrees_with_general_path: bool,
}

/// Per-factor boundedness for a product measure with 1-D moments `m^k_j`.
pub fn product_boundedness(
    factors: &[Vec<f64>],
    max_degree: usize,
    cfg: &HeuristicConfig,
) -> Result<ProductSection, DiagnosticError> {
    let mut verdicts = Vec::with_capacity(factors.len());
    for m in factors {
        let mut values = vec![need(m, 1)? / need(m, 0)?];
        for j in 0..=max_degree {
            values.push(need(m, j + 2)? / need(m, j + 1)? - need(m, j + 1)? / need(m, j)?);
        }
        let rule = boundedness_rule(&values, cfg);
        let witness = grade_witness(-1, &values, false);
        verdicts.push(Verdict::new("factor difference by exponent j", -1, values, max_degree, rule, witness));
    }
    let statuses: Vec<Status> = verdicts.iter().map(|v| v.status).collect();
    let boundedness = if statuses.iter().all(|s| *s == Status::EvidenceHolds) {
        Status::EvidenceHolds
    } else if statuses.contains(&Status::EvidenceFails) {
        Status::EvidenceFails
    } else {
        Status::Inconclusive
    };
    Ok(ProductSection { factors: verdicts, boundedness, agrees_with_general_path: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::statistics::{directional_difference, hs_partial_sum};
    use crate::moments::CatalogMeasure;
    use crate::multiindex::enumerate_grade;
    use std::f64::consts::PI;

    fn cfg() -> HeuristicConfig {
        HeuristicConfig::default()
    }

    #[test]
    fn branch_examples() {
        let fock = CatalogMeasure::Fock.provider(2, 12).unwrap();
        let m = fock.radial_sequence().unwrap();
        for d in 1..10 {
            assert!((rotational_statistics(m, 2, d).unwrap().0.unwrap() - 2.0).abs() < 1e-12);
        }
        let ball = CatalogMeasure::Ball.provider(2, 12).unwrap();
        let m = ball.radial_sequence().unwrap();
        for d in 1..10 {
            let (a, b) = rotational_statistics(m, 2, d).unwrap();
            let df = d as f64;
            assert!((a.unwrap() - 1.0 / (df + 2.0)).abs() < 1e-14);
            assert!((b - 1.0 / (df + 3.0)).abs() < 1e-14);
        }
        assert!(rotational_statistics(m, 2, 12).is_err());
    }

    #[test]
    fn branches_match_direct_sums() {
        for measure in [CatalogMeasure::Fock, CatalogMeasure::Ball, CatalogMeasure::GeneralizedFock { m: 2.5 }] {
            for n in 1..=3 {
                let p = measure.provider(n, 14).unwrap();
                let m = p.radial_sequence().unwrap();
                for k in -1..=12i64 {
                    let d = (k + 1) as usize;
                    let (a, b) = rotational_statistics(m, n, d).unwrap();
                    for g in enumerate_grade(n, k).unwrap() {
                        match g.negative_slot() {
                            Some(q) => {
                                let v = directional_difference(&p, &g, q).unwrap();
                                assert!((v - b).abs() <= 1e-10 * b, "{measure:?} γ={g}");
                            }
                            None => {
                                let sum: f64 = (0..n).map(|q| directional_difference(&p, &g, q).unwrap()).sum();
                                let a = a.unwrap();
                                assert!((sum - a).abs() <= 1e-10 * a.abs(), "{measure:?} γ={g}: {sum} vs {a}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hs_statistic_equals_partial_sum() {
        for n in 1..=3 {
            let p = CatalogMeasure::Ball.provider(n, 12).unwrap();
            let m = p.radial_sequence().unwrap();
            for d in 0..=10 {
                let s = hs_partial_sum(&p, d).unwrap();
                assert!((rotational_hs_statistic(m, n, d).unwrap() - s).abs() <= 1e-12 * s);
            }
        }
        let disc = CatalogMeasure::Ball.provider(1, 60).unwrap();
        let m = disc.radial_sequence().unwrap();
        let t = rotational_hs_statistic(m, 1, 50).unwrap();
        assert!((t - 51.0 / 52.0).abs() < 1e-13);
    }

    #[test]
    fn rotational_classification() {
        let disc = CatalogMeasure::Ball.provider(1, 52).unwrap();
        let s = rotational_verdicts(disc.radial_sequence().unwrap(), 1, 50, &[1.0, 2.0], &cfg()).unwrap();
        assert_eq!(s.boundedness.status, Status::EvidenceHolds);
        assert_eq!(s.compactness.status, Status::EvidenceHolds);
        assert_eq!(s.hilbert_schmidt.status, Status::EvidenceHolds);
        assert_eq!(s.schatten[0].verdict.status, Status::EvidenceFails);
        assert_eq!(s.schatten[1].verdict.status, Status::EvidenceHolds);
        // In one variable the one-dimensional branch only occurs at d = 0.
        assert_eq!(s.full_branch_dominates_from, None);
        let ball = CatalogMeasure::Ball.provider(2, 32).unwrap();
        let s = rotational_verdicts(ball.radial_sequence().unwrap(), 2, 30, &[2.0], &cfg()).unwrap();
        assert_eq!(s.full_branch_dominates_from, Some(1));
        assert_eq!(s.compactness.status, Status::EvidenceHolds);

        let fock = CatalogMeasure::Fock.provider(2, 32).unwrap();
        let s = rotational_verdicts(fock.radial_sequence().unwrap(), 2, 30, &[2.0], &cfg()).unwrap();
        assert_eq!(s.boundedness.status, Status::EvidenceHolds);
        assert_eq!(s.compactness.status, Status::EvidenceFails);
        assert_eq!(s.hilbert_schmidt.status, Status::EvidenceFails);
        assert!(matches!(
            rotational_verdicts(fock.radial_sequence().unwrap(), 2, 30, &[0.0], &cfg()),
            Err(DiagnosticError::InvalidExponent(_))
        ));
    }

    #[test]
    fn product_examples() {
        let bidisc = vec![(0..=52).map(|j| PI / (j as f64 + 1.0)).collect::<Vec<_>>(); 2];
        let s = product_boundedness(&bidisc, 50, &cfg()).unwrap();
        assert_eq!(s.boundedness, Status::EvidenceHolds);
        assert!((s.factors[0].statistic_by_grade[1] - 1.0 / 6.0).abs() < 1e-15);

        let fock: Vec<f64> = (0..=52u64).map(|j| PI * crate::moments::combinatorics::factorial(j)).collect();
        let s = product_boundedness(&[fock.clone(), fock], 50, &cfg()).unwrap();
        assert_eq!(s.boundedness, Status::EvidenceHolds);

        let fast: Vec<f64> = (0..=52u64).map(|j| PI * crate::moments::combinatorics::factorial(j).powi(2)).collect();
        let s = product_boundedness(&[fast], 50, &cfg()).unwrap();
        assert_eq!(s.boundedness, Status::EvidenceFails);
        let v = &s.factors[0].statistic_by_grade;
        for j in 0..=50usize {
            let expect = 2.0 * j as f64 + 3.0;
            assert!((v[j + 1] - expect).abs() <= 1e-9 * expect);
        }
        assert!(product_boundedness(&[vec![1.0, 2.0]], 5, &cfg()).is_err());
    }
}
