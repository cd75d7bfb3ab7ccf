//! Boundedness, compactness, Hilbert–Schmidt and Schatten diagnostics.
//!
//! Each criterion is a condition on infinitely many blocks. Here it is
//! evaluated on grades `−1..=K` and summarized as a tri-state [`Verdict`]:
//! the truncated data either support the condition, contradict it, or do
//! not decide it. A verdict is evidence, never a proof.
//!
//! Rotation-invariant and product measures additionally get closed-form
//! fast paths whose statuses are cross-checked against the general path.

pub mod fast_paths;
pub mod heuristics;
pub mod statistics;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::{MomentError, MomentProvider};
use crate::multiindex::MultiIndex;
use crate::spectral::{assemble_blocks, SpectralBlock, SpectralError};

pub use fast_paths::{
    product_boundedness, rotational_hs_statistic, rotational_statistics, rotational_verdicts, ProductSection,
    RotationalSchatten, RotationalSection,
};
pub use heuristics::{
    boundedness_rule, power_law_exponent, summability_rule, vanishing_rule, HeuristicConfig, RuleOutcome, Status,
};
pub use statistics::{
    boundedness_statistic, directional_difference, grade_maxima, hs_partial_sum, schatten_partial_sums,
    telescoping_residuals, GradeMaximum, SchattenGrades,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DiagnosticError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("Schatten exponent must be a positive finite number, got {0}")]
    InvalidExponent(f64),
    #[error("radial moment m_{needed} required but only {available} supplied")]
    InsufficientMoments { needed: usize, available: usize },
    #[error("invalid heuristic configuration: {0}")]
    InvalidConfig(String),
}

/// Where a statistic was extremal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub grade: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MultiIndex>,
    /// One-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub status: Status,
    /// What `statistic_by_grade` holds.
    pub statistic: String,
    /// Grade (or index) of `statistic_by_grade[0]`.
    pub first_grade: i64,
    pub statistic_by_grade: Vec<f64>,
    pub truncation: usize,
    /// Fitted log-log decay exponent, when the rule uses one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn new(
        statistic: &str,
        first_grade: i64,
        statistic_by_grade: Vec<f64>,
        truncation: usize,
        outcome: RuleOutcome,
        witness: Option<Witness>,
    ) -> Self {
        Verdict {
            status: outcome.status,
            statistic: statistic.to_string(),
            first_grade,
            statistic_by_grade,
            truncation,
            decay_exponent: outcome.exponent.filter(|a| a.is_finite()),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSchmidtSection {
    pub verdict: Verdict,
    /// Largest `|cumulative trace through grade k − s_{k+1}| / s_{k+1}`.
    pub telescoping_max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchattenSection {
    pub p: f64,
    /// Decided on the exact eigenvalue sums.
    pub verdict: Verdict,
    /// Cumulative `Σ_γ (tr C_γ)^{p/2}` by grade, for comparison only.
    pub trace_power_partial_sums: Vec<f64>,
}

/// Block matrix and spectrum as printed in verbose reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSummary {
    pub gamma: MultiIndex,
    /// One-based.
    pub directions: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub trace: f64,
}

impl From<&SpectralBlock> for BlockSummary {
    fn from(b: &SpectralBlock) -> Self {
        BlockSummary {
            gamma: b.gamma.clone(),
            directions: b.directions.iter().map(|d| d + 1).collect(),
            matrix: b.matrix.clone(),
            eigenvalues: b.eigenvalues.clone(),
            eigenvectors: b.eigenvectors.clone(),
            trace: b.trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureInfo {
    pub name: String,
    pub n: usize,
    pub provider: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticReport {
    pub schema_version: u32,
    pub measure: MeasureInfo,
    pub truncation: usize,
    pub heuristics: HeuristicConfig,
    pub boundedness: Verdict,
    pub compactness: Verdict,
    pub hilbert_schmidt: HilbertSchmidtSection,
    pub schatten: Vec<SchattenSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotational: Option<RotationalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSummary>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub max_degree: usize,
    pub schatten: Vec<f64>,
    pub heuristics: HeuristicConfig,
    pub include_blocks: bool,
}

impl AnalysisOptions {
    pub fn new(max_degree: usize) -> Self {
        AnalysisOptions {
            max_degree,
            schatten: vec![1.0, 2.0],
            heuristics: HeuristicConfig::default(),
            include_blocks: false,
        }
    }
}

fn witness_from(g: &GradeMaximum) -> Witness {
    Witness { grade: g.grade, gamma: Some(g.gamma.clone()), direction: Some(g.direction + 1), value: g.value }
}

/// Runs every applicable diagnostic on grades `−1..=K`. Needs moments through
/// total degree `K + 2`.
pub fn analyze(
    provider: &MomentProvider,
    name: &str,
    opts: &AnalysisOptions,
) -> Result<DiagnosticReport, DiagnosticError> {
    let cfg = &opts.heuristics;
    cfg.validate().map_err(DiagnosticError::InvalidConfig)?;
    if let Some(p) = opts.schatten.iter().copied().find(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(DiagnosticError::InvalidExponent(p));
    }
    let k_max = opts.max_degree;
    let blocks = assemble_blocks(provider, k_max)?;

    let maxima = grade_maxima(&blocks);
    let values: Vec<f64> = maxima.iter().map(|g| g.value).collect();
    let sup = maxima.iter().fold(&maxima[0], |best, g| if g.value > best.value { g } else { best });
    let boundedness = Verdict::new(
        "max directional difference over the grade",
        -1,
        values.clone(),
        k_max,
        heuristics::boundedness_rule(&values, cfg),
        Some(witness_from(sup)),
    );
    let compactness = Verdict::new(
        "max directional difference over the grade",
        -1,
        values.clone(),
        k_max,
        heuristics::vanishing_rule(-1, &values, cfg),
        maxima.last().map(witness_from),
    );

    let partial: Vec<f64> = (0..=k_max + 1).map(|k| hs_partial_sum(provider, k)).collect::<Result<_, _>>()?;
    let increments: Vec<f64> = std::iter::once(partial[0]).chain(partial.windows(2).map(|w| w[1] - w[0])).collect();
    let residual = telescoping_residuals(&blocks, &partial).into_iter().fold(0.0, f64::max);
    let hilbert_schmidt = HilbertSchmidtSection {
        verdict: Verdict::new(
            "partial sum s_k",
            0,
            partial.clone(),
            k_max,
            heuristics::summability_rule(-1, &increments, cfg),
            Some(Witness { grade: k_max as i64 + 1, gamma: None, direction: None, value: partial[k_max + 1] }),
        ),
        telescoping_max_residual: residual,
    };

    let mut schatten = Vec::with_capacity(opts.schatten.len());
    for &p in &opts.schatten {
        let grades = schatten_partial_sums(&blocks, p)?;
        let sums = grades.exact_partial_sums();
        let witness =
            Witness { grade: k_max as i64, gamma: None, direction: None, value: *sums.last().unwrap_or(&0.0) };
        schatten.push(SchattenSection {
            p,
            verdict: Verdict::new(
                "cumulative Σ (λ²)^{p/2} through the grade",
                grades.first_grade,
                sums,
                k_max,
                heuristics::summability_rule(grades.first_grade, &grades.exact_terms, cfg),
                Some(witness),
            ),
            trace_power_partial_sums: grades.surrogate_partial_sums(),
        });
    }

    let rotational = match provider.radial_sequence() {
        Some(m) => {
            let mut section = rotational_verdicts(m, provider.dim(), k_max, &opts.schatten, cfg)?;
            section.agrees_with_general_path = section.boundedness.status == boundedness.status
                && section.compactness.status == compactness.status
                && section.hilbert_schmidt.status == hilbert_schmidt.verdict.status
                && section.schatten.iter().zip(&schatten).all(|(a, b)| a.verdict.status == b.verdict.status);
            Some(section)
        }
        None => None,
    };
    let product = match provider.factor_sequences() {
        Some(f) => {
            let mut section = product_boundedness(f, k_max, cfg)?;
            section.agrees_with_general_path = section.boundedness == boundedness.status;
            Some(section)
        }
        None => None,
    };

    Ok(DiagnosticReport {
        schema_version: REPORT_SCHEMA_VERSION,
        measure: MeasureInfo { name: name.to_string(), n: provider.dim(), provider: provider.kind().label() },
        truncation: k_max,
        heuristics: *cfg,
        boundedness,
        compactness,
        hilbert_schmidt,
        schatten,
        rotational,
        product,
        blocks: opts.include_blocks.then(|| blocks.iter().map(BlockSummary::from).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::CatalogMeasure;
    use std::f64::consts::PI;

    fn run(measure: CatalogMeasure, n: usize, k: usize) -> DiagnosticReport {
        let p = measure.provider(n, k + 2).unwrap();
        analyze(&p, &measure.name(), &AnalysisOptions::new(k)).unwrap()
    }

    #[test]
    fn fock_classification() {
        for (n, k) in [(1, 50), (2, 30)] {
            let r = run(CatalogMeasure::Fock, n, k);
            assert_eq!(r.boundedness.status, Status::EvidenceHolds);
            assert_eq!(r.compactness.status, Status::EvidenceFails);
            assert_eq!(r.hilbert_schmidt.verdict.status, Status::EvidenceFails);
            assert!(r.schatten.iter().all(|s| s.verdict.status == Status::EvidenceFails));
            assert!(r.rotational.as_ref().unwrap().agrees_with_general_path);
            let product = r.product.as_ref().unwrap();
            assert_eq!(product.boundedness, Status::EvidenceHolds);
            assert!(product.agrees_with_general_path);
        }
    }

    #[test]
    fn disc_classification() {
        let r = run(CatalogMeasure::Ball, 1, 50);
        assert_eq!(r.boundedness.status, Status::EvidenceHolds);
        assert_eq!(r.compactness.status, Status::EvidenceHolds);
        assert_eq!(r.hilbert_schmidt.verdict.status, Status::EvidenceHolds);
        assert_eq!(r.schatten[0].p, 1.0);
        assert_eq!(r.schatten[0].verdict.status, Status::EvidenceFails);
        assert_eq!(r.schatten[1].verdict.status, Status::EvidenceHolds);
        assert!(r.rotational.as_ref().unwrap().agrees_with_general_path);
        assert!(r.hilbert_schmidt.telescoping_max_residual < 1e-12);
    }

    #[test]
    fn bidisc_classification() {
        let r = run(CatalogMeasure::Polydisc, 2, 30);
        assert_eq!(r.boundedness.status, Status::EvidenceHolds);
        let product = r.product.as_ref().unwrap();
        assert_eq!(product.boundedness, Status::EvidenceHolds);
        assert!(product.agrees_with_general_path);
        assert_eq!(r.compactness.status, Status::EvidenceFails);
        let w = r.compactness.witness.as_ref().unwrap();
        assert_eq!(w.gamma.as_ref().unwrap(), &MultiIndex::new(vec![-1, 31]));
        assert_eq!(w.direction, Some(1));
        assert!((w.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ball_fast_paths_agree() {
        for (n, k) in [(2, 30), (3, 20)] {
            let r = run(CatalogMeasure::Ball, n, k);
            assert_eq!(r.compactness.status, Status::EvidenceHolds);
            assert_eq!(r.hilbert_schmidt.verdict.status, Status::EvidenceFails);
            let rot = r.rotational.as_ref().unwrap();
            assert!(rot.agrees_with_general_path, "n={n}: {rot:?}");
        }
    }

    #[test]
    fn generalized_fock_fast_paths_agree() {
        for m in [0.5, 2.0, 3.0] {
            let r = run(CatalogMeasure::GeneralizedFock { m }, 2, 30);
            assert!(r.rotational.as_ref().unwrap().agrees_with_general_path, "m={m}");
            let r = run(CatalogMeasure::GeneralizedFockProduct { m }, 2, 30);
            assert!(r.product.as_ref().unwrap().agrees_with_general_path, "m={m}");
        }
    }

    #[test]
    fn super_factorial_factor_is_unbounded() {
        let f: Vec<f64> = (0..=52u64).map(|j| PI * crate::moments::combinatorics::factorial(j).powi(2)).collect();
        let p = MomentProvider::from_factors(vec![f.clone(), f]).unwrap();
        let r = analyze(&p, "super-factorial", &AnalysisOptions::new(50)).unwrap();
        assert_eq!(r.boundedness.status, Status::EvidenceFails);
        let product = r.product.as_ref().unwrap();
        assert_eq!(product.boundedness, Status::EvidenceFails);
        assert!(product.agrees_with_general_path);
    }

    #[test]
    fn verdicts_are_deterministic_and_self_describing() {
        let a = run(CatalogMeasure::Ball, 2, 12);
        let b = run(CatalogMeasure::Ball, 2, 12);
        assert_eq!(a, b);
        assert_eq!(a.truncation, 12);
        assert_eq!(a.heuristics, HeuristicConfig::default());
        assert_eq!(a.schema_version, REPORT_SCHEMA_VERSION);
        assert!(a.blocks.is_none());
    }

    #[test]
    fn option_errors() {
        let p = CatalogMeasure::Fock.provider(1, 10).unwrap();
        let mut opts = AnalysisOptions::new(5);
        opts.schatten = vec![2.0, -1.0];
        assert!(matches!(analyze(&p, "x", &opts), Err(DiagnosticError::InvalidExponent(_))));
        let mut opts = AnalysisOptions::new(5);
        opts.heuristics.window = 0;
        assert!(matches!(analyze(&p, "x", &opts), Err(DiagnosticError::InvalidConfig(_))));
        assert!(analyze(&p, "x", &AnalysisOptions::new(9)).is_err());
    }
}
