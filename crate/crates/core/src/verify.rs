//! Oracle checks comparing the fast block computation with independent
//! recomputations.
//!
//! The oracle provider evaluates every `m_α` from its own closed form, so a
//! corrupted moment in the primary provider shows up as a residual.

use num_complex::Complex64;

use crate::diagnostics::{
    analyze, directional_difference, hs_partial_sum, rotational_statistics, telescoping_residuals, AnalysisOptions,
    DiagnosticError,
};
use crate::moments::{quadrature_multimoment, MeasureSpec, MomentProvider};
use crate::multiindex::{enumerate_grade, enumerate_nonnegative, MultiIndex};
use crate::report::CheckResult;
use crate::spectral::{
    assemble_blocks, block_entries, canonical_solution_monomial, oracle_block_entries, polynomial_inner_product,
    MixedPolynomial,
};

pub const GRAM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
pub const TELESCOPING_TOL: f64 = 1e-9;
pub const BRANCH_TOL: f64 = 1e-10;
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Largest `|α|` in the polynomial identity checks.
pub const POLYNOMIAL_DEGREE_CAP: usize = 6;
/// Largest `|α|` compared against quadrature.
pub const QUADRATURE_DEGREE_CAP: usize = 10;

struct Tracker {
    name: &'static str,
    description: &'static str,
    tolerance: f64,
    max: f64,
    worst: Option<String>,
    cases: usize,
}

impl Tracker {
    fn new(name: &'static str, description: &'static str, tolerance: f64) -> Self {
        Tracker { name, description, tolerance, max: 0.0, worst: None, cases: 0 }
    }

    fn observe(&mut self, residual: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN residuals count as failures.
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > self.max {
            self.max = residual;
            self.worst = Some(case());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            description: self.description.to_string(),
            tolerance: self.tolerance,
            max_residual: self.max,
            cases: self.cases,
            passed: self.max <= self.tolerance,
            worst_case: self.worst,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn grades(n: usize, max_degree: usize) -> Result<Vec<MultiIndex>, DiagnosticError> {
    let mut out = Vec::new();
    for k in -1..=max_degree as i64 {
        out.extend(enumerate_grade(n, k).map_err(crate::moments::MomentError::from)?);
    }
    Ok(out)
}

/// Block entries from moments against the mixed-polynomial Gram matrices on
/// the oracle moments.
pub fn check_gram_equivalence(
    primary: &MomentProvider,
    oracle: &MomentProvider,
    max_degree: usize,
) -> Result<CheckResult, DiagnosticError> {
    let mut t = Tracker::new(
        "gram_equivalence",
        "block matrix entries equal the rescaled inner products of explicit canonical solutions",
        GRAM_TOL,
    );
    for gamma in grades(primary.dim(), max_degree)? {
        let (_, fast) = block_entries(primary, &gamma)?;
        let slow = oracle_block_entries(oracle, &gamma)?;
        let scale = slow.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        let diff = fast.iter().flatten().zip(slow.iter().flatten()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        t.observe(if scale > 0.0 { diff / scale } else { diff }, || format!("gamma {gamma}"));
    }
    Ok(t.finish())
}

/// Eigenvalue sums against the sums of directional differences.
pub fn check_trace_identity(provider: &MomentProvider, max_degree: usize) -> Result<CheckResult, DiagnosticError> {
    let mut t =
        Tracker::new("trace_identity", "sum of block eigenvalues equals the sum of directional differences", TRACE_TOL);
    for block in assemble_blocks(provider, max_degree)? {
        let eig: f64 = block.eigenvalues.iter().sum();
        let mut summands = 0.0;
        for &p in &block.directions {
            summands += directional_difference(provider, &block.gamma, p)?;
        }
        t.observe(relative(eig, summands), || format!("gamma {}", block.gamma));
    }
    Ok(t.finish())
}

/// Cumulative block traces against partial sums `s_{k+1}` on the oracle.
pub fn check_telescoping(
    primary: &MomentProvider,
    oracle: &MomentProvider,
    max_degree: usize,
) -> Result<CheckResult, DiagnosticError> {
    let mut t = Tracker::new(
        "telescoping",
        "cumulative block traces through grade k equal the partial sum s_(k+1)",
        TELESCOPING_TOL,
    );
    let blocks = assemble_blocks(primary, max_degree)?;
    let s: Vec<f64> = (0..=max_degree + 1).map(|k| hs_partial_sum(oracle, k)).collect::<Result<_, _>>()?;
    for (i, r) in telescoping_residuals(&blocks, &s).into_iter().enumerate() {
        t.observe(r, || format!("grade {}", i as i64 - 1));
    }
    Ok(t.finish())
}

/// Closed-form radial branches against direct sums of directional
/// differences on the oracle.
pub fn check_radial_branches(
    radial: &[f64],
    oracle: &MomentProvider,
    max_degree: usize,
) -> Result<CheckResult, DiagnosticError> {
    let n = oracle.dim();
    let mut t = Tracker::new(
        "radial_branches",
        "radial closed forms for full and one-dimensional blocks equal direct sums of directional differences",
        BRANCH_TOL,
    );
    for gamma in grades(n, max_degree)? {
        let d = (gamma.degree() + 1) as usize;
        let (a, b) = rotational_statistics(radial, n, d)?;
        let (expected, direct) = match gamma.negative_slot() {
            Some(q) => (b, directional_difference(oracle, &gamma, q)?),
            None => {
                let mut sum = 0.0;
                for p in 0..n {
                    sum += directional_difference(oracle, &gamma, p)?;
                }
                (a.unwrap_or(f64::NAN), sum)
            }
        };
        t.observe(relative(expected, direct), || format!("gamma {gamma}"));
    }
    Ok(t.finish())
}

/// Multimoments from the radial reduction against hyperspherical quadrature
/// of the weight.
pub fn check_radial_quadrature(
    spec: &MeasureSpec,
    provider: &MomentProvider,
    max_total_degree: usize,
) -> Result<Option<CheckResult>, DiagnosticError> {
    let weight = match (provider.radial_sequence(), spec.weight()) {
        (Some(_), Some(w)) => w?,
        _ => return Ok(None),
    };
    let mut t = Tracker::new(
        "radial_quadrature",
        "multimoments from the radial sequence equal quadrature of the weight in hyperspherical coordinates",
        QUADRATURE_TOL,
    );
    for d in 0..=max_total_degree.min(QUADRATURE_DEGREE_CAP) {
        for alpha in enumerate_nonnegative(provider.dim(), d).map_err(crate::moments::MomentError::from)? {
            let exps: Vec<u32> = alpha.entries().iter().map(|&e| e as u32).collect();
            let q = quadrature_multimoment(&weight, &exps, &spec.quadrature)?;
            let m = provider.moment(&alpha)?;
            t.observe(relative(1.0 / m, 1.0 / q), || format!("alpha {alpha}"));
        }
    }
    Ok(Some(t.finish()))
}

/// Fast-path statuses against general-path statuses.
pub fn check_fast_paths(
    provider: &MomentProvider,
    opts: &AnalysisOptions,
) -> Result<Option<CheckResult>, DiagnosticError> {
    let report = analyze(provider, "", opts)?;
    let mut t = Tracker::new("fast_path_agreement", "fast-path verdict statuses equal general-path statuses", 0.0);
    if let Some(r) = &report.rotational {
        t.observe(if r.agrees_with_general_path { 0.0 } else { 1.0 }, || "rotational".to_string());
    }
    if let Some(p) = &report.product {
        t.observe(if p.agrees_with_general_path { 0.0 } else { 1.0 }, || "product".to_string());
    }
    Ok((t.cases > 0).then(|| t.finish()))
}

/// `∂̄` of each canonical solution is exactly its form, and the solution is
/// orthogonal to holomorphic monomials.
pub fn check_solutions(
    provider: &MomentProvider,
    max_degree: usize,
) -> Result<(CheckResult, CheckResult), DiagnosticError> {
    let n = provider.dim();
    let mut dbar =
        Tracker::new("dbar_exactness", "dbar of the canonical solution reproduces z^alpha dzbar_j exactly", 0.0);
    let mut orth = Tracker::new(
        "orthogonality",
        "canonical solutions are orthogonal to z^beta for |beta| <= |alpha| + 2 (scaled)",
        ORTHOGONALITY_TOL,
    );
    let mm = crate::moments::MomentError::from;
    for d in 0..=max_degree.min(POLYNOMIAL_DEGREE_CAP) {
        for alpha in enumerate_nonnegative(n, d).map_err(mm)? {
            for j in 0..n {
                let s = canonical_solution_monomial(provider, &alpha, j)?;
                let mismatched = (0..n).any(|i| {
                    let expect =
                        if i == j { MixedPolynomial::monomial(alpha.clone()) } else { MixedPolynomial::zero() };
                    s.dbar_coefficient(i) != expect
                });
                dbar.observe(if mismatched { 1.0 } else { 0.0 }, || format!("alpha {alpha}, j {}", j + 1));
                let norm = polynomial_inner_product(provider, &s, &s)?.re.sqrt();
                for e in 0..=d + 2 {
                    for beta in enumerate_nonnegative(n, e).map_err(mm)? {
                        let zn = provider.moment(&beta)?.sqrt();
                        let ip: Complex64 =
                            polynomial_inner_product(provider, &s, &MixedPolynomial::monomial(beta.clone()))?;
                        orth.observe(ip.norm() / (norm * zn), || format!("alpha {alpha}, j {}, beta {beta}", j + 1));
                    }
                }
            }
        }
    }
    Ok((dbar.finish(), orth.finish()))
}

/// Runs every applicable check.
pub fn run_checks(
    spec: &MeasureSpec,
    primary: &MomentProvider,
    oracle: &MomentProvider,
    opts: &AnalysisOptions,
) -> Result<Vec<CheckResult>, DiagnosticError> {
    let k = opts.max_degree;
    let mut checks = vec![
        check_gram_equivalence(primary, oracle, k)?,
        check_trace_identity(primary, k)?,
        check_telescoping(primary, oracle, k)?,
    ];
    if let Some(radial) = primary.radial_sequence() {
        checks.push(check_radial_branches(radial, oracle, k)?);
    }
    if let Some(c) = check_radial_quadrature(spec, primary, k + 2)? {
        checks.push(c);
    }
    if let Some(c) = check_fast_paths(primary, opts)? {
        checks.push(c);
    }
    let (dbar, orth) = check_solutions(primary, k)?;
    checks.push(dbar);
    checks.push(orth);
    Ok(checks)
}
