//! Shipped measures with closed-form moments.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::combinatorics::{factorial, ln_factorial, ln_multi_factorial, multi_factorial, radial_reduction};
use super::quadrature::QuadratureSettings;
use super::weight::{quadrature_radial_moment, quadrature_radial_sequence, RadialWeight, Support};
use super::{validate_log_convexity, MomentError, MomentProvider, ProviderKind};
use crate::multiindex::MultiIndex;

/// Degrees checked against quadrature when a catalog provider is built.
const QUADRATURE_CHECK_DEGREE: usize = 8;
const QUADRATURE_CHECK_TOL: f64 = 1e-8;
const LOG_CONVEXITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogMeasure {
    /// `e^{-|z|²} dV` on `ℂⁿ`.
    Fock,
    /// `e^{-|z|^{2m}} dV` on `ℂⁿ`, `|z|` the Euclidean norm.
    GeneralizedFock { m: f64 },
    /// `Π_k e^{-|z_k|^{2m}} dV`, the decoupled version.
    GeneralizedFockProduct { m: f64 },
    /// Lebesgue measure on the unit ball.
    Ball,
    /// Lebesgue measure on the unit polydisc.
    Polydisc,
}

impl CatalogMeasure {
    pub fn name(&self) -> String {
        match self {
            CatalogMeasure::Fock => "fock".into(),
            CatalogMeasure::GeneralizedFock { m } => format!("generalized_fock(m={m})"),
            CatalogMeasure::GeneralizedFockProduct { m } => format!("generalized_fock_product(m={m})"),
            CatalogMeasure::Ball => "ball".into(),
            CatalogMeasure::Polydisc => "polydisc".into(),
        }
    }

    fn check_params(&self) -> Result<(), MomentError> {
        match *self {
            CatalogMeasure::GeneralizedFock { m } | CatalogMeasure::GeneralizedFockProduct { m }
                if !(m > 0.0 && m.is_finite()) =>
            {
                Err(MomentError::InvalidSpec(format!("generalized_fock exponent m must be positive, got {m}")))
            }
            _ => Ok(()),
        }
    }

    fn is_radial(&self) -> bool {
        matches!(self, CatalogMeasure::Fock | CatalogMeasure::GeneralizedFock { .. } | CatalogMeasure::Ball)
    }

    /// The radial profile `w(r)` and support, for quadrature checks.
    pub fn weight(&self) -> RadialWeight {
        match *self {
            CatalogMeasure::Fock => RadialWeight::from_fn("exp(-r^2)", |r| (-r * r).exp(), Support::Unbounded),
            CatalogMeasure::GeneralizedFock { m } | CatalogMeasure::GeneralizedFockProduct { m } => {
                RadialWeight::from_fn(
                    &format!("exp(-r^(2*{m}))"),
                    move |r| (-r.powf(2.0 * m)).exp(),
                    Support::Unbounded,
                )
            }
            CatalogMeasure::Ball | CatalogMeasure::Polydisc => {
                RadialWeight::from_fn("1", |_| 1.0, Support::Bounded(1.0))
            }
        }
    }

    /// Reduced radial moments `m_d (n-1)!/(n+d-1)!` in closed form.
    fn reduced_radial(&self, n: usize, d: usize) -> f64 {
        let pi_n = PI.powi(n as i32);
        match *self {
            CatalogMeasure::Fock => pi_n,
            CatalogMeasure::GeneralizedFock { m } => {
                let k = (d + n) as f64;
                (n as f64 * PI.ln() - m.ln() + ln_gamma(k / m) - ln_gamma(k)).exp()
            }
            CatalogMeasure::Ball => {
                let f = factorial((n + d) as u64);
                if f.is_finite() {
                    pi_n / f
                } else {
                    (n as f64 * PI.ln() - ln_factorial((n + d) as u64)).exp()
                }
            }
            _ => unreachable!("not a radial catalog measure"),
        }
    }

    /// Radial moments `m_d` in closed form. Formed directly rather than from
    /// the reduced values, which underflow for large `d`.
    fn radial_moment(&self, n: usize, d: usize) -> f64 {
        let pi_n = PI.powi(n as i32);
        match *self {
            CatalogMeasure::Fock => self.reduced_radial(n, d) / radial_reduction(n, d),
            CatalogMeasure::GeneralizedFock { m } => {
                let k = (d + n) as f64;
                (n as f64 * PI.ln() - m.ln() + ln_gamma(k / m) - ln_factorial(n as u64 - 1)).exp()
            }
            CatalogMeasure::Ball => pi_n / ((n + d) as f64 * factorial(n as u64 - 1)),
            _ => unreachable!("not a radial catalog measure"),
        }
    }

    /// One-dimensional moments `∫_ℂ |z|^{2j} dμ_k` of each factor.
    fn factor_moment(&self, j: usize) -> f64 {
        match *self {
            CatalogMeasure::Fock => PI * factorial(j as u64),
            CatalogMeasure::GeneralizedFock { m } | CatalogMeasure::GeneralizedFockProduct { m } => {
                (PI.ln() - m.ln() + ln_gamma((j as f64 + 1.0) / m)).exp()
            }
            CatalogMeasure::Ball | CatalogMeasure::Polydisc => PI / (j as f64 + 1.0),
        }
    }

    /// Provider serving every `m_α` with `|α| ≤ max_degree`.
    ///
    /// Non-Gaussian closed forms are compared against quadrature for the
    /// first few degrees, and every sequence must be log-convex.
    pub fn provider(&self, n: usize, max_degree: usize) -> Result<MomentProvider, MomentError> {
        self.check_params()?;
        if n == 0 {
            return Err(crate::multiindex::MultiIndexError::InvalidDimension(0).into());
        }
        let kind = ProviderKind::Catalog(*self);
        if self.is_radial() {
            let reduced: Vec<f64> = (0..=max_degree).map(|d| self.reduced_radial(n, d)).collect();
            let radial: Vec<f64> = (0..=max_degree).map(|d| self.radial_moment(n, d)).collect();
            self.check_closed_form(n, &radial)?;
            let violations = validate_log_convexity(&radial, max_degree, LOG_CONVEXITY_TOL);
            if !violations.is_empty() {
                return Err(MomentError::LogConvexity(violations));
            }
            let mut p = MomentProvider::radial_unchecked(n, kind, radial, reduced);
            if *self == CatalogMeasure::Fock {
                let f: Vec<f64> = (0..=max_degree).map(|j| self.factor_moment(j)).collect();
                p = p.with_factor_form(vec![f; n]);
            }
            Ok(p)
        } else {
            let f: Vec<f64> = (0..=max_degree).map(|j| self.factor_moment(j)).collect();
            self.check_closed_form(1, &f)?;
            let violations = validate_log_convexity(&f, max_degree, LOG_CONVEXITY_TOL);
            if !violations.is_empty() {
                return Err(MomentError::LogConvexity(violations));
            }
            Ok(MomentProvider::product_unchecked(kind, vec![f; n]))
        }
    }

    /// Provider evaluating the per-index closed form of [`direct_multimoment`],
    /// independent of the radial and product reductions.
    pub fn direct_provider(&self, n: usize) -> Result<MomentProvider, MomentError> {
        self.check_params()?;
        if n == 0 {
            return Err(crate::multiindex::MultiIndexError::InvalidDimension(0).into());
        }
        Ok(MomentProvider::direct(n, *self))
    }

    fn check_closed_form(&self, n: usize, seq: &[f64]) -> Result<(), MomentError> {
        if *self == CatalogMeasure::Fock {
            return Ok(());
        }
        let weight = self.weight();
        let settings = QuadratureSettings::default();
        let top = seq.len().min(QUADRATURE_CHECK_DEGREE + 1);
        let reference = if n == 1 {
            (0..top).map(|j| quadrature_radial_moment(&weight, j, &settings)).collect::<Result<Vec<_>, _>>()?
        } else {
            quadrature_radial_sequence(&weight, n, top - 1, &settings)?
        };
        for (d, (&a, &b)) in seq.iter().zip(reference.iter()).enumerate() {
            let deviation = (a - b).abs() / b.abs();
            if deviation > QUADRATURE_CHECK_TOL {
                return Err(MomentError::ClosedFormMismatch { degree: d, deviation });
            }
        }
        Ok(())
    }
}

/// Per-index closed form of `m_α` for a catalog measure in dimension `α.dim()`.
pub fn direct_multimoment(measure: CatalogMeasure, alpha: &MultiIndex) -> f64 {
    let n = alpha.dim();
    let total = alpha.degree() as u64;
    let pi_n = PI.powi(n as i32);
    match measure {
        CatalogMeasure::Fock => alpha.entries().iter().map(|&a| PI * factorial(a as u64)).product(),
        CatalogMeasure::GeneralizedFock { m } => {
            let k = (total + n as u64) as f64;
            (n as f64 * PI.ln() - m.ln() + ln_multi_factorial(alpha) + ln_gamma(k / m) - ln_gamma(k)).exp()
        }
        CatalogMeasure::GeneralizedFockProduct { m } => {
            alpha.entries().iter().map(|&a| (PI.ln() - m.ln() + ln_gamma((a as f64 + 1.0) / m)).exp()).product()
        }
        CatalogMeasure::Ball => match multi_factorial(alpha) {
            Some(f) if factorial(total + n as u64).is_finite() => pi_n * f / factorial(total + n as u64),
            _ => (n as f64 * PI.ln() + ln_multi_factorial(alpha) - ln_factorial(total + n as u64)).exp(),
        },
        CatalogMeasure::Polydisc => alpha.entries().iter().map(|&a| PI / (a as f64 + 1.0)).product(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate_nonnegative;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_forms_agree_with_direct_formulas() {
        let measures = [
            CatalogMeasure::Fock,
            CatalogMeasure::GeneralizedFock { m: 2.0 },
            CatalogMeasure::GeneralizedFockProduct { m: 1.5 },
            CatalogMeasure::Ball,
            CatalogMeasure::Polydisc,
        ];
        for measure in measures {
            for n in 1..=3 {
                let p = measure.provider(n, 10).unwrap();
                for d in 0..=10 {
                    for a in enumerate_nonnegative(n, d).unwrap() {
                        let v = p.moment(&a).unwrap();
                        let w = direct_multimoment(measure, &a);
                        assert!(rel(v, w) < 1e-12, "{} n={n} α={a}: {v} vs {w}", measure.name());
                    }
                }
            }
        }
    }

    #[test]
    fn ball_radial_sequence() {
        let p = CatalogMeasure::Ball.provider(2, 5).unwrap();
        let r = p.radial_sequence().unwrap();
        for (d, &m) in r.iter().enumerate() {
            assert!(rel(m, PI * PI / (2.0 + d as f64)) < 1e-15);
        }
    }

    #[test]
    fn generalized_fock_reduces_to_gaussian() {
        let a = CatalogMeasure::GeneralizedFock { m: 1.0 }.provider(2, 12).unwrap();
        let b = CatalogMeasure::Fock.provider(2, 12).unwrap();
        for a_idx in enumerate_nonnegative(2, 12).unwrap() {
            assert!(rel(a.moment(&a_idx).unwrap(), b.moment(&a_idx).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn gaussian_exposes_both_forms() {
        let p = CatalogMeasure::Fock.provider(2, 4).unwrap();
        assert!(p.radial_sequence().is_some());
        assert_eq!(p.factor_sequences().unwrap().len(), 2);
        let q = CatalogMeasure::Polydisc.provider(2, 4).unwrap();
        assert!(q.radial_sequence().is_none());
    }

    #[test]
    fn invalid_exponent() {
        assert!(CatalogMeasure::GeneralizedFock { m: 0.0 }.provider(1, 3).is_err());
        assert!(CatalogMeasure::GeneralizedFock { m: -1.0 }.direct_provider(1).is_err());
    }

    #[test]
    fn high_degrees_stay_accurate() {
        // Reduced values underflow past degree ~170; moments must not.
        for n in 1..=2 {
            let p = CatalogMeasure::Ball.provider(n, 260).unwrap();
            let direct = CatalogMeasure::Ball.direct_provider(n).unwrap();
            for d in [150, 200, 250] {
                let alpha = MultiIndex::new((0..n).map(|k| if k == 0 { d } else { 1 }).collect());
                let (a, b) = (p.moment(&alpha).unwrap(), direct.moment(&alpha).unwrap());
                assert!((a - b).abs() <= 1e-12 * b, "n={n} d={d}: {a} vs {b}");
            }
        }
    }
}
