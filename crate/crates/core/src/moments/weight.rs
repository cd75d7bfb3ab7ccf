//! One-dimensional radial weights `w(r)` and their moment integrals.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use evalexpr::{Context, EvalexprError, EvalexprResult, Node, Value};

use super::quadrature::{integrate, integrate_to_infinity, QuadratureError, QuadratureSettings};
use super::MomentError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `[0, R]`
    Bounded(f64),
    /// `[0, ∞)`
    Unbounded,
}

#[derive(Clone)]
enum Profile {
    Expr {
        source: String,
        node: Arc<Node>,
    },
    /// Linear interpolation between `(r, w)` nodes, zero outside them.
    Piecewise(Vec<(f64, f64)>),
    Function {
        label: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// A radial weight on `ℂ` or `ℂⁿ`: the measure is `w(|z|) dV` restricted to
/// the support.
#[derive(Clone)]
pub struct RadialWeight {
    profile: Profile,
    support: Support,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight").field("profile", &self.describe()).field("support", &self.support).finish()
    }
}

struct RadiusContext {
    r: Value,
    pi: Value,
}

impl Context for RadiusContext {
    fn get_value(&self, identifier: &str) -> Option<&Value> {
        match identifier {
            "r" => Some(&self.r),
            "pi" => Some(&self.pi),
            _ => None,
        }
    }

    fn call_function(&self, identifier: &str, argument: &Value) -> EvalexprResult<Value> {
        let unary = |g: fn(f64) -> f64| -> EvalexprResult<Value> { Ok(Value::Float(g(argument.as_number()?))) };
        match identifier {
            "exp" => unary(f64::exp),
            "ln" | "log" => unary(f64::ln),
            "sqrt" => unary(f64::sqrt),
            "abs" => unary(f64::abs),
            "sin" => unary(f64::sin),
            "cos" => unary(f64::cos),
            "tanh" => unary(f64::tanh),
            "cosh" => unary(f64::cosh),
            "pow" => {
                let args = argument.as_fixed_len_tuple(2)?;
                Ok(Value::Float(args[0].as_number()?.powf(args[1].as_number()?)))
            }
            _ => Err(EvalexprError::FunctionIdentifierNotFound(identifier.to_string())),
        }
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, _disabled: bool) -> EvalexprResult<()> {
        Ok(())
    }
}

impl RadialWeight {
    /// Parses an expression in the variable `r`, e.g. `exp(-r^4)`.
    ///
    /// Note that `^` associates to the left in the expression grammar.
    pub fn from_expr(expr: &str, support: Support) -> Result<Self, MomentError> {
        let node = evalexpr::build_operator_tree(expr)
            .map_err(|e| MomentError::InvalidSpec(format!("weight expression {expr:?}: {e}")))?;
        let w = RadialWeight { profile: Profile::Expr { source: expr.to_string(), node: Arc::new(node) }, support };
        w.check_support()?;
        // Surface unknown identifiers and type errors at parse time.
        w.try_eval(0.5).map_err(|e| MomentError::InvalidSpec(format!("weight expression {expr:?}: {e}")))?;
        Ok(w)
    }

    pub fn piecewise(nodes: Vec<(f64, f64)>) -> Result<Self, MomentError> {
        if nodes.len() < 2 {
            return Err(MomentError::InvalidSpec("piecewise weight needs at least two nodes".into()));
        }
        if nodes.iter().any(|&(r, w)| !r.is_finite() || !w.is_finite() || r < 0.0 || w < 0.0) {
            return Err(MomentError::InvalidSpec(
                "piecewise weight nodes must be finite with r >= 0 and w >= 0".into(),
            ));
        }
        if nodes.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(MomentError::InvalidSpec("piecewise weight radii must increase strictly".into()));
        }
        let last = nodes.last().map(|&(r, _)| r).unwrap_or(0.0);
        Ok(RadialWeight { profile: Profile::Piecewise(nodes), support: Support::Bounded(last) })
    }

    pub fn from_fn<F>(label: &str, f: F, support: Support) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialWeight { profile: Profile::Function { label: label.to_string(), f: Arc::new(f) }, support }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn describe(&self) -> String {
        match &self.profile {
            Profile::Expr { source, .. } => source.clone(),
            Profile::Piecewise(nodes) => format!("piecewise-linear ({} nodes)", nodes.len()),
            Profile::Function { label, .. } => label.clone(),
        }
    }

    fn check_support(&self) -> Result<(), MomentError> {
        if let Support::Bounded(r) = self.support {
            if !(r.is_finite() && r > 0.0) {
                return Err(MomentError::InvalidSpec(format!("support radius must be positive, got {r}")));
            }
        }
        Ok(())
    }

    fn try_eval(&self, r: f64) -> Result<f64, String> {
        match &self.profile {
            Profile::Expr { node, .. } => {
                let ctx = RadiusContext { r: Value::Float(r), pi: Value::Float(PI) };
                node.eval_with_context(&ctx).and_then(|v| v.as_number()).map_err(|e| e.to_string())
            }
            Profile::Piecewise(nodes) => Ok(interpolate(nodes, r)),
            Profile::Function { f, .. } => Ok(f(r)),
        }
    }

    /// `w(r)`; evaluation failures read as NaN and are caught by the integrator.
    pub fn eval(&self, r: f64) -> f64 {
        self.try_eval(r).unwrap_or(f64::NAN)
    }

    /// `∫ r^k w(r) dr` over the support.
    pub fn radial_integral(&self, k: u32, settings: &QuadratureSettings) -> Result<f64, QuadratureError> {
        let integrand = |r: f64| {
            let w = self.eval(r);
            if w == 0.0 {
                return 0.0;
            }
            let p = r.powi(k as i32);
            if p.is_finite() {
                p * w
            } else {
                (k as f64 * r.ln() + w.ln()).exp()
            }
        };
        match (&self.profile, self.support) {
            (Profile::Piecewise(nodes), _) => {
                let mut total = 0.0;
                for seg in nodes.windows(2) {
                    total += integrate(integrand, seg[0].0, seg[1].0, settings)?.value;
                }
                Ok(total)
            }
            (_, Support::Bounded(r)) => Ok(integrate(integrand, 0.0, r, settings)?.value),
            (_, Support::Unbounded) => Ok(integrate_to_infinity(integrand, 0.0, settings)?.value),
        }
    }
}

fn interpolate(nodes: &[(f64, f64)], r: f64) -> f64 {
    let first = nodes[0];
    let last = nodes[nodes.len() - 1];
    if r < first.0 || r > last.0 {
        return 0.0;
    }
    let i = nodes.partition_point(|&(x, _)| x <= r).clamp(1, nodes.len() - 1);
    let (x0, y0) = nodes[i - 1];
    let (x1, y1) = nodes[i];
    y0 + (y1 - y0) * (r - x0) / (x1 - x0)
}

/// `2π ∫ r^{2j+1} w(r) dr`, the moment `∫_ℂ |z|^{2j} w(|z|) dA`.
pub fn quadrature_radial_moment(
    weight: &RadialWeight,
    j: usize,
    settings: &QuadratureSettings,
) -> Result<f64, MomentError> {
    let value =
        weight.radial_integral(2 * j as u32 + 1, settings).map_err(|source| MomentError::Quadrature { j, source })?;
    let m = 2.0 * PI * value;
    if !(m > 0.0) || !m.is_finite() {
        return Err(MomentError::NonpositiveQuadrature { j, value: m });
    }
    Ok(m)
}

/// `∫_{ℂⁿ} |z|^{2d} w(|z|) dV = π^{n-1}/(n-1)! · 2π ∫ r^{2(d+n-1)+1} w(r) dr`.
pub fn quadrature_radial_sequence(
    weight: &RadialWeight,
    n: usize,
    max_degree: usize,
    settings: &QuadratureSettings,
) -> Result<Vec<f64>, MomentError> {
    let sphere = PI.powi(n as i32 - 1) / super::combinatorics::factorial(n as u64 - 1);
    (0..=max_degree).map(|d| Ok(sphere * quadrature_radial_moment(weight, d + n - 1, settings)?)).collect()
}

/// Multimoment `∫_{ℂⁿ} |z^α|² w(|z|) dV` computed in hyperspherical
/// coordinates on the radii: one radial quadrature times `n-1` angular
/// quadratures of `cos^a θ sin^b θ` over `[0, π/2]`. No factorial identities
/// are used, so the result is an independent check of the closed-form
/// conversion from radial moments.
pub fn quadrature_multimoment(
    weight: &RadialWeight,
    alpha: &[u32],
    settings: &QuadratureSettings,
) -> Result<f64, MomentError> {
    let n = alpha.len();
    let total: usize = alpha.iter().map(|&a| a as usize).sum();
    // (2π)^n ∫ ρ^{2|α|+2n-1} w dρ · Π angular = (2π)^{n-1} · Q(|α|+n-1) · Π angular
    let radial = quadrature_radial_moment(weight, total + n - 1, settings)?;
    let mut angular = 1.0;
    for i in 0..n.saturating_sub(1) {
        let cos_pow = 2 * alpha[i] + 1;
        let tail: u32 = alpha[i + 1..].iter().map(|&a| 2 * a + 1).sum();
        let jacobian = (n - 2).saturating_sub(i) as u32;
        let sin_pow = tail + jacobian;
        let v = integrate(
            |t: f64| t.cos().powi(cos_pow as i32) * t.sin().powi(sin_pow as i32),
            0.0,
            PI / 2.0,
            &QuadratureSettings { rel_tol: 1e-13, ..*settings },
        )
        .map_err(|source| MomentError::Quadrature { j: total, source })?;
        angular *= v.value;
    }
    Ok((2.0 * PI).powi(n as i32 - 1) * radial * angular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::combinatorics::factorial;
    use statrs::function::gamma::gamma;

    fn tight() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn gaussian_first_moment() {
        let w = RadialWeight::from_expr("exp(-r^2)", Support::Unbounded).unwrap();
        let m = quadrature_radial_moment(&w, 1, &tight()).unwrap();
        assert!((m / PI - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disc_area() {
        let w = RadialWeight::from_expr("1", Support::Bounded(1.0)).unwrap();
        let m = quadrature_radial_moment(&w, 0, &tight()).unwrap();
        assert!((m / PI - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quartic_exponential_against_gamma_and_midpoint() {
        let w = RadialWeight::from_expr("exp(-r^4)", Support::Unbounded).unwrap();
        let m = quadrature_radial_moment(&w, 0, &tight()).unwrap();
        // u = r^4: 2π ∫ r e^{-r^4} dr = (π/2) Γ(1/2)
        let closed = PI / 2.0 * gamma(0.5);
        assert!((m / closed - 1.0).abs() < 1e-8);
        // Midpoint brute force on [0, 6].
        let steps = 600_000;
        let h = 6.0 / steps as f64;
        let brute: f64 = (0..steps)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                r * (-r.powi(4)).exp()
            })
            .sum::<f64>()
            * h
            * 2.0
            * PI;
        assert!((m / brute - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let w = RadialWeight::from_expr("-r^2", Support::Bounded(1.0)).unwrap();
        assert_eq!(w.eval(2.0), -4.0);
    }

    #[test]
    fn bad_expressions_are_rejected() {
        assert!(RadialWeight::from_expr("exp(", Support::Unbounded).is_err());
        assert!(RadialWeight::from_expr("foo(r)", Support::Unbounded).is_err());
        assert!(RadialWeight::from_expr("1", Support::Bounded(-1.0)).is_err());
    }

    #[test]
    fn piecewise_indicator_matches_disc() {
        let w = RadialWeight::piecewise(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        for j in 0..5 {
            let m = quadrature_radial_moment(&w, j, &tight()).unwrap();
            assert!((m / (PI / (j as f64 + 1.0)) - 1.0).abs() < 1e-12);
        }
        assert!(RadialWeight::piecewise(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn divergent_weight_is_an_error() {
        let w = RadialWeight::from_expr("1", Support::Unbounded).unwrap();
        let s = QuadratureSettings { max_evals: 50_000, ..Default::default() };
        assert!(quadrature_radial_moment(&w, 0, &s).is_err());
    }

    #[test]
    fn hyperspherical_multimoment_matches_gaussian_product() {
        let w = RadialWeight::from_expr("exp(-r^2)", Support::Unbounded).unwrap();
        for alpha in [[0u32, 0, 0], [1, 2, 0], [3, 0, 4]] {
            let m = quadrature_multimoment(&w, &alpha, &tight()).unwrap();
            let exact: f64 = alpha.iter().map(|&a| PI * factorial(a as u64)).product();
            assert!((m / exact - 1.0).abs() < 1e-9, "{alpha:?}");
        }
    }
}
