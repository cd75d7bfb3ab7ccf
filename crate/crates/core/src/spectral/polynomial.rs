//! Polynomials in `z` and `z̄` and their `L²(dμ)` inner products.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::moments::{MomentError, MomentProvider};
use crate::multiindex::MultiIndex;

const DROP_RELATIVE: f64 = 1e-15;

/// Finite sum `Σ a_{α,β} z^α z̄^β` with exact exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedPolynomial {
    terms: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl MixedPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coef · z^α z̄^β`
    pub fn term(alpha: MultiIndex, beta: MultiIndex, coef: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(alpha, beta, coef);
        p
    }

    /// The holomorphic monomial `z^α`.
    pub fn monomial(alpha: MultiIndex) -> Self {
        let n = alpha.dim();
        Self::term(alpha, MultiIndex::zeros(n), Complex64::new(1.0, 0.0))
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, coef: Complex64) {
        debug_assert!(alpha.is_nonnegative() && beta.is_nonnegative());
        *self.terms.entry((alpha, beta)).or_default() += coef;
        self.normalize();
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &Complex64)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        self.terms.get(&(alpha.clone(), beta.clone())).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            *out.terms.entry((a.clone(), b.clone())).or_default() += c;
        }
        out.normalize();
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = DROP_RELATIVE * max;
        self.terms.retain(|_, c| c.norm() > floor);
    }

    /// Formal Wirtinger derivative `∂P/∂z̄_j`.
    pub fn dbar_coefficient(&self, j: usize) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            let power = b.entries()[j];
            if power > 0 {
                *out.terms.entry((a.clone(), b.minus_unit(j))).or_default() += c * power as f64;
            }
        }
        out.normalize();
        out
    }
}

/// `⟨P, Q⟩ = ∫ P Q̄ dμ`. The product `z^a z̄^b · conj(z^c z̄^d)` integrates to
/// `m_{a+d}` when `a + d = b + c` and to 0 otherwise.
pub fn polynomial_inner_product(
    provider: &MomentProvider,
    p: &MixedPolynomial,
    q: &MixedPolynomial,
) -> Result<Complex64, MomentError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((a, b), cp) in &p.terms {
        for ((c, d), cq) in &q.terms {
            let holo: Vec<i32> = a.entries().iter().zip(d.entries()).map(|(x, y)| x + y).collect();
            let anti = b.entries().iter().zip(c.entries()).map(|(x, y)| x + y);
            if holo.iter().copied().eq(anti) {
                acc += cp * cq.conj() * provider.moment(&MultiIndex::new(holo))?;
            }
        }
    }
    Ok(acc)
}
