//! Factorial-type prefactors in binary64.
//!
//! Small arguments use direct products, which keep ratios of neighbouring
//! values accurate to a few ulps. When a product would overflow the value is
//! formed from log-Gamma and exponentiated instead.

use statrs::function::gamma::ln_gamma;

use crate::multiindex::MultiIndex;

const MAX_DIRECT_FACTORIAL: u64 = 170;

pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `k!`, infinite beyond 170.
pub fn factorial(k: u64) -> f64 {
    if k > MAX_DIRECT_FACTORIAL {
        return f64::INFINITY;
    }
    (2..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `α! = Π α_k!` for a nonnegative multi-index, or `None` on overflow.
pub fn multi_factorial(alpha: &MultiIndex) -> Option<f64> {
    // Sorted so that permuted indices round identically.
    let mut e = alpha.entries().to_vec();
    e.sort_unstable();
    let v = e.iter().fold(1.0, |acc, &a| acc * factorial(a.max(0) as u64));
    v.is_finite().then_some(v)
}

pub fn ln_multi_factorial(alpha: &MultiIndex) -> f64 {
    let mut e = alpha.entries().to_vec();
    e.sort_unstable();
    e.iter().map(|&a| ln_factorial(a.max(0) as u64)).sum()
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    if acc.is_finite() {
        acc
    } else {
        (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
    }
}

/// `(n + |γ| - 1)! / ((n-1)! γ!)`, the number of ways to distribute `|γ|`
/// among `n` slots with the multiplicities of `γ`.
pub fn multinomial_prefactor(gamma: &MultiIndex) -> f64 {
    let n = gamma.dim() as u64;
    // Product of binomials C(n-1 + partial_k, partial_k) / ... built slot by slot.
    let mut acc = 1.0f64;
    let mut partial: u64 = n - 1;
    for &g in gamma.entries() {
        let g = g.max(0) as u64;
        partial += g;
        acc *= binomial(partial, g);
    }
    if acc.is_finite() {
        acc
    } else {
        let d = gamma.degree().max(0) as u64;
        (ln_factorial(n - 1 + d) - ln_factorial(n - 1) - ln_multi_factorial(gamma)).exp()
    }
}

/// `(n-1)! / (n+d-1)!`, the factor turning a radial moment `m_d` into the
/// reduced value `m_α / α!` shared by every `|α| = d`.
pub fn radial_reduction(n: usize, d: usize) -> f64 {
    let mut acc = 1.0f64;
    for k in n..(n + d) {
        acc /= k as f64;
    }
    if acc > 0.0 {
        acc
    } else {
        (ln_factorial(n as u64 - 1) - ln_factorial((n + d) as u64 - 1)).exp()
    }
}
