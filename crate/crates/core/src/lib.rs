//! Spectral analysis of the canonical solution operator to `∂̄` on
//! `(0,1)`-forms with holomorphic coefficients, for measures whose monomials
//! are orthogonal.
//!
//! The operator splits into finite blocks indexed by multi-indices with at
//! most one `-1` entry; each block is a small symmetric matrix built from the
//! multimoments of the measure. The crate assembles these blocks, checks them
//! against a first-principles polynomial oracle, and turns the eigenvalues
//! into truncation-aware verdicts on boundedness, compactness, and Schatten
//! class membership.

// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod moments;
pub mod multiindex;
pub mod report;
pub mod spectral;
pub mod verify;
