//! Block diagonalization of the canonical solution operator on holomorphic
//! `(0,1)`-forms.
//!
//! The basis forms `z^α dz̄_j` split into finite invariant blocks indexed by
//! `γ = α − e_j`. Each block carries a small symmetric matrix `C_γ` whose
//! eigenvalues are the squared singular values of the operator. The
//! [`polynomial`] submodule recomputes the same matrices from explicit
//! solutions, which serves as the independent oracle.

mod blocks;
pub mod eigen;
pub mod polynomial;

use thiserror::Error;

use crate::moments::MomentError;
use crate::multiindex::{MultiIndex, MultiIndexError};

pub use blocks::{
    assemble_blocks, block_entries, block_matrix, canonical_solution_monomial, gram_entry, oracle_block_entries,
    SpectralBlock,
};
pub use eigen::{block_eigenvalues, jacobi_eigen, Eigensystem};
pub use polynomial::{polynomial_inner_product, MixedPolynomial};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("block ({gamma}): {source}")]
    Block { gamma: MultiIndex, source: Box<SpectralError> },
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Index(#[from] MultiIndexError),
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigensolverFailure { sweeps: usize },
    #[error("block matrix is not positive semidefinite: eigenvalue {value:e} below -{threshold:e}")]
    PsdViolation { value: f64, threshold: f64 },
}
