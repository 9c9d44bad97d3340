//! Linear algebra over a [`Field`](crate::field::Field): sparse matrices,
//! reduced row-echelon forms and subspaces.

pub mod dense_mod;
pub mod sparse;
mod subspace;

pub use sparse::{SparseMatrix, SparseRow};
pub use subspace::{quotient_dim, Subspace};
