//! Dense complex linear algebra for small dimensions.

pub mod density;
pub mod eig;
pub mod expm;
pub mod linsolve;
pub mod matrix;
pub mod ops;
pub mod superop;

pub use density::{entropy_of_spectrum, von_neumann_entropy, DensityMatrix};
pub use eig::{eig_general, eig_hermitian, group_eigenvalues, EigenGroup, SpectrumResult};
pub use expm::matrix_exp_skew;
pub use linsolve::{inverse, solve, Lu};
pub use matrix::{kron, partial_trace, ComplexMatrix};
pub use superop::{devectorize, superop_from_kraus, vectorize, Superoperator};
