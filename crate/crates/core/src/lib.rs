//! Quantum collision models with matrix-product environments.

pub mod env;
pub mod error;
pub mod kernel;
pub mod mpdo;
pub mod mps;
pub mod numkernel;
pub mod scenario;
pub mod tol;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use numkernel::{ComplexMatrix, DensityMatrix, SpectrumResult, Superoperator};
