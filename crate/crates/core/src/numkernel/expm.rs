use num_complex::Complex64 as C64;

use super::eig::eig_hermitian_with_tol;
use super::matrix::ComplexMatrix;
use crate::error::Result;
use crate::tol::TOL_HERM;

/// `exp(−iθh)` for Hermitian `h`, via `h = VΛV†`.
pub fn matrix_exp_skew(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    matrix_exp_skew_with_tol(h, theta, TOL_HERM)
}

pub fn matrix_exp_skew_with_tol(h: &ComplexMatrix, theta: f64, tol_herm: f64) -> Result<ComplexMatrix> {
    let s = eig_hermitian_with_tol(h, tol_herm)?;
    let v = &s.eigenvectors;
    let phases: Vec<C64> = s.eigenvalues.iter().map(|l| C64::from_polar(1.0, -theta * l.re)).collect();
    Ok(v.matmul(&ComplexMatrix::diag(&phases)).matmul(&v.adjoint()))
}
