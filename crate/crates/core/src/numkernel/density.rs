use std::ops::Deref;

use super::eig::eig_hermitian_with_tol;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensity(format!("shape {:?} is not square", m.shape())));
        }
        if !m.is_finite() {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let dev = m.hermitian_deviation();
        if dev > tol.herm {
            return Err(Error::NotHermitian { deviation: dev, tol: tol.herm });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::BadTrace { trace: tr.re, tol: tol.trace });
        }
        let min = eig_hermitian_with_tol(&m, tol.herm)?
            .eigenvalues
            .first()
            .map_or(0.0, |z| z.re);
        if min < -tol.psd {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps without validation; for states produced by trusted maps.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    /// `(weight, eigenvector)` pairs with weight above `cutoff`, in
    /// descending weight. Each eigenvector's largest-magnitude component is
    /// made real and positive.
    pub fn spectral_terms(&self, cutoff: f64) -> Vec<(f64, Vec<num_complex::Complex64>)> {
        let spec = match eig_hermitian_with_tol(&self.0, f64::INFINITY) {
            Ok(s) => s,
            Err(_) => return Vec::new(),
        };
        let mut out: Vec<(f64, Vec<num_complex::Complex64>)> = spec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| l.re > cutoff)
            .map(|(k, l)| (l.re, fix_phase(spec.eigenvector(k))))
            .collect();
        out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        out
    }
}

fn fix_phase(mut v: Vec<num_complex::Complex64>) -> Vec<num_complex::Complex64> {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        // Earliest component wins ties so the choice is deterministic.
        if z.norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let p = v[best];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    v
}

impl Deref for DensityMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// `−Σ λ log₂ λ`, with eigenvalues below 1e-14 dropped.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let spec = match eig_hermitian_with_tol(rho.matrix(), f64::INFINITY) {
        Ok(s) => s,
        Err(_) => return f64::NAN,
    };
    entropy_of_spectrum(&spec.real_eigenvalues())
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values.iter().filter(|&&l| l > 1e-14).map(|&l| -l * l.log2()).sum();
    s.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ops::{basis_vector, random_density};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_state_has_zero_entropy() {
        let rho = DensityMatrix::pure(&basis_vector(3, 1)).unwrap();
        assert!(rho.entropy().abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_entropy() {
        for d in [2usize, 3, 5] {
            let s = DensityMatrix::maximally_mixed(d).entropy();
            assert!((s - (d as f64).log2()).abs() < 1e-13);
        }
    }

    #[test]
    fn three_quarter_one_quarter() {
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25])).unwrap();
        let want = 2.0 - 0.75 * 3f64.log2();
        assert!((rho.entropy() - want).abs() < 1e-14);
        assert!((want - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag_real(&[0.7, 0.7])),
            Err(Error::BadTrace { .. })
        ));
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.2, -0.2])).is_err());
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(DensityMatrix::new(random_density(&mut rng, 4)).is_ok());
    }
}
