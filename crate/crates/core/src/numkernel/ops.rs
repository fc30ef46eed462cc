//! Standard operators and random test ensembles.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
        .expect("static shape")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// `(σ_x, σ_y, σ_z)`.
pub fn paulis() -> [ComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Spin-1 generators `(J_x, J_y, J_z)` in the basis `(|1⟩, |2⟩, |3⟩)` with
/// `J_z = diag(1, 0, −1)`.
pub fn spin1() -> [ComplexMatrix; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let jx = ComplexMatrix::from_real_rows(&[&[0.0, h, 0.0], &[h, 0.0, h], &[0.0, h, 0.0]]);
    let jy = ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.0, -h), c(0.0, 0.0)],
        vec![c(0.0, h), c(0.0, 0.0), c(0.0, -h)],
        vec![c(0.0, 0.0), c(0.0, h), c(0.0, 0.0)],
    ])
    .expect("static shape");
    let jz = ComplexMatrix::diag_real(&[1.0, 0.0, -1.0]);
    [jx, jy, jz]
}

/// Qubit density matrix `(I + r·σ)/2`.
pub fn bloch_state(r: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = r;
    ComplexMatrix::from_rows(&[
        vec![c(0.5 * (1.0 + z), 0.0), c(0.5 * x, -0.5 * y)],
        vec![c(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z), 0.0)],
    ])
    .expect("static shape")
}

/// `(tr ρσ_x, tr ρσ_y, tr ρσ_z)` of a 2×2 matrix.
pub fn bloch_vector(rho: &ComplexMatrix) -> [f64; 3] {
    assert_eq!(rho.shape(), (2, 2), "Bloch vector of a non-qubit operator");
    let x = rho[(0, 1)] + rho[(1, 0)];
    let y = c(0.0, 1.0) * (rho[(0, 1)] - rho[(1, 0)]);
    let z = rho[(0, 0)] - rho[(1, 1)];
    [x.re, y.re, z.re]
}

/// Computational basis vector.
pub fn basis_vector(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[i] = c(1.0, 0.0);
    v
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(standard_normal(rng), standard_normal(rng)))
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Normalized random state vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| c(standard_normal(rng), standard_normal(rng))).collect();
    let norm = vector_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = vector_norm(&v);
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random full-rank density matrix `GG†/tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let p = g.matmul(&g.adjoint());
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin1_algebra() {
        let [jx, jy, jz] = spin1();
        // [J_x, J_y] = i J_z
        let comm = jx.commutator(&jy);
        assert!(comm.max_abs_diff(&jz.scale(c(0.0, 1.0))) < 1e-15);
        let casimir = &(&jx.matmul(&jx) + &jy.matmul(&jy)) + &jz.matmul(&jz);
        assert!(casimir.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.1, -0.4, 0.7];
        let b = bloch_vector(&bloch_state(r));
        for k in 0..3 {
            assert!((b[k] - r[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 6);
        assert!(u.unitarity_deviation() < 1e-13);
    }
}
