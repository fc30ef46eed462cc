//! Eigendecompositions of small dense complex matrices.
//!
//! Hermitian input goes through cyclic complex Jacobi rotations, which give
//! orthonormal eigenvectors to rounding. General input is reduced to
//! Hessenberg form with Householder reflections, then driven to complex
//! Schur form by single-shift QR with Wilkinson shifts; eigenvectors are
//! recovered by back-substitution on the triangular factor.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tol::{DEGENERACY_GAP, TOL_HERM};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenvalues and eigenvectors (as columns).
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
    pub is_hermitian_path: bool,
}

impl SpectrumResult {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `max_k ‖A v_k − λ_k v_k‖`.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = self.eigenvector(k);
                let av = a.mul_vec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.eigenvalues[k] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvalues as real numbers (Hermitian path).
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// Indices sorted by descending modulus; ties keep the larger real part
    /// first.
    pub fn order_by_modulus(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| {
            let (za, zb) = (self.eigenvalues[a], self.eigenvalues[b]);
            zb.norm()
                .partial_cmp(&za.norm())
                .unwrap()
                .then(zb.re.partial_cmp(&za.re).unwrap())
        });
        idx
    }
}

/// A cluster of numerically equal eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenGroup {
    pub value: C64,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

/// Groups eigenvalues closer than `gap`, preserving first-seen order. The
/// reported value is the mean of the members.
pub fn group_eigenvalues(values: &[C64], gap: f64) -> Vec<EigenGroup> {
    let mut groups: Vec<EigenGroup> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match groups.iter_mut().find(|g| (g.value - v).norm() < gap) {
            Some(g) => {
                g.members.push(k);
                g.multiplicity += 1;
                let n = g.multiplicity as f64;
                g.value = g.value * ((n - 1.0) / n) + v / n;
            }
            None => groups.push(EigenGroup { value: v, multiplicity: 1, members: vec![k] }),
        }
    }
    groups
}

pub fn group_default(values: &[C64]) -> Vec<EigenGroup> {
    group_eigenvalues(values, DEGENERACY_GAP)
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<SpectrumResult> {
    eig_hermitian_with_tol(m, TOL_HERM)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eig_hermitian_with_tol(m: &ComplexMatrix, tol_herm: f64) -> Result<SpectrumResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition of a non-square matrix".into()));
    }
    let dev = m.hermitian_deviation();
    if dev > tol_herm {
        return Err(Error::NotHermitian { deviation: dev, tol: tol_herm });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence(100));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<C64> = order.iter().map(|&i| C64::new(a[(i, i)].re, 0.0)).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpectrumResult { eigenvalues, eigenvectors, is_hermitian_path: true })
}

/// Zeroes `a[p][q]` with a unitary rotation acting on rows/columns `p, q`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let n = a.rows();
    // Phase that makes the (p, q) entry real, then a real Jacobi angle.
    let phase = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Rotation R with columns p, q:
    //   R_pp = c, R_pq = s, R_qp = -s·conj(phase), R_qq = c·conj(phase)
    let dq = phase.conj();
    let r_pp = C64::new(c, 0.0);
    let r_pq = C64::new(s, 0.0);
    let r_qp = dq * (-s);
    let r_qq = dq * c;

    // A ← A R
    for i in 0..n {
        let (x, y) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = x * r_pp + y * r_qp;
        a[(i, q)] = x * r_pq + y * r_qq;
    }
    // A ← R† A
    for j in 0..n {
        let (x, y) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = r_pp.conj() * x + r_qp.conj() * y;
        a[(q, j)] = r_pq.conj() * x + r_qq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for i in 0..n {
        let (x, y) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = x * r_pp + y * r_qp;
        v[(i, q)] = x * r_pq + y * r_qq;
    }
}

/// Complex Schur decomposition `A = Z T Z†`.
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// Maximum QR sweeps per eigenvalue before giving up.
const QR_SWEEPS_PER_EIGENVALUE: usize = 60;

pub fn schur(m: &ComplexMatrix) -> Result<Schur> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("Schur form of a non-square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = m.rows();
    let (mut h, mut z) = hessenberg(m);
    if n <= 1 {
        return Ok(Schur { t: h, z });
    }
    let max_iter = QR_SWEEPS_PER_EIGENVALUE * n;
    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // Locate the bottom of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let thresh = f64::EPSILON * if diag > 0.0 { diag } else { norm };
            if sub <= thresh {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence(max_iter));
        }
        let shift = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }
    // Clean strictly-lower part.
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, z })
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q†`.
fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut a = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        // A ← (I − 2vv†) A on rows k+1..n
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|r| v[r].conj() * a[(k + 1 + r, j)]).sum();
            for r in 0..v.len() {
                a[(k + 1 + r, j)] -= v[r] * dot * 2.0;
            }
        }
        // A ← A (I − 2vv†) on columns k+1..n
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|r| a[(i, k + 1 + r)] * v[r]).sum();
            for r in 0..v.len() {
                a[(i, k + 1 + r)] -= dot * v[r].conj() * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|r| q[(i, k + 1 + r)] * v[r]).sum();
            for r in 0..v.len() {
                q[(i, k + 1 + r)] -= dot * v[r].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    (a, q)
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with `G (x, y)ᵀ = (r, 0)ᵀ`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if x.norm() == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let c = x.norm() / r;
    let s = x * y.conj() / (x.norm() * r);
    (c, s)
}

/// One explicit-shift QR step on the active window `[lo, hi]`, keeping the
/// full matrix in Schur-compatible form.
fn qr_sweep(h: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let (a, b) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        let top = (k + 2).min(hi + 1);
        for i in 0..top {
            let (a, b) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
        for i in 0..n {
            let (a, b) = (z[(i, k)], z[(i, k + 1)]);
            z[(i, k)] = a * c + b * s.conj();
            z[(i, k + 1)] = -a * s + b * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Full complex spectrum with unit-norm eigenvectors.
pub fn eig_general(m: &ComplexMatrix) -> Result<SpectrumResult> {
    let Schur { t, z } = schur(m)?;
    let n = t.rows();
    let norm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * norm;
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = eigenvalues[k];
        let mut y = vec![ZERO; n];
        y[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[j] = -s / denom;
        }
        let v = z.mul_vec(&y);
        let vn = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        for (i, vi) in v.into_iter().enumerate() {
            vecs[(i, k)] = vi / vn;
        }
    }
    Ok(SpectrumResult { eigenvalues, eigenvectors: vecs, is_hermitian_path: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ops::{pauli_z, random_hermitian, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn det(m: &ComplexMatrix) -> C64 {
        // Gaussian elimination with partial pivoting; independent of the
        // eigen routines above.
        let n = m.rows();
        let mut a = m.clone();
        let mut d = C64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).unwrap()).unwrap();
            if a[(p, k)].norm() == 0.0 {
                return ZERO;
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                d = -d;
            }
            d *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= f * u;
                }
            }
        }
        d
    }

    #[test]
    fn hermitian_diagonal() {
        let m = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let s = eig_hermitian(&m).unwrap();
        assert_eq!(s.real_eigenvalues(), vec![1.0, 2.0, 3.0]);
        let z = eig_hermitian(&pauli_z()).unwrap();
        assert_eq!(z.real_eigenvalues(), vec![-1.0, 1.0]);
    }

    #[test]
    fn hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 6);
            let s = eig_hermitian(&h).unwrap();
            let v = &s.eigenvectors;
            let rec = v.matmul(&ComplexMatrix::diag(&s.eigenvalues)).matmul(&v.adjoint());
            assert!(rec.max_abs_diff(&h) < 1e-12);
            assert!(v.unitarity_deviation() < 1e-12);
            let sum: f64 = s.real_eigenvalues().iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-11);
        }
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn general_upper_triangular() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 5.0, -2.0], &[0.0, 3.0, 7.0], &[0.0, 0.0, -4.0]]);
        let s = eig_general(&m).unwrap();
        let mut ev: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev.len(), 3);
        for (a, b) in ev.iter().zip([-4.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.max_residual(&m) < 1e-9);
    }

    #[test]
    fn general_random_residual_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for n in [2usize, 4, 4, 4, 7, 16] {
            let m = random_matrix(&mut rng, n, n);
            let s = eig_general(&m).unwrap();
            assert!(s.max_residual(&m) < 1e-9, "residual {}", s.max_residual(&m));
            for &lambda in &s.eigenvalues {
                let shifted = &m - &ComplexMatrix::identity(n).scale(lambda);
                let bound = if n <= 4 { 1e-8 } else { 1e-10 * m.frobenius_norm().powi(n as i32) };
                assert!(det(&shifted).norm() < bound, "n={n} det {}", det(&shifted).norm());
            }
        }
    }

    #[test]
    fn general_degenerate_projector() {
        // Rank-3 projector on 9 dims: eigenvalue 1 (x3), 0 (x6).
        let mut m = ComplexMatrix::zeros(9, 9);
        for j in 0..3 {
            m[(4 * j, 4 * j)] = C64::new(1.0, 0.0);
        }
        let s = eig_general(&m).unwrap();
        let groups = group_default(&s.eigenvalues);
        let unit = groups.iter().find(|g| (g.value - C64::new(1.0, 0.0)).norm() < 1e-8).unwrap();
        assert_eq!(unit.multiplicity, 3);
        assert!(s.max_residual(&m) < 1e-9);
    }

    #[test]
    fn grouping() {
        let v = [C64::new(1.0, 0.0), C64::new(-0.5, 0.0), C64::new(1.0 + 1e-12, 0.0)];
        let g = group_eigenvalues(&v, 1e-8);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].multiplicity, 2);
        assert_eq!(g[0].members, vec![0, 2]);
    }
}
