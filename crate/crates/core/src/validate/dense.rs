//! Brute-force dense simulation on the full `d_S · dⁿ` space, used as an
//! oracle for the tensor-network code paths. Small `n` only.

use num_complex::Complex64 as C64;

use crate::numkernel::ComplexMatrix;

/// Site tensors `B_b^i` for one ancilla, indexed `[i][b]`.
pub type SiteTensors = Vec<Vec<ComplexMatrix>>;

/// `U_k ρ U_k†` where `U` acts on tensor factors `a` and `b` of a product
/// space with local dimensions `dims`.
pub fn apply_two_site(rho: &ComplexMatrix, dims: &[usize], a: usize, b: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let strides: Vec<usize> = (0..dims.len()).map(|k| dims[k + 1..].iter().product()).collect();
    let (da, db) = (dims[a], dims[b]);
    // Left multiplication acts on the row index, then repeat on columns via
    // the adjoint.
    let left = |m: &ComplexMatrix, op: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(total, total);
        for row in 0..total {
            let (xa, xb) = ((row / strides[a]) % da, (row / strides[b]) % db);
            let base = row - xa * strides[a] - xb * strides[b];
            for ya in 0..da {
                for yb in 0..db {
                    let coef = op[(xa * db + xb, ya * db + yb)];
                    if coef == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = base + ya * strides[a] + yb * strides[b];
                    for col in 0..total {
                        out[(row, col)] += coef * m[(src, col)];
                    }
                }
            }
        }
        out
    };
    let half = left(rho, u);
    left(&half.adjoint(), u).adjoint()
}

/// Trace over every factor except `keep`.
pub fn reduce_to(rho: &ComplexMatrix, dims: &[usize], keep: usize) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let stride: usize = dims[keep + 1..].iter().product();
    let dk = dims[keep];
    let mut out = ComplexMatrix::zeros(dk, dk);
    for r in 0..total {
        let xr = (r / stride) % dk;
        let rest = r - xr * stride;
        for xc in 0..dk {
            out[(xr, xc)] += rho[(r, rest + xc * stride)];
        }
    }
    out
}

/// Full ancilla state `⟨i⃗|ϱ|i⃗'⟩ = tr Λ_{iₙiₙ'} ⋯ Λ_{i₁i₁'}[χ₀]` with
/// `Λ_{ii'}[F] = Σ_b (B_b^i)ᵀ F conj(B_b^{i'})`.
pub fn ancilla_state(chi0: &ComplexMatrix, sites: &[SiteTensors]) -> ComplexMatrix {
    let d = sites[0].len();
    let n = sites.len();
    let total = d.pow(n as u32);
    let digits = |mut x: usize| -> Vec<usize> {
        let mut v = vec![0; n];
        for k in (0..n).rev() {
            v[k] = x % d;
            x /= d;
        }
        v
    };
    ComplexMatrix::from_fn(total, total, |r, c| {
        let (ir, ic) = (digits(r), digits(c));
        let mut f = chi0.clone();
        for (k, site) in sites.iter().enumerate() {
            let mut next = ComplexMatrix::zeros(site[0][0].cols(), site[0][0].cols());
            for b in 0..site[ir[k]].len() {
                next += &site[ir[k]][b].transpose().matmul(&f).matmul(&site[ic[k]][b].conj());
            }
            f = next;
        }
        f.trace()
    })
}

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |r, c| {
        a[(r / b.rows(), c / b.cols())] * b[(r % b.rows(), c % b.cols())]
    })
}

/// System states `ϱ_S(kτ)`, `k = 0..=n`, for `ϱ_S ⊗ ϱ_anc` with `n`
/// ancillas of dimension `d` and the same collision unitary each time.
pub fn evolve_dense(u: &ComplexMatrix, rho_s: &ComplexMatrix, rho_anc: &ComplexMatrix, d: usize, n: usize) -> Vec<ComplexMatrix> {
    let ds = rho_s.rows();
    let mut dims = vec![ds];
    dims.extend(std::iter::repeat(d).take(n));
    let mut rho = kron(rho_s, rho_anc);
    let mut out = vec![reduce_to(&rho, &dims, 0)];
    for k in 1..=n {
        rho = apply_two_site(&rho, &dims, 0, k, u);
        out.push(reduce_to(&rho, &dims, 0));
    }
    out
}

/// Joint output of the standard collision model ordered
/// `(ancilla 1, …, ancilla n, system)`.
pub fn standard_output(u: &ComplexMatrix, rho_s: &ComplexMatrix, rhos: &[ComplexMatrix]) -> ComplexMatrix {
    let ds = rho_s.rows();
    let d = rhos[0].rows();
    let n = rhos.len();
    let mut dims = vec![ds];
    dims.extend(std::iter::repeat(d).take(n));
    let mut rho = rho_s.clone();
    for r in rhos {
        rho = kron(&rho, r);
    }
    for k in 1..=n {
        rho = apply_two_site(&rho, &dims, 0, k, u);
    }
    // Move the system factor to the end.
    let anc = d.pow(n as u32);
    let perm = |x: usize| -> usize {
        let (s, a) = (x / anc, x % anc);
        a * ds + s
    };
    let mut out = ComplexMatrix::zeros(ds * anc, ds * anc);
    for r in 0..ds * anc {
        for c in 0..ds * anc {
            out[(perm(r), perm(c))] = rho[(r, c)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ops::{random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_site_action_matches_embedding() {
        // U on factors (0, 1) of a 2 ⊗ 3 space is just U ρ U†.
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let u = random_unitary(&mut rng, 6);
        let rho = random_density(&mut rng, 6);
        let got = apply_two_site(&rho, &[2, 3], 0, 1, &u);
        let want = u.matmul(&rho).matmul(&u.adjoint());
        assert!(got.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn product_ancillas() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let r1 = random_density(&mut rng, 2);
        // Factorized chain: bond dimension one, B_b^i = √p_b δ_{ib}.
        let p = [0.3f64, 0.7];
        let sites: Vec<SiteTensors> = (0..2)
            .map(|_| {
                (0..2)
                    .map(|i| (0..2).map(|b| ComplexMatrix::identity(1).scale_real(if i == b { p[b].sqrt() } else { 0.0 })).collect())
                    .collect()
            })
            .collect();
        let anc = ancilla_state(&ComplexMatrix::identity(1), &sites);
        let want = kron(&ComplexMatrix::diag_real(&p), &ComplexMatrix::diag_real(&p));
        assert!(anc.max_abs_diff(&want) < 1e-15);
        let red = reduce_to(&kron(&r1, &want), &[2, 2, 2], 0);
        assert!(red.max_abs_diff(&r1) < 1e-15);
    }
}
