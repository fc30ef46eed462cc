//! Projections and exact memory-kernel terms of the discrete
//! Nakajima–Zwanzig equation.

use num_complex::Complex64 as C64;

use crate::env::{evolve, trace_bond, CollisionScenario, EnvironmentMpdo};
use crate::error::{Error, Result};
use crate::numkernel::{superop_from_kraus, ComplexMatrix, DensityMatrix, Superoperator};

/// `P[R] = tr_bond(R) ⊗ χ`.
pub fn project_p(r: &ComplexMatrix, chi: &ComplexMatrix) -> Result<ComplexMatrix> {
    let bond = chi.rows();
    if !chi.is_square() || !r.is_square() || bond == 0 || r.rows() % bond != 0 {
        return Err(Error::DimensionMismatch(format!(
            "joint operator {:?} is not system ⊗ bond for bond {bond}",
            r.shape()
        )));
    }
    let ds = r.rows() / bond;
    Ok(trace_bond(r, ds, bond).kron_unchecked(chi))
}

/// `Q[R] = R − P[R]`.
pub fn project_q(r: &ComplexMatrix, chi: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(r - &project_p(r, chi)?)
}

/// `ρ ↦ ρ ⊗ χ` as a superoperator from the system to `system ⊗ bond`.
pub fn lift_superop(ds: usize, chi: &ComplexMatrix) -> Superoperator {
    let bond = chi.rows();
    let n = ds * bond;
    let mut m = ComplexMatrix::zeros(n * n, ds * ds);
    for a in 0..ds {
        for b in 0..ds {
            for x in 0..bond {
                for y in 0..bond {
                    m[((a * bond + x) * n + b * bond + y, a * ds + b)] = chi[(x, y)];
                }
            }
        }
    }
    Superoperator { dim_in: ds, dim_out: n, matrix: m, label: "lift".into() }
}

/// `tr_bond` as a superoperator.
pub fn trace_bond_superop(ds: usize, bond: usize) -> Superoperator {
    let n = ds * bond;
    let mut m = ComplexMatrix::zeros(ds * ds, n * n);
    for a in 0..ds {
        for b in 0..ds {
            for x in 0..bond {
                m[(a * ds + b, (a * bond + x) * n + b * bond + x)] = C64::new(1.0, 0.0);
            }
        }
    }
    Superoperator { dim_in: n, dim_out: ds, matrix: m, label: "tr_bond".into() }
}

/// `Q = Id − lift∘tr_bond` on `system ⊗ bond`.
pub fn q_superop(ds: usize, chi: &ComplexMatrix) -> Result<Superoperator> {
    let p = lift_superop(ds, chi).compose(&trace_bond_superop(ds, chi.rows()))?;
    Superoperator::identity(ds * chi.rows()).sub(&p)
}

/// Embedding map of collision `site` as a superoperator.
pub fn embedding_superop(env: &EnvironmentMpdo, site: usize, u: &ComplexMatrix) -> Result<Superoperator> {
    superop_from_kraus(&env.kraus_embedding(site, u)?)
}

/// Memory-kernel term `𝓚_{km}` of the exact discrete Nakajima–Zwanzig
/// equation. `m = 0` is the time-local term.
pub fn exact_kernel_term(scenario: &CollisionScenario, k: usize, m: usize) -> Result<Superoperator> {
    let u = scenario.unitary()?;
    kernel_term_with_unitary(scenario, &u, k, m)
}

pub(crate) fn kernel_term_with_unitary(
    scenario: &CollisionScenario,
    u: &ComplexMatrix,
    k: usize,
    m: usize,
) -> Result<Superoperator> {
    if m > k {
        return Err(Error::InvalidArgument(format!("kernel index m = {m} exceeds k = {k}")));
    }
    let env = &scenario.env;
    if let Some(n) = env.length() {
        if k + 1 > n {
            return Err(Error::InvalidArgument(format!(
                "kernel term k = {k} needs {} ancillas, environment has {n}",
                k + 1
            )));
        }
    }
    let ds = scenario.system_dim;
    let chis = env.chi_sequence(k)?;
    let shared = if env.is_homogeneous() { Some(embedding_superop(env, 1, u)?) } else { None };
    let emb = |site: usize| -> Result<Superoperator> {
        match &shared {
            Some(e) => Ok(e.clone()),
            None => embedding_superop(env, site, u),
        }
    };
    // Collisions are 1-based: the latest one is k + 1.
    let mut acc = emb(k - m + 1)?.compose(&lift_superop(ds, chis[k - m].matrix()))?;
    for j in (k - m + 1)..=k {
        acc = q_superop(ds, chis[j].matrix())?.compose(&acc)?;
        acc = emb(j + 1)?.compose(&acc)?;
    }
    let mut out = trace_bond_superop(ds, env.bond_dim()).compose(&acc)?;
    if m == 0 {
        out = out.sub(&Superoperator::identity(ds))?;
    }
    Ok(out.scale_real(1.0 / scenario.tau).with_label(format!("K_{{{k},{m}}}")))
}

/// `ρ_S((k+1)τ)` rebuilt from the kernel terms and the exact past states.
pub fn nz_reconstruct(scenario: &CollisionScenario, k: usize) -> Result<DensityMatrix> {
    let traj = evolve(&scenario.with_steps(k))?;
    let mut rho = traj.states[k].matrix().clone();
    for m in 0..=k {
        let term = exact_kernel_term(scenario, k, m)?.apply(traj.states[k - m].matrix())?;
        rho += &term.scale_real(scenario.tau);
    }
    Ok(DensityMatrix::new_unchecked(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ops::{random_density, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let chi = random_density(&mut rng, 3);
        let rho = random_density(&mut rng, 2);
        let prod = rho.kron_unchecked(&chi);
        assert!(project_p(&prod, &chi).unwrap().max_abs_diff(&prod) < 1e-14);
        assert!(project_q(&prod, &chi).unwrap().max_abs() < 1e-14);

        let r = random_matrix(&mut rng, 6, 6);
        let p = project_p(&r, &chi).unwrap();
        assert!(project_p(&p, &chi).unwrap().max_abs_diff(&p) < 1e-12);
        let q = project_q(&r, &chi).unwrap();
        assert!(trace_bond(&q, 2, 3).max_abs() < 1e-12);
        assert!(project_p(&r, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn superop_forms_match_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let chi = random_density(&mut rng, 2);
        let rho = random_matrix(&mut rng, 3, 3);
        let lifted = lift_superop(3, &chi).apply(&rho).unwrap();
        assert!(lifted.max_abs_diff(&rho.kron_unchecked(&chi)) < 1e-14);
        let r = random_matrix(&mut rng, 6, 6);
        let q = q_superop(3, &chi).unwrap().apply(&r).unwrap();
        assert!(q.max_abs_diff(&project_q(&r, &chi).unwrap()) < 1e-13);
    }
}
