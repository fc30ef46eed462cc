use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use collisim::env::{evolve, evolve_with, CollisionScenario, EnvSites, EnvironmentMpdo, Interaction};
use collisim::kernel::{exact_kernel_term, stroboscopic_generator_with, two_point_cumulant, HamiltonianPart};
use collisim::mpdo::build_standard_mpdo;
use collisim::numkernel::ops::{random_density, random_hermitian, random_unitary};
use collisim::numkernel::{eig_hermitian, partial_trace, ComplexMatrix};
use collisim::scenario::presets::aklt_environment;
use collisim::validate::random_site;
use collisim::DensityMatrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn min_eig(m: &ComplexMatrix) -> f64 {
    eig_hermitian(&m.hermitian_part()).unwrap().real_eigenvalues()[0]
}

fn homogeneous_env(r: &mut ChaCha8Rng, d: usize, bond: usize, kraus: usize) -> EnvironmentMpdo {
    let site = random_site(r, d, bond, kraus).unwrap();
    let chi0 = DensityMatrix::new_unchecked(random_density(r, bond));
    EnvironmentMpdo::new(chi0, EnvSites::Homogeneous(site), None).unwrap()
}

/// Hermitian with unit operator norm.
fn unit_hamiltonian(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let h = random_hermitian(r, n);
    let norm = eig_hermitian(&h).unwrap().real_eigenvalues().iter().fold(0.0f64, |a, l| a.max(l.abs()));
    h.scale_real(1.0 / norm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bond_states_are_states(seed in any::<u64>(), d in 2usize..4, bond in 1usize..4, kraus in 1usize..3) {
        let env = homogeneous_env(&mut rng(seed), d, bond, kraus);
        for chi in env.chi_sequence(12).unwrap() {
            prop_assert!(chi.hermitian_deviation() <= 1e-10);
            prop_assert!((chi.trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(min_eig(&chi) >= -1e-10);
        }
    }

    #[test]
    fn joint_state_stays_physical(seed in any::<u64>(), d in 2usize..4, bond in 1usize..3) {
        let mut r = rng(seed);
        let env = homogeneous_env(&mut r, d, bond, 2);
        let rho = DensityMatrix::new_unchecked(random_density(&mut r, 2));
        let s = CollisionScenario::new(Interaction::Unitary(random_unitary(&mut r, 2 * d)), 1.0, 1.0, rho, env, 10).unwrap();
        let traj = evolve_with(&s, true).unwrap();
        for joint in traj.joint_states.unwrap() {
            prop_assert!((joint.trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(min_eig(&joint) >= -1e-10);
        }
    }

    #[test]
    fn factorized_chain_matches_standard_model(seed in any::<u64>(), d in 2usize..4, n in 1usize..4) {
        let mut r = rng(seed);
        let anc = DensityMatrix::new_unchecked(random_density(&mut r, d));
        let rho = DensityMatrix::new_unchecked(random_density(&mut r, 2));
        let u = random_unitary(&mut r, 2 * d);
        let env = EnvironmentMpdo::factorized(&anc, Some(n)).unwrap();
        let s = CollisionScenario::new(Interaction::Unitary(u.clone()), 1.0, 1.0, rho.clone(), env, n).unwrap();
        let traj = evolve(&s).unwrap();
        for k in 1..=n {
            let chain = build_standard_mpdo(&u, &rho, &vec![anc.clone(); k]).unwrap();
            let mut dims = vec![d; k];
            dims.push(2);
            let sys = partial_trace(chain.contract_density().unwrap().matrix(), &dims, &[k]).unwrap();
            prop_assert!(sys.max_abs_diff(traj.states[k].matrix()) <= 1e-12);
        }
    }

    #[test]
    fn no_interaction_no_memory(seed in any::<u64>(), d in 2usize..4, k in 1usize..5, m in 1usize..5) {
        let mut r = rng(seed);
        let env = homogeneous_env(&mut r, d, 2, 2);
        let rho = DensityMatrix::new_unchecked(random_density(&mut r, 2));
        let s = CollisionScenario::new(Interaction::Unitary(ComplexMatrix::identity(2 * d)), 1.0, 1.0, rho, env, 8).unwrap();
        let m = m.min(k);
        prop_assert!(exact_kernel_term(&s, k, m).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn stroboscopic_generators_are_physical_maps(seed in any::<u64>(), d in 2usize..4, bond in 1usize..3, order in 1usize..3) {
        let mut r = rng(seed);
        let env = homogeneous_env(&mut r, d, bond, 2);
        prop_assume!(env.correlation_spectrum().unwrap().has_finite_correlation_length());
        let h = unit_hamiltonian(&mut r, 2 * d);
        let rho = DensityMatrix::new_unchecked(random_density(&mut r, 2));
        let s = CollisionScenario::new(Interaction::Hamiltonian(h), 0.1, 1.0, rho, env, 8).unwrap();
        let gen = stroboscopic_generator_with(&s, order, HamiltonianPart::Remove).unwrap();
        prop_assert!(gen.trace_annihilation_deviation() <= 1e-10);
        prop_assert!(gen.hermiticity_deviation() <= 1e-10);
    }
}

#[test]
fn aklt_cumulant_follows_subleading_eigenvalue() {
    let env = aklt_environment(None).unwrap();
    let first = two_point_cumulant(&env, 1).unwrap().max_abs() * 3.0;
    for m in 1..=12 {
        let c = two_point_cumulant(&env, m).unwrap().max_abs();
        assert!(c <= first * (1.0f64 / 3.0).powi(m as i32) * (1.0 + 1e-9), "m = {m}");
    }
}

#[test]
fn cumulant_decay_on_random_chains() {
    // C₂(m) = Σ_j λ_j^m A_j, so C₂(m)/|λ₂|^m stays within a modest factor
    // of its first few values.
    let mut r = rng(90);
    for _ in 0..40 {
        let env = homogeneous_env(&mut r, 2, 2, 2);
        let spec = env.correlation_spectrum().unwrap();
        if !spec.has_finite_correlation_length() {
            continue;
        }
        let lam = spec.subleading_modulus();
        if lam < 1e-6 {
            continue;
        }
        let cum = |m: usize| two_point_cumulant(&env, m).unwrap().max_abs();
        let c = (1..=3).map(|m| cum(m) / lam.powi(m as i32)).fold(0.0, f64::max) * 10.0;
        for m in 4..=25 {
            // Entries bottom out at rounding level long before λ₂^m does.
            assert!(cum(m) <= c * lam.powi(m as i32) + 1e-14, "m = {m}: {} > {}", cum(m), c * lam.powi(m as i32));
        }
    }
}

#[test]
fn two_point_cumulant_is_traceless_in_each_site() {
    let mut r = rng(91);
    for _ in 0..20 {
        let env = homogeneous_env(&mut r, 3, 2, 2);
        for m in 1..=4 {
            let c = two_point_cumulant(&env, m).unwrap();
            for j in 0..3 {
                for jp in 0..3 {
                    let s: collisim::C64 = (0..3).map(|i| c.get(&[i, i, j, jp])).sum();
                    assert!(s.norm() < 1e-13);
                    let t: collisim::C64 = (0..3).map(|i| c.get(&[j, jp, i, i])).sum();
                    assert!(t.norm() < 1e-13);
                }
            }
        }
    }
}
