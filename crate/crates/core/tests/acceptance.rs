//! Acceptance suite: each criterion runs at its stated tolerance and prints
//! one `PASS`/`FAIL` line straight to stdout, so the lines survive output
//! capture.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use collisim::env::{evolve, CollisionScenario, EnvSites, EnvironmentMpdo, Interaction};
use collisim::kernel::{
    exact_kernel_term, integrate_superoperator, kernel_order2, local_generator, nz_reconstruct,
    perturbative_order_check, stroboscopic_generator, HamiltonianPart,
};
use collisim::mpdo::build_standard_mpdo;
use collisim::mps::build_standard_mps;
use collisim::numkernel::matrix_exp_skew;
use collisim::numkernel::ops::{basis_vector, bloch_vector, random_density, random_state, random_unitary};
use collisim::scenario::presets::{aklt_environment, energy_exchange_hamiltonian, PRESET_NAMES};
use collisim::scenario::preset;
use collisim::validate::closed_forms as cf;
use collisim::validate::{dense, kernel_tail, order2_finite_difference, random_scenario, random_site};
use collisim::{ComplexMatrix, DensityMatrix, Result, C64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn max_bloch_dev(a: &[DensityMatrix], b: &[DensityMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let (p, q) = (bloch_vector(x.matrix()), bloch_vector(y.matrix()));
            (0..3).map(|i| (p[i] - q[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn w_amplitudes() -> Result<Outcome> {
    let n = 6;
    let mut worst: f64 = 0.0;
    for gt in [0.3, PI / 4.0] {
        let u = matrix_exp_skew(&energy_exchange_hamiltonian(), gt)?;
        let chain = build_standard_mps(&u, &basis_vector(2, 1), &vec![basis_vector(2, 0); n])?;
        for (idx, amp) in chain.contract_statevector()?.iter().enumerate() {
            // Factors (ancilla 1, …, ancilla n, system); one excitation at most.
            let ups: Vec<usize> = (0..=n).filter(|b| (idx >> (n - b)) & 1 == 1).collect();
            let want = match ups.as_slice() {
                [k] if *k < n => gt.cos().powi(*k as i32) * gt.sin(),
                [_] => gt.cos().powi(n as i32),
                _ => 0.0,
            };
            worst = worst.max((amp - want).norm());
        }
    }
    Ok(outcome(worst <= 1e-12, format!("max amplitude error {worst:.2e} (tol 1e-12)")))
}

fn dense_equivalence() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (s, sites, n) = random_scenario(&mut rng)?;
        let d = s.ancilla_dim;
        let u = s.unitary()?;
        let anc = dense::ancilla_state(s.env.chi0().matrix(), &sites);
        let want = dense::evolve_dense(&u, s.rho_s0.matrix(), &anc, d, n);
        for (a, b) in evolve(&s)?.states.iter().zip(&want) {
            worst = worst.max(a.max_abs_diff(b));
        }
        // Standard model, pure and mixed ancillas.
        if rng.gen_bool(0.5) {
            let phi = random_state(&mut rng, 2);
            let psis: Vec<Vec<C64>> = (0..n).map(|_| random_state(&mut rng, d)).collect();
            let psi = build_standard_mps(&u, &phi, &psis)?.contract_statevector()?;
            let rhos: Vec<ComplexMatrix> = psis.iter().map(|p| ComplexMatrix::outer(p, p)).collect();
            let out = dense::standard_output(&u, &ComplexMatrix::outer(&phi, &phi), &rhos);
            worst = worst.max(ComplexMatrix::outer(&psi, &psi).max_abs_diff(&out));
        } else {
            let rhos: Vec<DensityMatrix> =
                (0..n).map(|_| DensityMatrix::new_unchecked(random_density(&mut rng, d))).collect();
            let chain = build_standard_mpdo(&u, &s.rho_s0, &rhos)?;
            let mats: Vec<ComplexMatrix> = rhos.iter().map(|r| r.matrix().clone()).collect();
            let out = dense::standard_output(&u, s.rho_s0.matrix(), &mats);
            worst = worst.max(chain.contract_density()?.max_abs_diff(&out));
        }
    }
    Ok(outcome(worst <= 1e-11, format!("100 scenarios, max deviation {worst:.2e} (tol 1e-11)")))
}

fn right_normalization() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for trial in 0..1000 {
        let d = rng.gen_range(2..=3);
        let ds = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=4);
        let u = random_unitary(&mut rng, ds * d);
        let dev = if trial % 2 == 0 {
            let psis: Vec<Vec<C64>> = (0..n).map(|_| random_state(&mut rng, d)).collect();
            build_standard_mps(&u, &random_state(&mut rng, ds), &psis)?.check_right_normalization(1e-12)
        } else {
            let rho = DensityMatrix::new_unchecked(random_density(&mut rng, ds));
            let rhos: Vec<DensityMatrix> =
                (0..n).map(|_| DensityMatrix::new_unchecked(random_density(&mut rng, d))).collect();
            build_standard_mpdo(&u, &rho, &rhos)?.check_right_normalization(1e-12)
        };
        if !dev.passed() {
            failures += 1;
        }
        worst = worst.max(dev.worst());
    }
    Ok(outcome(failures == 0, format!("1000 chains, {failures} failures, worst {worst:.2e} (tol 1e-12)")))
}

fn ghz_lambda(gt: f64, k: i32) -> C64 {
    let e = C64::new(0.0, 1.5 * gt).exp();
    let p = 3f64.powi(k);
    let num = (1.0 + 2.0 * e).powi(k) * p + (1.0 + 2.0 * e.conj()).powi(k) * p + (5.0 + 4.0 * (1.5 * gt).cos()).powi(k);
    num / 3f64.powi(2 * k + 1)
}

fn ghz_lambda_z(gt: f64, k: i32) -> f64 {
    let c = (1.5 * gt).cos();
    ((1.0 + 8.0 * c).powi(k) + 2.0 * (5.0 + 4.0 * c).powi(k)) / 3f64.powi(2 * k + 1)
}

fn ghz_scaling() -> Result<Outcome> {
    let gt = 0.2;
    let s = preset("ghz-qutrit")?.with_g_tau(gt).with_steps(50);
    let r0 = bloch_vector(s.rho_s0.matrix());
    let traj = evolve(&s)?;
    let mut worst: f64 = 0.0;
    let mut mags = Vec::new();
    for (k, rho) in traj.states.iter().enumerate() {
        let b = bloch_vector(rho.matrix());
        let l = ghz_lambda(gt, k as i32);
        let lz = ghz_lambda_z(gt, k as i32);
        worst = worst.max(l.im.abs());
        worst = worst.max((b[0] - l.re * r0[0]).abs()).max((b[1] - l.re * r0[1]).abs()).max((b[2] - lz * r0[2]).abs());
        mags.push(l.norm());
    }
    let unit = (ghz_lambda(gt, 0) - 1.0).norm() < 1e-15;
    let rises = mags.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
    Ok(outcome(
        worst <= 1e-10 && unit && rises > 0,
        format!("max error {worst:.2e} (tol 1e-10), lambda(0)=1: {unit}, {rises} increases of |lambda|"),
    ))
}

fn ghz_controlled_kernel() -> Result<Outcome> {
    let s = preset("ghz-controlled")?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let rho = random_density(&mut rng, 2);
        for k in 0..=3 {
            for m in 0..=k {
                let got = exact_kernel_term(&s, k, m)?.apply(&rho)?;
                worst = worst.max(got.max_abs_diff(&cf::ghz_controlled_kernel(s.g_tau(), s.tau, m, &rho)));
            }
        }
    }
    let k2: Vec<f64> = (1..=8).map(|m| kernel_order2(&s, m).map(|t| t.norm())).collect::<Result<_>>()?;
    let spread = k2.iter().map(|v| (v - k2[0]).abs()).fold(0.0, f64::max);
    let (head, tail) = kernel_tail(&s, 16)?;
    let passed = worst <= 1e-11 && spread <= 1e-12 && tail >= 0.1 * head;
    Ok(outcome(
        passed,
        format!(
            "formula error {worst:.2e} (tol 1e-11); order-2 spread over m {spread:.1e}; tail/head at k=16 {:.3} (>= 0.1)",
            tail / head
        ),
    ))
}

fn aklt_projective() -> Result<Outcome> {
    let s = preset("aklt-projective")?;
    let spec = s.env.correlation_spectrum()?;
    let mut ev: Vec<C64> = spec.eigenvalues().to_vec();
    ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    let want = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
    let spec_err = ev.iter().zip(want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let env = aklt_environment(None)?;
    let mut pair_err: f64 = 0.0;
    for m in 1..=6 {
        pair_err = pair_err.max(env.reduced_two_site_density(1, 1 + m)?.max_abs_diff(&cf::aklt_pair(m as i32)));
    }

    let gen = stroboscopic_generator(&s, 1)?;
    let g2tau = s.g * s.g * s.tau;
    let mut gen_err: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let e = ComplexMatrix::unit(2, 2, a, b);
            gen_err = gen_err.max(gen.effective.apply(&e)?.max_abs_diff(&cf::aklt_gksl_rhs(g2tau, &e)));
        }
    }

    let exact = evolve(&s.with_steps(200))?;
    let strobo = integrate_superoperator(&gen.effective, &s.rho_s0, &exact.times)?;
    let local = integrate_superoperator(&local_generator(&s, HamiltonianPart::RequireCommuting)?, &s.rho_s0, &exact.times)?;
    let d_strobo = max_bloch_dev(&strobo.states, &exact.states);
    let d_local = max_bloch_dev(&local.states, &exact.states);

    let passed = spec_err <= 1e-10 && pair_err <= 1e-10 && gen_err <= 1e-10 && d_strobo <= 2e-2 && d_local > 5e-2;
    Ok(outcome(
        passed,
        format!(
            "spectrum {spec_err:.1e}, pair states {pair_err:.1e}, generator {gen_err:.1e} (tol 1e-10); \
             trajectory strobo {d_strobo:.2e} (<= 2e-2), local-only {d_local:.2e} (> 5e-2)"
        ),
    ))
}

fn aklt_q(gt: f64, k: i32) -> f64 {
    let (c, s) = ((1.5 * gt).cos(), (1.5 * gt).sin());
    let x = 2.0 + 7.0 * c;
    let y = 7.0 + 2.0 * c;
    let z = 2.0 * (y * y + 27.0 * s * s).sqrt();
    (0.5 + x / z) * ((y + z) / 27.0).powi(k) + (0.5 - x / z) * ((y - z) / 27.0).powi(k)
}

fn aklt_heisenberg() -> Result<Outcome> {
    let base = preset("aklt-heisenberg")?;
    let r0 = bloch_vector(base.rho_s0.matrix());
    let mut q_err: f64 = 0.0;
    for gt in [0.4, 2.0 * PI / 3.0, 4.0 * PI / 3.0] {
        let traj = evolve(&base.with_g_tau(gt).with_steps(50))?;
        for (k, rho) in traj.states.iter().enumerate() {
            let b = bloch_vector(rho.matrix());
            let q = aklt_q(gt, k as i32);
            q_err = (0..3).fold(q_err, |w, i| w.max((b[i] - q * r0[i]).abs()));
        }
    }

    let gt = 0.4;
    let traj = evolve(&base.with_g_tau(gt).with_steps(2))?;
    let qk = |k: usize| bloch_vector(traj.states[k].matrix())[2] / r0[2];
    let y = 7.0 + 2.0 * (1.5 * gt).cos();
    let jump_err = (qk(2) - qk(1) - 32.0 * y / 729.0 * (0.75 * gt).sin().powi(2)).abs();

    let first = stroboscopic_generator(&base, 1)?.effective.norm();

    let small = base.with_g_tau(0.02);
    let (k0, k1) = (200usize, 2000usize);
    let traj = evolve(&small.with_steps(k1))?;
    let qz = |k: usize| bloch_vector(traj.states[k].matrix())[2] / r0[2];
    let rate = -(qz(k1).ln() - qz(k0).ln()) / ((k1 - k0) as f64 * small.tau);
    let want = small.g.powi(4) * small.tau.powi(3) / 8.0;
    let rel = (rate - want).abs() / want;

    let passed = q_err <= 1e-10 && jump_err <= 1e-10 && first < 1e-10 && rel <= 0.05;
    Ok(outcome(
        passed,
        format!(
            "q(t) {q_err:.1e}, q(2tau)-q(tau) {jump_err:.1e} (tol 1e-10); first-order generator {first:.1e}; \
             decay rate rel. error {rel:.2e} (<= 5e-2)"
        ),
    ))
}

fn order_audits() -> Result<Outcome> {
    let mut worst_exp: f64 = f64::INFINITY;
    let mut zeroth: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for name in PRESET_NAMES {
        let s = preset(name)?;
        for m in 1..=3 {
            let r = perturbative_order_check(&s, m, m)?;
            zeroth = zeroth.max(r.zeroth_order_norm);
            if let Some(e) = r.exponent {
                worst_exp = worst_exp.min(e);
            }
            fd = fd.max(order2_finite_difference(&s, m, 5e-3)?);
        }
    }
    Ok(outcome(
        zeroth < 1e-12 && worst_exp >= 1.9 && fd <= 0.02,
        format!("|K0| <= {zeroth:.1e}, smallest g-exponent {worst_exp:.4} (>= 1.9), order-2 vs finite difference {fd:.2e} (<= 2e-2)"),
    ))
}

fn scaling() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let start = Instant::now();
    let site = random_site(&mut rng, 3, 2, 2)?;
    let chi0 = DensityMatrix::new_unchecked(random_density(&mut rng, 2));
    let env = EnvironmentMpdo::new(chi0, EnvSites::Homogeneous(site), None)?;
    let storage = match env.sites() {
        EnvSites::Homogeneous(s) => s.storage_len(),
        EnvSites::PerSite(_) => usize::MAX,
    };
    let rho = DensityMatrix::new_unchecked(random_density(&mut rng, 2));
    let s = CollisionScenario::new(Interaction::Unitary(random_unitary(&mut rng, 6)), 1.0, 1.0, rho, env, 10_000)?;
    let traj = evolve(&s)?;
    let secs = start.elapsed().as_secs_f64();
    let last = traj.states.last().map(|r| (r.trace().re - 1.0).abs()).unwrap_or(1.0);
    // One site tensor of 3·2·2·2 entries regardless of chain length.
    let passed = secs < 10.0 && traj.states.len() == 10_001 && storage == 24 && last < 1e-10;
    Ok(outcome(passed, format!("10^4 collisions in {secs:.2} s (< 10 s), environment storage {storage} entries")))
}

fn nz_consistency() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for name in PRESET_NAMES {
        let s = preset(name)?;
        let traj = evolve(&s.with_steps(9))?;
        for k in 0..=8 {
            worst = worst.max(nz_reconstruct(&s, k)?.max_abs_diff(traj.states[k + 1].matrix()));
        }
    }
    Ok(outcome(worst <= 1e-10, format!("max deviation {worst:.2e} over six presets, k <= 8 (tol 1e-10)")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("W-like amplitudes", w_amplitudes),
        ("dense-oracle equivalence", dense_equivalence),
        ("right normalization", right_normalization),
        ("GHZ qutrit Bloch scaling", ghz_scaling),
        ("GHZ controlled-rotation kernel", ghz_controlled_kernel),
        ("AKLT projective coupling", aklt_projective),
        ("AKLT Heisenberg coupling", aklt_heisenberg),
        ("perturbation-order audits", order_audits),
        ("long-chain scaling", scaling),
        ("memory-kernel reconstruction", nz_consistency),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let res = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        writeln!(out, "{} criterion {:>2} {name}: {}", if res.passed { "PASS" } else { "FAIL" }, i + 1, res.detail).unwrap();
        if !res.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
