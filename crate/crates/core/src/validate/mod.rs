//! Self-checks comparing the engine against literal reference formulas and
//! a dense brute-force oracle.

pub mod closed_forms;
pub mod dense;

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{evolve, CollisionScenario, EnvSites, EnvironmentMpdo, Interaction};
use crate::error::{Error, Result};
use crate::kernel::{
    exact_kernel_term, integrate_superoperator, kernel_order2, local_generator, nz_reconstruct,
    perturbative_order_check, stroboscopic_generator, HamiltonianPart,
};
use crate::mpdo::{build_standard_mpdo, MpdoSite};
use crate::mps::build_standard_mps;
use crate::numkernel::ops::{basis_vector, bloch_vector, random_density, random_state, random_unitary};
use crate::numkernel::{ComplexMatrix, DensityMatrix};
use crate::scenario::presets::{aklt_environment, PRESET_NAMES};
use crate::scenario::preset;

use closed_forms as cf;

pub const SELECTORS: [&str; 9] =
    ["example1", "example2", "example3", "example4", "example5", "example6", "dense", "nz", "orders"];

#[derive(Clone, Debug)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, group: &str, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { group: group.into(), name: name.into(), passed, detail });
    }

    /// Records `value ≤ bound` as a check.
    fn bound(&mut self, group: &str, name: &str, value: f64, bound: f64) {
        self.push(group, name, value <= bound, format!("{value:.3e} <= {bound:.1e}"));
    }

    fn error(&mut self, group: &str, err: Error) {
        self.push(group, "runs", false, err.to_string());
    }
}

/// One tab-separated line per check: `PASS|FAIL  group  name  detail`.
impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}\t{}\t{}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.group, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Runs `all`, one selector, or one preset name.
pub fn validate(selector: &str) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let groups: Vec<&str> = match selector {
        "all" => SELECTORS.to_vec(),
        s if SELECTORS.contains(&s) => vec![s],
        s if PRESET_NAMES.contains(&s) => {
            preset_checks(&mut report, s);
            return Ok(report);
        }
        other => return Err(Error::InvalidArgument(format!("unknown validation selector {other:?}"))),
    };
    for g in groups {
        let res = match g {
            "example1" => w_chain_checks(&mut report),
            "example2" => gibbs_chain_checks(&mut report),
            "example3" => ghz_qutrit_checks(&mut report),
            "example4" => ghz_controlled_checks(&mut report),
            "example5" => aklt_projective_checks(&mut report),
            "example6" => aklt_heisenberg_checks(&mut report),
            "dense" => dense_checks(&mut report, 20, 7),
            "nz" => {
                for name in PRESET_NAMES {
                    preset_nz(&mut report, name);
                }
                Ok(())
            }
            _ => {
                for name in PRESET_NAMES {
                    preset_orders(&mut report, name);
                }
                Ok(())
            }
        };
        if let Err(e) = res {
            report.error(g, e);
        }
    }
    Ok(report)
}

fn preset_checks(report: &mut ValidationReport, name: &str) {
    match preset(name) {
        Ok(s) => report.push(name, "loads", s.validate(&Default::default()).is_ok(), "module validation".into()),
        Err(e) => return report.error(name, e),
    }
    preset_nz(report, name);
    preset_orders(report, name);
}

fn preset_nz(report: &mut ValidationReport, name: &str) {
    let run = || -> Result<f64> {
        let s = preset(name)?;
        let traj = evolve(&s.with_steps(9))?;
        let mut worst: f64 = 0.0;
        for k in 0..=8 {
            worst = worst.max(nz_reconstruct(&s, k)?.max_abs_diff(traj.states[k + 1].matrix()));
        }
        Ok(worst)
    };
    match run() {
        Ok(v) => report.bound(name, "nz-reconstruct k<=8", v, 1e-10),
        Err(e) => report.error(name, e),
    }
}

fn preset_orders(report: &mut ValidationReport, name: &str) {
    let run = |report: &mut ValidationReport| -> Result<()> {
        let s = preset(name)?;
        for m in 1..=3 {
            let r = perturbative_order_check(&s, m, m)?;
            let detail = match r.exponent {
                Some(e) => format!("exponent {e:.4}, |K0| {:.1e}", r.zeroth_order_norm),
                None => "identically zero".into(),
            };
            report.push(name, &format!("order-audit m={m}"), r.passed(), detail);
            let fd = order2_finite_difference(&s, m, 5e-3)?;
            report.bound(name, &format!("order-2 kernel vs finite difference m={m}"), fd, 0.02);
        }
        Ok(())
    };
    if let Err(e) = run(report) {
        report.error(name, e);
    }
}

/// Relative Frobenius distance between `kernel_order2_at(k = m)` and
/// `𝓚_{mm}/(g²τ)` evaluated exactly at `g_tau`, or the absolute distance
/// when the order-2 term vanishes.
pub fn order2_finite_difference(s: &CollisionScenario, m: usize, g_tau: f64) -> Result<f64> {
    let k2 = kernel_order2(s, m)?;
    let small = s.with_g_tau(g_tau);
    let fd = exact_kernel_term(&small, m, m)?.scale_real(1.0 / (small.g * small.g * small.tau));
    let num = (&fd.matrix - &k2.matrix).frobenius_norm();
    // Uncorrelated chains have no memory at all; compare absolutely.
    Ok(if k2.norm() < 1e-13 { num } else { num / k2.norm() })
}

fn w_chain_checks(report: &mut ValidationReport) -> Result<()> {
    let n = 6;
    let mut worst: f64 = 0.0;
    for gt in [0.3, PI / 4.0] {
        let u = crate::numkernel::matrix_exp_skew(&crate::scenario::presets::energy_exchange_hamiltonian(), gt)?;
        let down = basis_vector(2, 0);
        let chain = build_standard_mps(&u, &basis_vector(2, 1), &vec![down; n])?;
        let psi = chain.contract_statevector()?;
        for (idx, amp) in psi.iter().enumerate() {
            // Ordering (ancilla 1, …, ancilla n, system), ↑ = 1.
            let ups: Vec<usize> = (0..=n).filter(|b| (idx >> (n - b)) & 1 == 1).collect();
            let want = match ups.as_slice() {
                [k] => cf::w_amplitude(gt, *k, n),
                _ => 0.0,
            };
            worst = worst.max((amp - want).norm());
        }
    }
    report.bound("example1", "W-like amplitudes", worst, 1e-12);
    Ok(())
}

fn gibbs_chain_checks(report: &mut ValidationReport) -> Result<()> {
    let s = preset("gibbs-chain")?;
    let u = s.unitary()?;
    let rho_anc = match s.env.sites() {
        EnvSites::Homogeneous(_) => s.env.reduced_site_density(1)?,
        EnvSites::PerSite(_) => return Err(Error::NotHomogeneous),
    };
    let rhos = vec![rho_anc.clone(); 4];
    let chain = build_standard_mpdo(&u, &s.rho_s0, &rhos)?;
    let want = dense::standard_output(&u, s.rho_s0.matrix(), &vec![rho_anc.matrix().clone(); 4]);
    report.bound("example2", "MPDO equals dense output", chain.contract_density()?.max_abs_diff(&want), 1e-12);
    report.bound("example2", "right normalization", chain.check_right_normalization(1e-12).worst(), 1e-12);
    Ok(())
}

fn ghz_qutrit_checks(report: &mut ValidationReport) -> Result<()> {
    let base = preset("ghz-qutrit")?;
    let r0 = bloch_vector(base.rho_s0.matrix());
    for gt in [0.2, 1.0] {
        let traj = evolve(&base.with_g_tau(gt).with_steps(50))?;
        let mut worst: f64 = 0.0;
        let mut mags = Vec::new();
        for (k, rho) in traj.states.iter().enumerate() {
            let b = bloch_vector(rho.matrix());
            let l = cf::ghz_lambda(gt, k as u32);
            let lz = cf::ghz_lambda_z(gt, k as u32);
            worst = worst.max(l.im.abs());
            worst = worst.max((b[0] - l.re * r0[0]).abs()).max((b[1] - l.re * r0[1]).abs());
            worst = worst.max((b[2] - lz * r0[2]).abs());
            mags.push(l.norm());
        }
        report.bound("example3", &format!("lambda, lambda_z k<=50 at gtau={gt}"), worst, 1e-10);
        if gt == 0.2 {
            let ups = mags.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
            report.push("example3", "|lambda| increases somewhere", ups > 0, format!("{ups} increases"));
            report.bound("example3", "lambda(0) = 1", (cf::ghz_lambda(gt, 0) - 1.0).norm(), 1e-15);
        }
    }
    Ok(())
}

fn ghz_controlled_checks(report: &mut ValidationReport) -> Result<()> {
    let s = preset("ghz-controlled")?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rho = random_density(&mut rng, 2);
    let mut worst: f64 = 0.0;
    for k in 0..=3 {
        for m in 0..=k {
            let got = exact_kernel_term(&s, k, m)?.apply(&rho)?;
            worst = worst.max(got.max_abs_diff(&cf::ghz_controlled_kernel(s.g_tau(), s.tau, m, &rho)));
        }
    }
    report.bound("example4", "kernel formula k,m<=3", worst, 1e-11);
    // Infinite correlation length: the order-g²τ kernel is the same for
    // every m, and the exact kernel keeps a non-geometric tail.
    let k2: Vec<f64> = (1..=8).map(|m| kernel_order2(&s, m).map(|t| t.norm())).collect::<Result<_>>()?;
    let spread = k2.iter().map(|v| (v - k2[0]).abs()).fold(0.0, f64::max);
    report.bound("example4", "order-2 kernel independent of m", spread, 1e-12);
    let (head, tail) = kernel_tail(&s, 16)?;
    report.push(
        "example4",
        "exact kernel tail does not decay",
        tail >= 0.1 * head,
        format!("max_(8<m<=16) |K_16,m| / |K_16,1| = {:.4}", tail / head),
    );
    Ok(())
}

/// `(‖𝓚_{k1}‖, max_{k/2 < m ≤ k} ‖𝓚_{km}‖)`.
pub fn kernel_tail(s: &CollisionScenario, k: usize) -> Result<(f64, f64)> {
    let head = exact_kernel_term(s, k, 1)?.norm();
    let mut tail: f64 = 0.0;
    for m in (k / 2 + 1)..=k {
        tail = tail.max(exact_kernel_term(s, k, m)?.norm());
    }
    Ok((head, tail))
}

fn aklt_projective_checks(report: &mut ValidationReport) -> Result<()> {
    let s = preset("aklt-projective")?;
    let spec = s.env.correlation_spectrum()?;
    let want = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
    let mut got: Vec<f64> = spec.eigenvalues().iter().map(|l| l.re).collect();
    got.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut want_sorted = want.to_vec();
    want_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let dev = got.iter().zip(&want_sorted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        + spec.eigenvalues().iter().map(|l| l.im.abs()).fold(0.0, f64::max);
    report.bound("example5", "transfer spectrum {1, -1/3 x3}", dev, 1e-10);

    let env = aklt_environment(None)?;
    let mut worst: f64 = 0.0;
    for m in 1..=6 {
        worst = worst.max(env.reduced_two_site_density(1, 1 + m)?.max_abs_diff(&cf::aklt_pair(m as i32)));
    }
    report.bound("example5", "two-site state m<=6", worst, 1e-12);

    let gen = stroboscopic_generator(&s, 1)?;
    let g2tau = s.g * s.g * s.tau;
    let mut dev: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let e = ComplexMatrix::unit(2, 2, a, b);
            dev = dev.max(gen.effective.apply(&e)?.max_abs_diff(&cf::aklt_gksl_rhs(g2tau, &e)));
        }
    }
    report.bound("example5", "stroboscopic generator", dev, 1e-10);
    report.push(
        "example5",
        "Kossakowski matrix PSD",
        gen.gksl.is_positive(1e-10),
        format!("min eigenvalue {:.3e}", gen.gksl.min_eigenvalue()),
    );

    let exact = evolve(&s.with_steps(200))?;
    let grid: Vec<f64> = exact.times.clone();
    let strobo = integrate_superoperator(&gen.effective, &s.rho_s0, &grid)?;
    let local = integrate_superoperator(&local_generator(&s, HamiltonianPart::RequireCommuting)?, &s.rho_s0, &grid)?;
    let dev = |traj: &[DensityMatrix]| -> f64 {
        traj.iter()
            .zip(&exact.states)
            .map(|(a, b)| {
                let (x, y) = (bloch_vector(a.matrix()), bloch_vector(b.matrix()));
                (0..3).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    report.bound("example5", "stroboscopic trajectory vs exact", dev(&strobo.states), 2e-2);
    let dl = dev(&local.states);
    report.push("example5", "local-only trajectory separates", dl > 5e-2, format!("{dl:.3e} > 5e-2"));
    Ok(())
}

fn aklt_heisenberg_checks(report: &mut ValidationReport) -> Result<()> {
    let base = preset("aklt-heisenberg")?;
    let r0 = bloch_vector(base.rho_s0.matrix());
    for (label, gt) in [("0.4", 0.4), ("2pi/3", 2.0 * PI / 3.0), ("4pi/3", 4.0 * PI / 3.0)] {
        let traj = evolve(&base.with_g_tau(gt).with_steps(50))?;
        let mut worst: f64 = 0.0;
        for (k, rho) in traj.states.iter().enumerate() {
            let q = cf::aklt_q(gt, k as i32);
            let b = bloch_vector(rho.matrix());
            worst = (0..3).fold(worst, |w, i| w.max((b[i] - q * r0[i]).abs()));
        }
        report.bound("example6", &format!("q(t) k<=50 at gtau={label}"), worst, 1e-10);
    }
    let gt = 0.4;
    let traj = evolve(&base.with_g_tau(gt).with_steps(2))?;
    let q = |k: usize| bloch_vector(traj.states[k].matrix())[2] / r0[2];
    report.bound("example6", "q(2tau) - q(tau)", (q(2) - q(1) - cf::aklt_q_jump(gt)).abs(), 1e-10);
    let gen = stroboscopic_generator(&base, 1)?;
    report.bound("example6", "first-order generator vanishes", gen.effective.norm(), 1e-10);

    let small = base.with_g_tau(0.02);
    let (k0, k1) = (200usize, 2000usize);
    let traj = evolve(&small.with_steps(k1))?;
    let qz = |k: usize| bloch_vector(traj.states[k].matrix())[2] / r0[2];
    let rate = -(qz(k1).ln() - qz(k0).ln()) / ((k1 - k0) as f64 * small.tau);
    let want = cf::aklt_q_rate(small.g, small.tau);
    let rel = (rate - want).abs() / want;
    report.bound("example6", "decay rate g^4 tau^3 / 8 at gtau=0.02", rel, 0.05);
    Ok(())
}

/// Random environments, dense oracle versus the MPDO embedding.
fn dense_checks(report: &mut ValidationReport, trials: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_env: f64 = 0.0;
    let mut worst_std: f64 = 0.0;
    for _ in 0..trials {
        let (scenario, sites, n) = random_scenario(&mut rng)?;
        let d = scenario.ancilla_dim;
        let u = scenario.unitary()?;
        let anc = dense::ancilla_state(scenario.env.chi0().matrix(), &sites);
        let want = dense::evolve_dense(&u, scenario.rho_s0.matrix(), &anc, d, n);
        let got = evolve(&scenario)?;
        for (a, b) in got.states.iter().zip(&want) {
            worst_env = worst_env.max(a.max_abs_diff(b));
        }
        let rhos: Vec<DensityMatrix> = (0..n).map(|_| DensityMatrix::new_unchecked(random_density(&mut rng, d))).collect();
        let chain = build_standard_mpdo(&u, &scenario.rho_s0, &rhos)?;
        let dense_out =
            dense::standard_output(&u, scenario.rho_s0.matrix(), &rhos.iter().map(|r| r.matrix().clone()).collect::<Vec<_>>());
        worst_std = worst_std.max(chain.contract_density()?.max_abs_diff(&dense_out));
    }
    report.bound("dense", "correlated evolve vs dense", worst_env, 1e-11);
    report.bound("dense", "standard MPDO vs dense", worst_std, 1e-11);
    Ok(())
}

/// A qubit system, `d ∈ {2, 3}`, `n ≤ 5` ancillas of a random
/// right-normalized chain; returns the raw site tensors too.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Result<(CollisionScenario, Vec<dense::SiteTensors>, usize)> {
    let d = rng.gen_range(2..=3);
    let n = rng.gen_range(1..=if d == 2 { 5 } else { 4 });
    let bond = rng.gen_range(1..=2);
    let kraus = rng.gen_range(1..=2);
    let sites: Vec<MpdoSite> = (0..n).map(|_| random_site(rng, d, bond, kraus)).collect::<Result<_>>()?;
    let raw = sites.iter().map(|s| (0..d).map(|i| s.kraus_family(i).to_vec()).collect()).collect();
    let chi0 = DensityMatrix::new_unchecked(random_density(rng, bond));
    let env = EnvironmentMpdo::new(chi0, EnvSites::PerSite(sites), None)?;
    let rho_s = if rng.gen_bool(0.5) {
        DensityMatrix::pure(&random_state(rng, 2))?
    } else {
        DensityMatrix::new_unchecked(random_density(rng, 2))
    };
    let u = random_unitary(rng, 2 * d);
    let s = CollisionScenario::new(Interaction::Unitary(u), 1.0, 1.0, rho_s, env, n)?;
    Ok((s, raw, n))
}

/// Right-normalized site from the first rows of a random unitary.
pub fn random_site<R: Rng>(rng: &mut R, d: usize, bond: usize, kraus: usize) -> Result<MpdoSite> {
    // Σ_{i,b} B B† = I: stack (i, b) blocks as an isometry of size (d·kraus·bond) × bond.
    let big = d * kraus * bond;
    let u = random_unitary(rng, big);
    let slices = (0..d)
        .map(|i| {
            (0..kraus)
                .map(|b| {
                    let off = (i * kraus + b) * bond;
                    ComplexMatrix::from_fn(bond, bond, |r, c| u[(c + off, r)].conj())
                })
                .collect()
        })
        .collect();
    MpdoSite::new(slices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_selector() {
        assert!(validate("nope").is_err());
    }

    #[test]
    fn random_sites_are_right_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for _ in 0..10 {
            let s = random_site(&mut rng, 3, 2, 2).unwrap();
            assert!(s.right_normalization_deviation() < 1e-12);
        }
    }
}
