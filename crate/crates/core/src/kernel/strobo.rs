//! Stroboscopic-limit generators built from the perturbative kernel.
//!
//! With a stationary ancilla chain the order-`g²τ` kernel is a sum of
//! geometric sequences in the decaying transfer eigenvalues, so the whole
//! memory tail folds into a time-local generator.

use num_complex::Complex64 as C64;

use crate::env::{ancilla_block, CollisionScenario, EnvironmentMpdo};
use crate::error::{Error, Result};
use crate::kernel::perturbative::{
    contract_three, contract_two, kernel_order2_at, phi_table, require_hamiltonian, PhiTable,
};
use crate::mpdo::MpdoSite;
use crate::numkernel::{eig_hermitian, kron, solve, vectorize, ComplexMatrix, Superoperator};
use crate::tol::TOL_HERM;

/// Decaying eigenvalues below this modulus only contribute a contact term.
pub const ZERO_EIGENVALUE: f64 = 1e-8;

/// What to do with the first-order part `−ig[⟨H⟩_anc, ·]` of the local term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HamiltonianPart {
    /// Drop it after checking that `[⟨H⟩_anc, ϱ_S(0)]` vanishes.
    #[default]
    RequireCommuting,
    /// Drop it without checking.
    Remove,
    /// Keep it at the scenario's finite coupling.
    Keep,
}

/// Scenario copy whose ancilla chain starts from its stationary bond state.
pub(crate) fn stationary_scenario(scenario: &CollisionScenario) -> Result<CollisionScenario> {
    let env = scenario.env.with_length(None)?;
    let chi = env.stationary_chi()?;
    Ok(CollisionScenario { env: env.with_chi0(chi)?, ..scenario.clone() })
}

/// `⟨H⟩_anc = tr_anc[H (I ⊗ ϱ₁)]`.
pub fn ancilla_averaged_hamiltonian(h: &ComplexMatrix, ds: usize, rho1: &ComplexMatrix) -> ComplexMatrix {
    let d = rho1.rows();
    let mut out = ComplexMatrix::zeros(ds, ds);
    for i in 0..d {
        for ip in 0..d {
            out += &ancilla_block(h, ds, d, ip, i).scale(rho1[(i, ip)]);
        }
    }
    out
}

fn average(table: &PhiTable, rho1: &ComplexMatrix, ds: usize) -> Result<Superoperator> {
    let d = rho1.rows();
    let mut acc = Superoperator::zero(ds);
    for i in 0..d {
        for ip in 0..d {
            acc = acc.add(&table.get(i, ip).scale(rho1[(i, ip)]))?;
        }
    }
    Ok(acc)
}

fn check_commutator(h_avg: &ComplexMatrix, rho: &ComplexMatrix) -> Result<()> {
    let residual = h_avg.commutator(rho).max_abs();
    if residual > TOL_HERM {
        return Err(Error::CommutatorHypothesis { residual });
    }
    Ok(())
}

/// Time-local generator `g²τ Σ ϱ₁ Φ⁽²⁾`, plus `g Σ ϱ₁ Φ⁽¹⁾` when the
/// policy keeps the Hamiltonian part. Uses the single-site ancilla state
/// of the stationary chain.
pub fn local_generator(scenario: &CollisionScenario, policy: HamiltonianPart) -> Result<Superoperator> {
    let h = require_hamiltonian(scenario)?;
    let stat = stationary_scenario(scenario)?;
    let rho1 = stat.env.reduced_site_density(1)?;
    local_from_rho1(scenario, h, rho1.matrix(), policy)
}

fn local_from_rho1(
    scenario: &CollisionScenario,
    h: &ComplexMatrix,
    rho1: &ComplexMatrix,
    policy: HamiltonianPart,
) -> Result<Superoperator> {
    let (ds, d) = (scenario.system_dim, scenario.ancilla_dim);
    let (g, tau) = (scenario.g, scenario.tau);
    let mut out = average(&phi_table(h, ds, d, 2)?, rho1, ds)?.scale_real(g * g * tau);
    let h_avg = ancilla_averaged_hamiltonian(h, ds, rho1);
    match policy {
        HamiltonianPart::RequireCommuting => check_commutator(&h_avg, scenario.rho_s0.matrix())?,
        HamiltonianPart::Remove => {}
        HamiltonianPart::Keep => out = out.add(&Superoperator::commutator(&h_avg)?.scale_real(g))?,
    }
    Ok(out.with_label("L_local"))
}

/// Bond-space pieces of the resolvent sums over the ancilla chain.
struct Resolvent {
    d: usize,
    lam: Vec<ComplexMatrix>,
    vec_chi: Vec<C64>,
    vec_id: Vec<C64>,
    /// `(I − T + Π)⁻¹ (I − Π)`.
    r: ComplexMatrix,
}

impl Resolvent {
    fn new(env: &EnvironmentMpdo) -> Result<Self> {
        let site: &MpdoSite = env.site(1);
        let d = env.physical_dim();
        let bond = env.bond_dim();
        let mut lam = Vec::with_capacity(d * d);
        for i in 0..d {
            for ip in 0..d {
                let mut acc = ComplexMatrix::zeros(bond * bond, bond * bond);
                for b in 0..site.kraus_count() {
                    acc += &kron(&site.slice(i, b).transpose(), &site.slice(ip, b).adjoint())?;
                }
                lam.push(acc);
            }
        }
        let vec_chi = vectorize(env.chi0().matrix());
        let vec_id = vectorize(&ComplexMatrix::identity(bond));
        let n = bond * bond;
        let pi = ComplexMatrix::from_fn(n, n, |r, c| vec_chi[r] * vec_id[c]);
        let mut t = ComplexMatrix::zeros(n, n);
        for i in 0..d {
            t += &lam[i * d + i];
        }
        let q = &ComplexMatrix::identity(n) - &pi;
        let lhs = &(&ComplexMatrix::identity(n) - &t) + &pi;
        let r = solve(&lhs, &q)?;
        Ok(Self { d, lam, vec_chi, vec_id, r })
    }

    fn lam(&self, i: usize, ip: usize) -> &ComplexMatrix {
        &self.lam[i * self.d + ip]
    }

    fn close(&self, v: &[C64]) -> C64 {
        self.vec_id.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `Σ_{m≥1} C⁽²⁾(m)` indexed `(i₁, i₁', i₂, i₂')`.
    fn two_point_sum(&self) -> Vec<C64> {
        let d = self.d;
        let d2 = d * d;
        let mut out = vec![C64::new(0.0, 0.0); d2 * d2];
        for x in 0..d2 {
            let v = self.r.mul_vec(&self.lam(x / d, x % d).mul_vec(&self.vec_chi));
            for y in 0..d2 {
                out[x * d2 + y] = self.close(&self.lam(y / d, y % d).mul_vec(&v));
            }
        }
        out
    }

    /// `Σ_{m≥2} Σ_{0<l<m} C⁽³⁾(l, m)`.
    fn three_point_sum(&self) -> Vec<C64> {
        let d = self.d;
        let d2 = d * d;
        let mut out = vec![C64::new(0.0, 0.0); d2 * d2 * d2];
        for x in 0..d2 {
            let v = self.r.mul_vec(&self.lam(x / d, x % d).mul_vec(&self.vec_chi));
            for y in 0..d2 {
                let w = self.r.mul_vec(&self.lam(y / d, y % d).mul_vec(&v));
                for z in 0..d2 {
                    out[(x * d2 + y) * d2 + z] = self.close(&self.lam(z / d, z % d).mul_vec(&w));
                }
            }
        }
        out
    }
}

/// Lindblad form of a generator in an orthonormal Hermitian operator basis.
#[derive(Clone, Debug)]
pub struct GkslDecomposition {
    pub hamiltonian: ComplexMatrix,
    /// Coefficients `a_{kl}` on the traceless basis elements.
    pub kossakowski: ComplexMatrix,
    /// Eigenvalues of the Kossakowski matrix, ascending.
    pub kossakowski_eigenvalues: Vec<f64>,
    /// `(rate, jump)` pairs with jumps normalized so `tr L†L = d`.
    pub channels: Vec<(f64, ComplexMatrix)>,
}

impl GkslDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.kossakowski_eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Orthonormal Hermitian basis: `I/√d` first, then normalized generalized
/// Gell-Mann matrices (Pauli matrices over `√2` for a qubit).
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = 1.0 / 2f64.sqrt();
    let mut out = vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -s);
            anti[(k, j)] = C64::new(0.0, s);
            out.push(sym);
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        diag.iter_mut().take(l).for_each(|x| *x = norm);
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::diag_real(&diag));
    }
    out
}

/// Splits `L` into `−i[H, ·]` plus `Σ a_{kl}(F_k · F_l† − ½{F_l†F_k, ·})`.
pub fn gksl_decomposition(gen: &Superoperator) -> Result<GkslDecomposition> {
    if gen.dim_in != gen.dim_out {
        return Err(Error::DimensionMismatch("generator must map a space to itself".into()));
    }
    let d = gen.dim_in;
    let basis = hermitian_basis(d);
    let n = basis.len();
    let frob = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 {
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum()
    };
    let mut c = ComplexMatrix::zeros(n, n);
    for mu in 0..n {
        for nu in 0..n {
            let elem = kron(&basis[mu], &basis[nu].conj())?;
            c[(mu, nu)] = frob(&elem, &gen.matrix);
        }
    }
    let a = ComplexMatrix::from_fn(n - 1, n - 1, |k, l| c[(k + 1, l + 1)]).hermitian_part();
    let mut f = ComplexMatrix::zeros(d, d);
    for k in 1..n {
        f += &basis[k].scale(c[(k, 0)]);
    }
    let f = f.scale_real(1.0 / (d as f64).sqrt());
    let hamiltonian = (&f.adjoint() - &f).scale(C64::new(0.0, -0.5));
    let spec = eig_hermitian(&a)?;
    let eigenvalues = spec.real_eigenvalues();
    let root = (d as f64).sqrt();
    let channels = (0..n - 1)
        .map(|r| {
            let v = spec.eigenvector(r);
            let mut jump = ComplexMatrix::zeros(d, d);
            for k in 0..n - 1 {
                jump += &basis[k + 1].scale(v[k]);
            }
            (eigenvalues[r] / d as f64, jump.scale_real(root))
        })
        .collect();
    Ok(GkslDecomposition { hamiltonian, kossakowski: a, kossakowski_eigenvalues: eigenvalues, channels })
}

/// `γ(L · L† − ½{L†L, ·})`.
pub fn dissipator(jump: &ComplexMatrix, rate: f64) -> Result<Superoperator> {
    let ld = jump.adjoint();
    let ll = ld.matmul(jump);
    let id = ComplexMatrix::identity(jump.rows());
    let term = Superoperator::sandwich(jump, &ld)?
        .sub(&Superoperator::sandwich(&ll, &id)?.scale_real(0.5))?
        .sub(&Superoperator::sandwich(&id, &ll)?.scale_real(0.5))?;
    Ok(term.scale_real(rate))
}

#[derive(Clone, Debug)]
pub struct NonlocalTerm {
    pub lambda: C64,
    pub multiplicity: usize,
    /// `L⁽ʲ⁾` with `K₂(m) = Σ_j λ_j^m L⁽ʲ⁾` (no `g²τ`).
    pub map: Superoperator,
}

impl NonlocalTerm {
    /// `g²τ λ/(1−λ) L⁽ʲ⁾`, the term's share of the effective generator.
    pub fn resummed(&self, g2tau: f64) -> Superoperator {
        self.map.scale(self.lambda / (1.0 - self.lambda) * g2tau)
    }
}

#[derive(Clone, Debug)]
pub struct StroboscopicGenerator {
    pub order: usize,
    pub g: f64,
    pub tau: f64,
    pub local: Superoperator,
    pub nonlocal_terms: Vec<NonlocalTerm>,
    /// `K₂(1)` piece carried by nilpotent (zero-eigenvalue) transfer modes.
    pub contact: Superoperator,
    /// `g³τ²` correction for order 2.
    pub third_order: Option<Superoperator>,
    pub effective: Superoperator,
    /// Worst mismatch of the geometric fit over `m = 1..J+2`.
    pub fit_residual: f64,
    /// Gap between the geometric fit and the closed resolvent sum.
    pub resummation_residual: f64,
    pub gksl: GkslDecomposition,
}

impl StroboscopicGenerator {
    pub fn dim(&self) -> usize {
        self.effective.dim_in
    }

    /// Largest trace produced on the matrix-unit basis.
    pub fn trace_annihilation_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let out = self.effective.apply(&ComplexMatrix::unit(d, d, a, b)).expect("square generator");
                worst = worst.max(out.trace().norm());
            }
        }
        worst
    }

    /// Largest anti-Hermitian part produced on the Hermitian basis.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermitian_basis(self.dim())
            .iter()
            .map(|f| self.effective.apply(f).expect("square generator").hermitian_deviation())
            .fold(0.0, f64::max)
    }
}

/// Solves `K₂(m) = Σ_j μ_j^{m−1} A_j` for `m = 1..J`.
fn geometric_fit(kernels: &[Superoperator], mus: &[C64]) -> Result<Vec<Superoperator>> {
    let j = mus.len();
    let ds = kernels[0].dim_in;
    let width = kernels[0].matrix.rows() * kernels[0].matrix.cols();
    let v = ComplexMatrix::from_fn(j, j, |m, c| mus[c].powu(m as u32));
    let rhs = ComplexMatrix::from_fn(j, width, |m, x| kernels[m].matrix.as_slice()[x]);
    let sol = solve(&v, &rhs)?;
    (0..j)
        .map(|c| {
            let m = ComplexMatrix::from_vec(ds * ds, ds * ds, sol.row(c).to_vec())?;
            Superoperator::from_matrix(ds, ds, m)
        })
        .collect()
}

/// Stroboscopic generator at order 1 (`g²τ` fixed) or 2 (adds `g³τ²`).
pub fn stroboscopic_generator(scenario: &CollisionScenario, order: usize) -> Result<StroboscopicGenerator> {
    stroboscopic_generator_with(scenario, order, HamiltonianPart::RequireCommuting)
}

pub fn stroboscopic_generator_with(
    scenario: &CollisionScenario,
    order: usize,
    policy: HamiltonianPart,
) -> Result<StroboscopicGenerator> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!("stroboscopic order must be 1 or 2, got {order}")));
    }
    let h = require_hamiltonian(scenario)?;
    if !scenario.env.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let spectrum = scenario.env.correlation_spectrum()?;
    spectrum.require_finite_correlation_length()?;
    let stat = stationary_scenario(scenario)?;
    let (ds, d) = (scenario.system_dim, scenario.ancilla_dim);
    let (g, tau) = (scenario.g, scenario.tau);
    let g2tau = g * g * tau;
    let rho1 = stat.env.reduced_site_density(1)?;
    let local = local_from_rho1(scenario, h, rho1.matrix(), policy)?;

    // The zero group, if present, absorbs the m = 1 contact term.
    let mut mus: Vec<C64> = Vec::new();
    let mut mults = Vec::new();
    let mut has_zero = false;
    for grp in &spectrum.decaying {
        if grp.value.norm() < ZERO_EIGENVALUE {
            has_zero = true;
        } else {
            mus.push(grp.value);
            mults.push(grp.multiplicity);
        }
    }
    if has_zero {
        mus.push(C64::new(0.0, 0.0));
    }
    let j = mus.len();
    let kernels: Vec<Superoperator> =
        (1..=j + 2).map(|m| kernel_order2_at(&stat, m, m)).collect::<Result<_>>()?;
    let mut nonlocal_terms = Vec::new();
    let mut contact = Superoperator::zero(ds);
    let mut fit_residual = 0.0;
    if j > 0 {
        let amps = geometric_fit(&kernels[..j], &mus)?;
        for (m, k) in kernels.iter().enumerate() {
            let mut model = Superoperator::zero(ds);
            for (mu, a) in mus.iter().zip(&amps) {
                model = model.add(&a.scale(mu.powu(m as u32)))?;
            }
            fit_residual = f64::max(fit_residual, k.sub(&model)?.norm());
        }
        for (idx, a) in amps.into_iter().enumerate() {
            if mus[idx].norm() < ZERO_EIGENVALUE {
                contact = a;
            } else {
                let map = a.scale(1.0 / mus[idx]).with_label(format!("L_nonlocal[{}]", nonlocal_terms.len()));
                nonlocal_terms.push(NonlocalTerm { lambda: mus[idx], multiplicity: mults[idx], map });
            }
        }
    } else {
        fit_residual = kernels.iter().map(|k| k.norm()).fold(0.0, f64::max);
    }

    let mut nonlocal = contact.clone();
    for t in &nonlocal_terms {
        nonlocal = nonlocal.add(&t.map.scale(t.lambda / (1.0 - t.lambda)))?;
    }
    let phi1 = phi_table(h, ds, d, 1)?;
    let res = Resolvent::new(&stat.env)?;
    let closed = contract_two(&res.two_point_sum(), d, &phi1, &phi1, ds)?;
    let resummation_residual = nonlocal.sub(&closed)?.norm();

    let mut effective = local.add(&nonlocal.scale_real(g2tau))?;
    let third_order = if order == 2 {
        let phi2 = phi_table(h, ds, d, 2)?;
        let phi3 = phi_table(h, ds, d, 3)?;
        let c2 = res.two_point_sum();
        let mut s3 = average(&phi3, rho1.matrix(), ds)?;
        s3 = s3.add(&contract_two(&c2, d, &phi1, &phi2, ds)?)?;
        s3 = s3.add(&contract_two(&c2, d, &phi2, &phi1, ds)?)?;
        s3 = s3.add(&contract_three(&res.three_point_sum(), d, &phi1, &phi1, &phi1, ds)?)?;
        let s3 = s3.scale_real(g * g * g * tau * tau).with_label("L_third");
        effective = effective.add(&s3)?;
        Some(s3)
    } else {
        None
    };
    let effective = effective.with_label("L_eff");
    let gksl = gksl_decomposition(&effective)?;
    Ok(StroboscopicGenerator {
        order,
        g,
        tau,
        local,
        nonlocal_terms,
        contact,
        third_order,
        effective,
        fit_residual,
        resummation_residual,
        gksl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ops::{paulis, random_density, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal() {
        for d in 2..=4 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (x, f) in b.iter().enumerate() {
                assert!(f.hermitian_deviation() < 1e-15);
                for (y, h) in b.iter().enumerate() {
                    let ip = f.adjoint().matmul(h).trace();
                    let want = if x == y { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gksl_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let h = random_hermitian(&mut rng, 2);
        let [x, _, z] = paulis();
        let jump = &x + &z.scale(C64::new(0.0, 0.5));
        let gen = Superoperator::commutator(&h)
            .unwrap()
            .add(&dissipator(&jump, 0.7).unwrap())
            .unwrap()
            .add(&dissipator(&z, -0.2).unwrap())
            .unwrap();
        let dec = gksl_decomposition(&gen).unwrap();
        let h0 = &h - &ComplexMatrix::identity(2).scale(h.trace() / 2.0);
        assert!(dec.hamiltonian.max_abs_diff(&h0) < 1e-12);
        let mut rebuilt = Superoperator::commutator(&dec.hamiltonian).unwrap();
        for (rate, l) in &dec.channels {
            rebuilt = rebuilt.add(&dissipator(l, *rate).unwrap()).unwrap();
        }
        assert!(rebuilt.sub(&gen).unwrap().norm() < 1e-12);
        assert!(!dec.is_positive(1e-10));
        let rho = random_density(&mut rng, 2);
        assert!(gen.apply(&rho).unwrap().trace().norm() < 1e-12);
    }
}
