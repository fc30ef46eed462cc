//! Correlated ancilla environments and the Markovian embedding of the
//! system dynamics.
//!
//! The environment is a right-canonical MPDO closed on the left by a bond
//! density matrix `χ₀`. Joint states live on `system ⊗ bond`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mpdo::MpdoSite;
use crate::mps::check_unitary;
use crate::numkernel::eig::{eig_general, group_eigenvalues, EigenGroup};
use crate::numkernel::{eig_hermitian, matrix_exp_skew, ComplexMatrix, DensityMatrix, SpectrumResult};
use crate::tol::{Tolerances, DEGENERACY_GAP, UNIT_EIGENVALUE_GAP};

/// Right-normalization tolerance for environment site tensors.
pub const ENV_NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum EnvSites {
    Homogeneous(MpdoSite),
    PerSite(Vec<MpdoSite>),
}

#[derive(Clone, Debug)]
pub struct EnvironmentMpdo {
    chi0: DensityMatrix,
    sites: EnvSites,
    /// `None` marks an unbounded homogeneous chain.
    length: Option<usize>,
}

impl EnvironmentMpdo {
    pub fn new(chi0: DensityMatrix, sites: EnvSites, length: Option<usize>) -> Result<Self> {
        let bond = chi0.dim();
        let check = |s: &MpdoSite| -> Result<()> {
            if s.left_dim() != bond || s.right_dim() != bond {
                return Err(Error::DimensionMismatch(format!(
                    "site bonds {}×{} do not match χ₀ of dimension {bond}",
                    s.left_dim(),
                    s.right_dim()
                )));
            }
            let dev = s.right_normalization_deviation();
            if dev > ENV_NORMALIZATION_TOL {
                return Err(Error::InvalidArgument(format!(
                    "site tensor violates right normalization by {dev:e}"
                )));
            }
            Ok(())
        };
        let length = match &sites {
            EnvSites::Homogeneous(s) => {
                check(s)?;
                length
            }
            EnvSites::PerSite(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidArgument("environment without sites".into()));
                }
                let d = list[0].physical_dim();
                for s in list {
                    check(s)?;
                    if s.physical_dim() != d {
                        return Err(Error::DimensionMismatch("ancillas of different dimensions".into()));
                    }
                }
                match length {
                    Some(n) if n != list.len() => {
                        return Err(Error::DimensionMismatch(format!(
                            "length {n} for {} site tensors",
                            list.len()
                        )))
                    }
                    _ => Some(list.len()),
                }
            }
        };
        Ok(Self { chi0, sites, length })
    }

    pub fn homogeneous(chi0: DensityMatrix, site: MpdoSite, length: Option<usize>) -> Result<Self> {
        Self::new(chi0, EnvSites::Homogeneous(site), length)
    }

    /// Uncorrelated ancillas, each in `rho`.
    pub fn factorized(rho: &DensityMatrix, length: Option<usize>) -> Result<Self> {
        Self::homogeneous(DensityMatrix::maximally_mixed(1), product_site(rho), length)
    }

    /// Uncorrelated ancillas with individual states.
    pub fn factorized_per_site(rhos: &[DensityMatrix]) -> Result<Self> {
        let sites = rhos.iter().map(product_site).collect();
        Self::new(DensityMatrix::maximally_mixed(1), EnvSites::PerSite(sites), None)
    }

    pub fn chi0(&self) -> &DensityMatrix {
        &self.chi0
    }

    pub fn sites(&self) -> &EnvSites {
        &self.sites
    }

    pub fn length(&self) -> Option<usize> {
        self.length
    }

    pub fn bond_dim(&self) -> usize {
        self.chi0.dim()
    }

    pub fn physical_dim(&self) -> usize {
        self.site(1).physical_dim()
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.sites, EnvSites::Homogeneous(_))
    }

    /// Site tensor of ancilla `k` (1-based).
    pub fn site(&self, k: usize) -> &MpdoSite {
        match &self.sites {
            EnvSites::Homogeneous(s) => s,
            EnvSites::PerSite(list) => &list[k.max(1) - 1],
        }
    }

    fn check_site(&self, k: usize) -> Result<()> {
        match self.length {
            Some(n) if k == 0 || k > n => Err(Error::IndexOutOfRange { index: k, dim: n }),
            None if k == 0 => Err(Error::IndexOutOfRange { index: k, dim: usize::MAX }),
            _ => Ok(()),
        }
    }

    /// `χ₀, …, χ_k`.
    pub fn chi_sequence(&self, k: usize) -> Result<Vec<DensityMatrix>> {
        if k > 0 {
            self.check_site(k)?;
        }
        let mut out = Vec::with_capacity(k + 1);
        out.push(self.chi0.clone());
        for m in 1..=k {
            let next = bond_step(self.site(m), &out[m - 1]);
            out.push(DensityMatrix::new_unchecked(next.hermitian_part()));
        }
        Ok(out)
    }

    /// Kraus operators of the embedding map for collision `site` on
    /// `system ⊗ bond`: `K_{jb} = Σ_i U_{ji} ⊗ (B_b^i)ᵀ` with
    /// `U_{ji} = (I ⊗ ⟨j|) U (I ⊗ |i⟩)`.
    pub fn kraus_embedding(&self, site: usize, u: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
        self.check_site(site)?;
        let s = self.site(site);
        let d = s.physical_dim();
        if u.rows() % d != 0 {
            return Err(Error::DimensionMismatch("unitary does not act on system ⊗ ancilla".into()));
        }
        let ds = u.rows() / d;
        check_unitary(u, ds * d)?;
        let blocks: Vec<Vec<ComplexMatrix>> =
            (0..d).map(|j| (0..d).map(|i| ancilla_block(u, ds, d, j, i)).collect()).collect();
        let mut out = Vec::with_capacity(d * s.kraus_count());
        for bj in &blocks {
            for b in 0..s.kraus_count() {
                let mut k = ComplexMatrix::zeros(ds * self.bond_dim(), ds * self.bond_dim());
                for (i, uji) in bj.iter().enumerate() {
                    k += &uji.kron_unchecked(&s.slice(i, b).transpose());
                }
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Reduced state of the initial environment on ancillas `sites`
    /// (1-based, strictly increasing), ordered as given.
    pub fn reduced_density(&self, sites: &[usize]) -> Result<DensityMatrix> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("no sites requested".into()));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("sites must be strictly increasing".into()));
        }
        for &s in sites {
            self.check_site(s)?;
        }
        let d = self.physical_dim();
        let dim = crate::mps::checked_product(&vec![d; sites.len()], crate::mpdo::DENSITY_DIM_CAP)?;
        // Left environment before the first requested site.
        let first = sites[0];
        let left = self.chi_sequence(first - 1)?.pop().expect("nonempty").into_matrix();
        // blocks[(p, p')] holds the bond operator for physical multi-index
        // pair (p, p') of the sites visited so far.
        let mut blocks: Vec<ComplexMatrix> = vec![left];
        let mut pd = 1usize;
        let mut pos = first;
        for (n, &s) in sites.iter().enumerate() {
            if n > 0 {
                while pos < s {
                    let site = self.site(pos);
                    blocks = blocks.iter().map(|f| bond_step(site, f)).collect();
                    pos += 1;
                }
            }
            let site = self.site(s);
            let npd = pd * d;
            let mut next = vec![ComplexMatrix::zeros(0, 0); npd * npd];
            for p in 0..pd {
                for pp in 0..pd {
                    let f = &blocks[p * pd + pp];
                    for i in 0..d {
                        for ip in 0..d {
                            next[(p * d + i) * npd + pp * d + ip] = lambda_map(site, i, ip, f);
                        }
                    }
                }
            }
            blocks = next;
            pd = npd;
            pos = s + 1;
        }
        debug_assert_eq!(pd, dim);
        let rho = ComplexMatrix::from_fn(pd, pd, |p, pp| blocks[p * pd + pp].trace());
        Ok(DensityMatrix::new_unchecked(rho))
    }

    pub fn reduced_site_density(&self, site: usize) -> Result<DensityMatrix> {
        self.reduced_density(&[site])
    }

    pub fn reduced_two_site_density(&self, s1: usize, s2: usize) -> Result<DensityMatrix> {
        if s1 >= s2 {
            return Err(Error::InvalidArgument(format!("site pair ({s1}, {s2}) is not increasing")));
        }
        self.reduced_density(&[s1, s2])
    }

    /// `T = Σ_i M^{ii}`, shape `D² × D²`.
    pub fn transfer_matrix(&self) -> Result<ComplexMatrix> {
        let site = match &self.sites {
            EnvSites::Homogeneous(s) => s,
            EnvSites::PerSite(_) => return Err(Error::NotHomogeneous),
        };
        let d2 = self.bond_dim() * self.bond_dim();
        let mut t = ComplexMatrix::zeros(d2, d2);
        for i in 0..site.physical_dim() {
            t += &site.m_tensor(i, i)?;
        }
        Ok(t)
    }

    pub fn correlation_spectrum(&self) -> Result<CorrelationSpectrum> {
        CorrelationSpectrum::of(&self.transfer_matrix()?)
    }

    /// Fixed point of the bond recurrence, from the unit eigenvector of the
    /// bond map. Fails when the unit eigenvalue is degenerate.
    pub fn stationary_chi(&self) -> Result<DensityMatrix> {
        let spec = self.correlation_spectrum()?;
        spec.require_finite_correlation_length()?;
        let bond = self.bond_dim();
        // The bond map acts on row-major vec(F) as Tᵀ.
        let t = self.transfer_matrix()?.transpose();
        let s = eig_general(&t)?;
        let k = (0..s.eigenvalues.len())
            .min_by(|&a, &b| {
                (s.eigenvalues[a] - 1.0).norm().partial_cmp(&(s.eigenvalues[b] - 1.0).norm()).unwrap()
            })
            .expect("nonempty spectrum");
        let v = s.eigenvector(k);
        let f = ComplexMatrix::from_vec(bond, bond, v)?;
        let f = f.scale(1.0 / f.trace());
        Ok(DensityMatrix::new_unchecked(f.hermitian_part()))
    }

    /// Same environment with `χ₀` replaced.
    pub fn with_chi0(&self, chi0: DensityMatrix) -> Result<Self> {
        Self::new(chi0, self.sites.clone(), self.length)
    }

    /// Same environment with a different length.
    pub fn with_length(&self, length: Option<usize>) -> Result<Self> {
        match &self.sites {
            EnvSites::Homogeneous(_) => Self::new(self.chi0.clone(), self.sites.clone(), length),
            EnvSites::PerSite(list) => match length {
                Some(n) if n <= list.len() => {
                    Self::new(self.chi0.clone(), EnvSites::PerSite(list[..n].to_vec()), Some(n))
                }
                _ => Err(Error::InvalidArgument("per-site environments cannot be extended".into())),
            },
        }
    }
}

/// Single-site, bond-dimension-1 tensor for an uncorrelated ancilla:
/// `B_b^i = √λ_b ψ_b[i]`.
fn product_site(rho: &DensityMatrix) -> MpdoSite {
    let terms = rho.spectral_terms(crate::mpdo::SPECTRAL_CUTOFF);
    let d = rho.dim();
    let slices = (0..d)
        .map(|i| {
            terms
                .iter()
                .map(|(l, v)| ComplexMatrix::diag(&[v[i] * l.sqrt()]))
                .collect()
        })
        .collect();
    MpdoSite::new(slices).expect("consistent shapes")
}

/// `Λ_{ii'}[F] = Σ_b (B_b^i)ᵀ F conj(B_b^{i'})`.
pub fn lambda_map(site: &MpdoSite, i: usize, ip: usize, f: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(site.right_dim(), site.right_dim());
    for (b, bp) in site.kraus_family(i).iter().zip(site.kraus_family(ip)) {
        out += &b.transpose().matmul(f).matmul(&bp.conj());
    }
    out
}

/// `Σ_i Λ_{ii}[F]`.
pub fn bond_step(site: &MpdoSite, f: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(site.right_dim(), site.right_dim());
    for i in 0..site.physical_dim() {
        out += &lambda_map(site, i, i, f);
    }
    out
}

/// `(I ⊗ ⟨j|) U (I ⊗ |i⟩)` on the system.
pub fn ancilla_block(u: &ComplexMatrix, ds: usize, d: usize, j: usize, i: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(ds, ds, |a, s| u[(a * d + j, s * d + i)])
}

/// Spectrum of a transfer matrix, sorted by descending modulus.
#[derive(Clone, Debug)]
pub struct CorrelationSpectrum {
    pub spectrum: SpectrumResult,
    /// Number of eigenvalues within `UNIT_EIGENVALUE_GAP` of 1.
    pub unit_count: usize,
    /// Eigenvalues away from 1, grouped by degeneracy.
    pub decaying: Vec<EigenGroup>,
}

impl CorrelationSpectrum {
    pub fn of(t: &ComplexMatrix) -> Result<Self> {
        let raw = eig_general(t)?;
        let order = raw.order_by_modulus();
        let eigenvalues: Vec<C64> = order.iter().map(|&k| raw.eigenvalues[k]).collect();
        let eigenvectors = ComplexMatrix::from_fn(t.rows(), t.rows(), |r, c| raw.eigenvectors[(r, order[c])]);
        let unit_count = eigenvalues.iter().filter(|l| (*l - 1.0).norm() < UNIT_EIGENVALUE_GAP).count();
        let rest: Vec<C64> =
            eigenvalues.iter().copied().filter(|l| (*l - 1.0).norm() >= UNIT_EIGENVALUE_GAP).collect();
        Ok(Self {
            spectrum: SpectrumResult { eigenvalues, eigenvectors, is_hermitian_path: false },
            unit_count,
            decaying: group_eigenvalues(&rest, DEGENERACY_GAP),
        })
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.spectrum.eigenvalues
    }

    /// Largest modulus among eigenvalues other than the unit one.
    pub fn subleading_modulus(&self) -> f64 {
        self.decaying.iter().map(|g| g.value.norm()).fold(0.0, f64::max)
    }

    pub fn has_finite_correlation_length(&self) -> bool {
        self.unit_count == 1 && self.subleading_modulus() < 1.0 - UNIT_EIGENVALUE_GAP
    }

    pub fn require_finite_correlation_length(&self) -> Result<()> {
        if self.unit_count != 1 {
            return Err(Error::InfiniteCorrelationLength(format!(
                "unit transfer eigenvalue has multiplicity {}",
                self.unit_count
            )));
        }
        let sub = self.subleading_modulus();
        if sub >= 1.0 - UNIT_EIGENVALUE_GAP {
            return Err(Error::InfiniteCorrelationLength(format!(
                "subleading transfer eigenvalue has modulus {sub}"
            )));
        }
        Ok(())
    }

    /// `−1 / ln|λ₂|`, infinite for degenerate unit eigenvalues.
    pub fn correlation_length(&self) -> f64 {
        if !self.has_finite_correlation_length() {
            return f64::INFINITY;
        }
        let sub = self.subleading_modulus();
        if sub == 0.0 {
            0.0
        } else {
            -1.0 / sub.ln()
        }
    }
}

/// How the system couples to each ancilla.
#[derive(Clone, Debug)]
pub enum Interaction {
    /// Dimensionless Hermitian `H` with `‖H‖ ≤ 1`; `U = exp(−i gτ H)`.
    Hamiltonian(ComplexMatrix),
    Unitary(ComplexMatrix),
}

/// Operator-norm slack allowed for interaction Hamiltonians.
pub const HAMILTONIAN_NORM_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CollisionScenario {
    pub system_dim: usize,
    pub ancilla_dim: usize,
    pub interaction: Interaction,
    pub g: f64,
    pub tau: f64,
    pub rho_s0: DensityMatrix,
    pub env: EnvironmentMpdo,
    pub steps: usize,
}

impl CollisionScenario {
    pub fn new(
        interaction: Interaction,
        g: f64,
        tau: f64,
        rho_s0: DensityMatrix,
        env: EnvironmentMpdo,
        steps: usize,
    ) -> Result<Self> {
        let s = Self {
            system_dim: rho_s0.dim(),
            ancilla_dim: env.physical_dim(),
            interaction,
            g,
            tau,
            rho_s0,
            env,
            steps,
        };
        s.validate(&Tolerances::default())?;
        Ok(s)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let dim = self.system_dim * self.ancilla_dim;
        if !(self.tau > 0.0 && self.tau.is_finite() && self.g.is_finite()) {
            return Err(Error::InvalidArgument(format!("need τ > 0 and finite g, got g={}, τ={}", self.g, self.tau)));
        }
        match &self.interaction {
            Interaction::Hamiltonian(h) => {
                if h.shape() != (dim, dim) {
                    return Err(Error::DimensionMismatch(format!(
                        "Hamiltonian has shape {:?}, expected {dim}×{dim}",
                        h.shape()
                    )));
                }
                let dev = h.hermitian_deviation();
                if dev > tol.herm {
                    return Err(Error::NotHermitian { deviation: dev, tol: tol.herm });
                }
                let spec = eig_hermitian(&h.hermitian_part())?;
                let norm = spec.real_eigenvalues().iter().fold(0.0f64, |a, l| a.max(l.abs()));
                if norm > 1.0 + HAMILTONIAN_NORM_SLACK {
                    return Err(Error::HamiltonianNorm { norm });
                }
            }
            Interaction::Unitary(u) => {
                if u.shape() != (dim, dim) {
                    return Err(Error::DimensionMismatch(format!(
                        "unitary has shape {:?}, expected {dim}×{dim}",
                        u.shape()
                    )));
                }
                let dev = u.unitarity_deviation();
                if dev > tol.unitary {
                    return Err(Error::NotUnitary { deviation: dev, tol: tol.unitary });
                }
            }
        }
        if let Some(n) = self.env.length() {
            if self.steps > n {
                return Err(Error::InvalidArgument(format!(
                    "{} steps requested but the environment has {n} ancillas",
                    self.steps
                )));
            }
        }
        Ok(())
    }

    pub fn g_tau(&self) -> f64 {
        self.g * self.tau
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        match &self.interaction {
            Interaction::Hamiltonian(h) => Some(h),
            Interaction::Unitary(_) => None,
        }
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match &self.interaction {
            Interaction::Hamiltonian(h) => matrix_exp_skew(h, self.g_tau()),
            Interaction::Unitary(u) => Ok(u.clone()),
        }
    }

    /// Same scenario at coupling `g_tau / τ`.
    pub fn with_g_tau(&self, g_tau: f64) -> Self {
        Self { g: g_tau / self.tau, ..self.clone() }
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self { steps, ..self.clone() }
    }

    pub fn with_initial_state(&self, rho: DensityMatrix) -> Self {
        Self { rho_s0: rho, ..self.clone() }
    }

    pub fn joint_dim(&self) -> usize {
        self.system_dim * self.env.bond_dim()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub joint_states: Option<Vec<DensityMatrix>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn apply_kraus(kraus: &[ComplexMatrix], r: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(r.rows(), r.cols());
    for k in kraus {
        out += &k.sandwich(r);
    }
    out
}

/// `tr_bond` of a `system ⊗ bond` operator.
pub fn trace_bond(r: &ComplexMatrix, ds: usize, bond: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(ds, ds, |a, b| (0..bond).map(|x| r[(a * bond + x, b * bond + x)]).sum())
}

pub fn evolve(scenario: &CollisionScenario) -> Result<Trajectory> {
    evolve_with(scenario, false)
}

/// Propagates `ρ_S ⊗ χ₀` through the embedding maps; the joint state is
/// never re-factorized.
pub fn evolve_with(scenario: &CollisionScenario, keep_joint: bool) -> Result<Trajectory> {
    scenario.validate(&Tolerances::default())?;
    let env = &scenario.env;
    let (ds, bond) = (scenario.system_dim, env.bond_dim());
    let u = scenario.unitary()?;
    let shared = if env.is_homogeneous() { Some(env.kraus_embedding(1, &u)?) } else { None };
    let mut r = scenario.rho_s0.kron_unchecked(env.chi0());
    let mut times = Vec::with_capacity(scenario.steps + 1);
    let mut states = Vec::with_capacity(scenario.steps + 1);
    let mut joints = keep_joint.then(|| Vec::with_capacity(scenario.steps + 1));
    for k in 0..=scenario.steps {
        if k > 0 {
            r = match &shared {
                Some(kr) => apply_kraus(kr, &r),
                None => apply_kraus(&env.kraus_embedding(k, &u)?, &r),
            };
        }
        times.push(k as f64 * scenario.tau);
        states.push(DensityMatrix::new_unchecked(trace_bond(&r, ds, bond)));
        if let Some(j) = joints.as_mut() {
            j.push(DensityMatrix::new_unchecked(r.clone()));
        }
        if !r.is_finite() {
            return Err(Error::Unstable { t: k as f64 * scenario.tau });
        }
    }
    Ok(Trajectory { times, states, joint_states: joints })
}
