//! Pure-state matrix product states produced by sequential collisions.
//!
//! Global ordering of a contracted chain is `(ancilla 1, …, ancilla n,
//! system)`. Bond indices label the computational basis of the system.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::ops::vector_norm;
use crate::numkernel::{entropy_of_spectrum, eig_hermitian, ComplexMatrix, DensityMatrix};
use crate::tol::TOL_UNITARY;

/// Largest state vector `contract_statevector` will build.
pub const STATE_DIM_CAP: usize = 1 << 16;

/// One MPS site: a `left × right` matrix per physical index.
#[derive(Clone, Debug)]
pub struct MpsSite {
    slices: Vec<ComplexMatrix>,
}

impl MpsSite {
    pub fn new(slices: Vec<ComplexMatrix>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::InvalidArgument("site without physical index".into()))?;
        if slices.iter().any(|s| s.shape() != first.shape()) {
            return Err(Error::DimensionMismatch("site slices of different shapes".into()));
        }
        Ok(Self { slices })
    }

    pub fn physical_dim(&self) -> usize {
        self.slices.len()
    }

    pub fn left_dim(&self) -> usize {
        self.slices[0].rows()
    }

    pub fn right_dim(&self) -> usize {
        self.slices[0].cols()
    }

    pub fn slice(&self, i: usize) -> &ComplexMatrix {
        &self.slices[i]
    }

    pub fn slices(&self) -> &[ComplexMatrix] {
        &self.slices
    }

    /// `max |Σ_i A^i A^i† − I|`.
    pub fn right_normalization_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.left_dim(), self.left_dim());
        for a in &self.slices {
            acc += &a.matmul(&a.adjoint());
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.left_dim()))
    }
}

#[derive(Clone, Debug)]
pub struct MpsChain {
    sites: Vec<MpsSite>,
}

/// Per-site right-normalization deviations.
#[derive(Clone, Debug)]
pub struct NormalizationReport {
    pub deviations: Vec<f64>,
    pub tol: f64,
}

impl NormalizationReport {
    pub fn passed(&self) -> bool {
        self.deviations.iter().all(|&d| d <= self.tol)
    }

    pub fn worst(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    /// First site (0-based) whose deviation exceeds the tolerance.
    pub fn first_failure(&self) -> Option<usize> {
        self.deviations.iter().position(|&d| d > self.tol)
    }
}

impl MpsChain {
    pub fn new(sites: Vec<MpsSite>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("empty chain".into()));
        }
        if sites[0].left_dim() != 1 || sites[sites.len() - 1].right_dim() != 1 {
            return Err(Error::DimensionMismatch("chain boundary bonds must be 1".into()));
        }
        for w in sites.windows(2) {
            if w[0].right_dim() != w[1].left_dim() {
                return Err(Error::DimensionMismatch("adjacent bond dimensions differ".into()));
            }
        }
        Ok(Self { sites })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[MpsSite] {
        &self.sites
    }

    pub fn site(&self, k: usize) -> &MpsSite {
        &self.sites[k]
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.sites.iter().map(MpsSite::physical_dim).collect()
    }

    /// Number of stored complex entries.
    pub fn storage_len(&self) -> usize {
        self.sites
            .iter()
            .map(|s| s.physical_dim() * s.left_dim() * s.right_dim())
            .sum()
    }

    pub fn amplitude(&self, indices: &[usize]) -> Result<C64> {
        if indices.len() != self.sites.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} indices for a chain of {} sites",
                indices.len(),
                self.sites.len()
            )));
        }
        let mut row = vec![C64::new(1.0, 0.0)];
        for (site, &i) in self.sites.iter().zip(indices) {
            if i >= site.physical_dim() {
                return Err(Error::IndexOutOfRange { index: i, dim: site.physical_dim() });
            }
            row = vec_mat(&row, site.slice(i));
        }
        Ok(row[0])
    }

    /// Dense state vector in `(site 1, …, site N)` ordering.
    pub fn contract_statevector(&self) -> Result<Vec<C64>> {
        self.contract_statevector_capped(STATE_DIM_CAP)
    }

    pub fn contract_statevector_capped(&self, cap: usize) -> Result<Vec<C64>> {
        let total = checked_product(&self.physical_dims(), cap)?;
        let block = self.contract_prefix(self.sites.len(), cap)?;
        debug_assert_eq!(block.shape(), (total, 1));
        Ok(block.into_vec())
    }

    /// Matrix with rows indexed by the physical prefix of sites `1..=k`
    /// and columns by the open right bond.
    fn contract_prefix(&self, k: usize, cap: usize) -> Result<ComplexMatrix> {
        checked_product(&self.physical_dims()[..k], cap)?;
        let mut acc = ComplexMatrix::identity(1);
        for site in &self.sites[..k] {
            let d = site.physical_dim();
            let r = site.right_dim();
            let mut next = ComplexMatrix::zeros(acc.rows() * d, r);
            for i in 0..d {
                let part = acc.matmul(site.slice(i));
                for p in 0..acc.rows() {
                    for c in 0..r {
                        next[(p * d + i, c)] = part[(p, c)];
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn check_right_normalization(&self, tol: f64) -> NormalizationReport {
        NormalizationReport {
            deviations: self.sites.iter().map(MpsSite::right_normalization_deviation).collect(),
            tol,
        }
    }

    /// State of the first `k` sites, contracting only those sites and
    /// closing the open bond with the identity.
    pub fn reduced_density_left(&self, k: usize) -> Result<DensityMatrix> {
        if k == 0 || k > self.sites.len() {
            return Err(Error::IndexOutOfRange { index: k, dim: self.sites.len() });
        }
        let block = self.contract_prefix(k, STATE_DIM_CAP)?;
        Ok(DensityMatrix::new_unchecked(block.matmul(&block.adjoint())))
    }

    /// Entropy of the first `k` sites from the bond-space Gram matrix
    /// `Σ (A¹⋯Aᵏ)† (A¹⋯Aᵏ)`, which shares the nonzero spectrum of the
    /// reduced state.
    pub fn entanglement_entropy_cut(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.sites.len() {
            return Err(Error::IndexOutOfRange { index: k, dim: self.sites.len() });
        }
        let mut gram = ComplexMatrix::identity(1);
        for site in &self.sites[..k] {
            let mut next = ComplexMatrix::zeros(site.right_dim(), site.right_dim());
            for a in site.slices() {
                next += &a.adjoint().matmul(&gram).matmul(a);
            }
            gram = next;
        }
        let spec = eig_hermitian(&gram.hermitian_part())?;
        Ok(entropy_of_spectrum(&spec.real_eigenvalues()))
    }
}

fn vec_mat(row: &[C64], m: &ComplexMatrix) -> Vec<C64> {
    (0..m.cols())
        .map(|c| row.iter().enumerate().map(|(r, x)| x * m[(r, c)]).sum())
        .collect()
}

pub(crate) fn checked_product(dims: &[usize], cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for &d in dims {
        total = total.checked_mul(d).filter(|&t| t <= cap).ok_or(Error::DimensionCap {
            requested: dims.iter().fold(1f64, |a, &d| a * d as f64) as usize,
            cap,
        })?;
    }
    Ok(total)
}

pub(crate) fn check_unitary(u: &ComplexMatrix, dim: usize) -> Result<()> {
    if u.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "collision unitary has shape {:?}, expected {dim}×{dim}",
            u.shape()
        )));
    }
    let dev = u.unitarity_deviation();
    if dev > TOL_UNITARY {
        return Err(Error::NotUnitary { deviation: dev, tol: TOL_UNITARY });
    }
    Ok(())
}

pub(crate) fn check_state(v: &[C64], dim: usize, what: &str) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch(format!("{what} has length {}, expected {dim}", v.len())));
    }
    let norm = vector_norm(v);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `⟨a|⟨i| U |s⟩|j⟩` with `U` acting on system ⊗ ancilla.
#[inline]
pub(crate) fn u_elem(u: &ComplexMatrix, d: usize, a: usize, i: usize, s: usize, j: usize) -> C64 {
    u[(a * d + i, s * d + j)]
}

/// Slices `X^i_{s,a} = ⟨a|⟨i| U |s⟩|ψ⟩` for a fixed ancilla vector `ψ`.
pub(crate) fn collision_slices(u: &ComplexMatrix, ds: usize, psi: &[C64]) -> Vec<ComplexMatrix> {
    let d = psi.len();
    (0..d)
        .map(|i| {
            ComplexMatrix::from_fn(ds, ds, |s, a| (0..d).map(|j| u_elem(u, d, a, i, s, j) * psi[j]).sum())
        })
        .collect()
}

/// Terminal tensor `A^i_{a,1} = δ_{a,i}`.
pub(crate) fn terminal_site(ds: usize) -> Vec<ComplexMatrix> {
    (0..ds).map(|i| ComplexMatrix::unit(ds, 1, i, 0)).collect()
}

/// MPS of the system and `n` ancillas after `n` collisions, one unitary
/// per collision.
pub fn build_standard_mps_per_collision(
    unitaries: &[ComplexMatrix],
    phi: &[C64],
    psis: &[Vec<C64>],
) -> Result<MpsChain> {
    if psis.is_empty() {
        return Err(Error::InvalidArgument("at least one ancilla is required".into()));
    }
    if unitaries.len() != psis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries for {} ancillas",
            unitaries.len(),
            psis.len()
        )));
    }
    let ds = phi.len();
    let d = psis[0].len();
    check_state(phi, ds, "system state")?;
    for (k, (u, psi)) in unitaries.iter().zip(psis).enumerate() {
        check_unitary(u, ds * d)?;
        check_state(psi, d, &format!("ancilla {} state", k + 1))?;
    }
    let mut sites = Vec::with_capacity(psis.len() + 1);
    for (k, (u, psi)) in unitaries.iter().zip(psis).enumerate() {
        let bulk = collision_slices(u, ds, psi);
        let slices = if k == 0 {
            bulk.iter().map(|x| ComplexMatrix::column_vector(phi).transpose().matmul(x)).collect()
        } else {
            bulk
        };
        sites.push(MpsSite::new(slices)?);
    }
    sites.push(MpsSite::new(terminal_site(ds))?);
    MpsChain::new(sites)
}

/// Same collision unitary for every ancilla.
pub fn build_standard_mps(u: &ComplexMatrix, phi: &[C64], psis: &[Vec<C64>]) -> Result<MpsChain> {
    let us = vec![u.clone(); psis.len()];
    build_standard_mps_per_collision(&us, phi, psis)
}
