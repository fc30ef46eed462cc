//! Right-canonical matrix product density operators from the collision
//! model with mixed inputs.
//!
//! Each site holds a family `B_b^i` (physical index `i`, Kraus index `b`)
//! and the density operator is `Σ_{i,i'} (Π_k M_k^{i_k i'_k}) |i⟩⟨i'|` with
//! `M^{ii'} = Σ_b B_b^i ⊗ conj(B_b^{i'})`.

use crate::error::{Error, Result};
use crate::mps::{check_unitary, checked_product, collision_slices, terminal_site, NormalizationReport};
use crate::numkernel::{kron, ComplexMatrix, DensityMatrix};

/// Largest density-matrix dimension the dense contractions will build.
pub const DENSITY_DIM_CAP: usize = 1 << 12;

/// Eigenvalues of input states below this are dropped.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MpdoSite {
    /// `slices[i][b]`, each `left × right`.
    slices: Vec<Vec<ComplexMatrix>>,
}

impl MpdoSite {
    pub fn new(slices: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let first = slices
            .first()
            .and_then(|s| s.first())
            .ok_or_else(|| Error::InvalidArgument("site without physical or Kraus index".into()))?
            .shape();
        let kraus = slices[0].len();
        for per_i in &slices {
            if per_i.len() != kraus || per_i.iter().any(|b| b.shape() != first) {
                return Err(Error::DimensionMismatch("inconsistent MPDO site slices".into()));
            }
        }
        Ok(Self { slices })
    }

    /// A single-Kraus site from MPS slices.
    pub fn from_pure(slices: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(slices.into_iter().map(|a| vec![a]).collect())
    }

    pub fn physical_dim(&self) -> usize {
        self.slices.len()
    }

    pub fn kraus_count(&self) -> usize {
        self.slices[0].len()
    }

    pub fn left_dim(&self) -> usize {
        self.slices[0][0].rows()
    }

    pub fn right_dim(&self) -> usize {
        self.slices[0][0].cols()
    }

    pub fn slice(&self, i: usize, b: usize) -> &ComplexMatrix {
        &self.slices[i][b]
    }

    pub fn kraus_family(&self, i: usize) -> &[ComplexMatrix] {
        &self.slices[i]
    }

    pub fn storage_len(&self) -> usize {
        self.physical_dim() * self.kraus_count() * self.left_dim() * self.right_dim()
    }

    /// `Σ_b B_b^i ⊗ conj(B_b^{i'})`, shape `left² × right²`.
    pub fn m_tensor(&self, i: usize, ip: usize) -> Result<ComplexMatrix> {
        let d = self.physical_dim();
        for idx in [i, ip] {
            if idx >= d {
                return Err(Error::IndexOutOfRange { index: idx, dim: d });
            }
        }
        let (l, r) = (self.left_dim(), self.right_dim());
        let mut m = ComplexMatrix::zeros(l * l, r * r);
        for (b, bp) in self.slices[i].iter().zip(&self.slices[ip]) {
            m += &kron(b, &bp.conj())?;
        }
        Ok(m)
    }

    /// `max |Σ_{i,b} B B† − I|`.
    pub fn right_normalization_deviation(&self) -> f64 {
        let l = self.left_dim();
        let mut acc = ComplexMatrix::zeros(l, l);
        for b in self.slices.iter().flatten() {
            acc += &b.matmul(&b.adjoint());
        }
        acc.max_abs_diff(&ComplexMatrix::identity(l))
    }
}

#[derive(Clone, Debug)]
pub struct MpdoChain {
    sites: Vec<MpdoSite>,
}

impl MpdoChain {
    pub fn new(sites: Vec<MpdoSite>) -> Result<Self> {
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

    pub fn sites(&self) -> &[MpdoSite] {
        &self.sites
    }

    pub fn site(&self, k: usize) -> &MpdoSite {
        &self.sites[k]
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.sites.iter().map(MpdoSite::physical_dim).collect()
    }

    pub fn storage_len(&self) -> usize {
        self.sites.iter().map(MpdoSite::storage_len).sum()
    }

    pub fn check_right_normalization(&self, tol: f64) -> NormalizationReport {
        NormalizationReport {
            deviations: self.sites.iter().map(MpdoSite::right_normalization_deviation).collect(),
            tol,
        }
    }

    /// Contracts sites `1..=k`. Rows are `(p, p')` pairs of physical
    /// prefixes, columns `(a, a')` pairs of the open bond.
    fn contract_prefix(&self, k: usize) -> Result<(usize, ComplexMatrix)> {
        let dim = checked_product(&self.physical_dims()[..k], DENSITY_DIM_CAP)?;
        let mut acc = ComplexMatrix::identity(1);
        let mut pd = 1usize;
        for site in &self.sites[..k] {
            let d = site.physical_dim();
            let r2 = site.right_dim() * site.right_dim();
            let npd = pd * d;
            let mut next = ComplexMatrix::zeros(npd * npd, r2);
            for i in 0..d {
                for ip in 0..d {
                    let part = acc.matmul(&site.m_tensor(i, ip)?);
                    for p in 0..pd {
                        for pp in 0..pd {
                            let row = (p * d + i) * npd + (pp * d + ip);
                            for c in 0..r2 {
                                next[(row, c)] = part[(p * pd + pp, c)];
                            }
                        }
                    }
                }
            }
            acc = next;
            pd = npd;
        }
        debug_assert_eq!(pd, dim);
        Ok((pd, acc))
    }

    fn close(pd: usize, bond: usize, acc: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(pd, pd, |p, pp| (0..bond).map(|a| acc[(p * pd + pp, a * bond + a)]).sum())
    }

    /// Full density operator in `(site 1, …, site N)` ordering.
    pub fn contract_density(&self) -> Result<DensityMatrix> {
        let (pd, acc) = self.contract_prefix(self.sites.len())?;
        Ok(DensityMatrix::new_unchecked(Self::close(pd, 1, &acc)))
    }

    /// State of the first `k` sites, contracting only those sites.
    pub fn reduced_density_first_k(&self, k: usize) -> Result<DensityMatrix> {
        if k == 0 || k > self.sites.len() {
            return Err(Error::IndexOutOfRange { index: k, dim: self.sites.len() });
        }
        let (pd, acc) = self.contract_prefix(k)?;
        let bond = self.sites[k - 1].right_dim();
        Ok(DensityMatrix::new_unchecked(Self::close(pd, bond, &acc)))
    }
}

/// MPDO of the system and `n` ancillas after `n` collisions, one unitary
/// per collision.
pub fn build_standard_mpdo_per_collision(
    unitaries: &[ComplexMatrix],
    rho_s: &DensityMatrix,
    rhos: &[DensityMatrix],
) -> Result<MpdoChain> {
    if rhos.is_empty() {
        return Err(Error::InvalidArgument("at least one ancilla is required".into()));
    }
    if unitaries.len() != rhos.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries for {} ancillas",
            unitaries.len(),
            rhos.len()
        )));
    }
    let ds = rho_s.dim();
    let d = rhos[0].dim();
    for (u, rho) in unitaries.iter().zip(rhos) {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch("ancillas of different dimensions".into()));
        }
        check_unitary(u, ds * d)?;
    }
    let sys_terms = rho_s.spectral_terms(SPECTRAL_CUTOFF);
    let mut sites = Vec::with_capacity(rhos.len() + 1);
    for (k, (u, rho)) in unitaries.iter().zip(rhos).enumerate() {
        let anc_terms = rho.spectral_terms(SPECTRAL_CUTOFF);
        let mut slices: Vec<Vec<ComplexMatrix>> = vec![Vec::new(); d];
        if k == 0 {
            // b = l·rank_anc + m
            for (ls, phi) in &sys_terms {
                let row = ComplexMatrix::column_vector(phi).transpose();
                for (lm, psi) in &anc_terms {
                    let w = (ls * lm).sqrt();
                    for (i, x) in collision_slices(u, ds, psi).iter().enumerate() {
                        slices[i].push(row.matmul(x).scale_real(w));
                    }
                }
            }
        } else {
            for (lm, psi) in &anc_terms {
                for (i, x) in collision_slices(u, ds, psi).iter().enumerate() {
                    slices[i].push(x.scale_real(lm.sqrt()));
                }
            }
        }
        sites.push(MpdoSite::new(slices)?);
    }
    sites.push(MpdoSite::from_pure(terminal_site(ds))?);
    MpdoChain::new(sites)
}

pub fn build_standard_mpdo(
    u: &ComplexMatrix,
    rho_s: &DensityMatrix,
    rhos: &[DensityMatrix],
) -> Result<MpdoChain> {
    let us = vec![u.clone(); rhos.len()];
    build_standard_mpdo_per_collision(&us, rho_s, rhos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::build_standard_mps;
    use crate::numkernel::ops::{random_density, random_state, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_inputs_reduce_to_mps_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = random_unitary(&mut rng, 6);
        let phi = random_state(&mut rng, 2);
        let psis: Vec<_> = (0..3).map(|_| random_state(&mut rng, 3)).collect();
        let rho_s = DensityMatrix::pure(&phi).unwrap();
        let rhos: Vec<_> = psis.iter().map(|p| DensityMatrix::pure(p).unwrap()).collect();
        let mpdo = build_standard_mpdo(&u, &rho_s, &rhos).unwrap();
        assert!(mpdo.sites().iter().all(|s| s.kraus_count() == 1));
        let v = build_standard_mps(&u, &phi, &psis).unwrap().contract_statevector().unwrap();
        let proj = ComplexMatrix::outer(&v, &v);
        assert!(mpdo.contract_density().unwrap().max_abs_diff(&proj) < 1e-12);
    }

    #[test]
    fn m_tensor_of_single_kraus_site() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Vec<_> = (0..2).map(|_| crate::numkernel::ops::random_matrix(&mut rng, 2, 3)).collect();
        let site = MpdoSite::from_pure(a.clone()).unwrap();
        let m = site.m_tensor(0, 1).unwrap();
        assert!(m.max_abs_diff(&kron(&a[0], &a[1].conj()).unwrap()) < 1e-15);
        assert!(site.m_tensor(2, 0).is_err());
    }

    #[test]
    fn zeroed_slice_fails_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = random_unitary(&mut rng, 4);
        let rho = DensityMatrix::new(random_density(&mut rng, 2)).unwrap();
        let chain = build_standard_mpdo(&u, &rho, &vec![rho.clone(); 2]).unwrap();
        let report = chain.check_right_normalization(1e-12);
        assert!(report.passed());
        assert_eq!(report.deviations[2], 0.0);
        let mut slices: Vec<Vec<ComplexMatrix>> =
            (0..2).map(|i| chain.site(1).kraus_family(i).to_vec()).collect();
        slices[0][0] = ComplexMatrix::zeros(2, 2);
        let broken = MpdoSite::new(slices).unwrap();
        assert!(broken.right_normalization_deviation() > 1e-3);
    }

    #[test]
    fn identity_collision_gives_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho_s = DensityMatrix::new(random_density(&mut rng, 2)).unwrap();
        let rhos: Vec<_> = (0..2).map(|_| DensityMatrix::new(random_density(&mut rng, 2)).unwrap()).collect();
        let chain = build_standard_mpdo(&ComplexMatrix::identity(4), &rho_s, &rhos).unwrap();
        let r2 = chain.reduced_density_first_k(2).unwrap();
        let want = kron(&rhos[0], &rhos[1]).unwrap();
        assert!(r2.max_abs_diff(&want) < 1e-13);
    }
}
