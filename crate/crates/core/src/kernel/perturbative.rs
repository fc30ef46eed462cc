//! Expansion of the memory kernel in powers of `gτ`.
//!
//! `Φ^{(n)}_{ii'}` is the order-`n` part of `ρ ↦ tr_anc[U (ρ ⊗ |i⟩⟨i'|) U†]`
//! and the kernel coefficients are contractions of these maps with
//! connected correlators of the ancilla chain.

use num_complex::Complex64 as C64;

use crate::env::{ancilla_block, CollisionScenario, EnvironmentMpdo};
use crate::error::{Error, Result};
use crate::kernel::exact::kernel_term_with_unitary;
use crate::numkernel::{ComplexMatrix, Superoperator};

/// `Φ^{(n)}_{ii'}` for every `(i, i')`, indexed `[i·d + i']`.
pub struct PhiTable {
    pub order: usize,
    pub ancilla_dim: usize,
    maps: Vec<Superoperator>,
}

impl PhiTable {
    pub fn get(&self, i: usize, ip: usize) -> &Superoperator {
        &self.maps[i * self.ancilla_dim + ip]
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Φ^{(n)}_{ii'}[ρ] = Σ_{a+b=n} (−i)^a i^b /(a! b!) · tr_anc[Hᵃ (ρ ⊗ |i⟩⟨i'|) Hᵇ]`.
pub fn phi_table(h: &ComplexMatrix, ds: usize, d: usize, order: usize) -> Result<PhiTable> {
    if h.shape() != (ds * d, ds * d) {
        return Err(Error::DimensionMismatch("Hamiltonian does not act on system ⊗ ancilla".into()));
    }
    let mut powers = vec![ComplexMatrix::identity(ds * d)];
    for _ in 0..order {
        let next = powers.last().unwrap().matmul(h);
        powers.push(next);
    }
    let mut maps = Vec::with_capacity(d * d);
    for i in 0..d {
        for ip in 0..d {
            let mut acc = Superoperator::zero(ds);
            for a in 0..=order {
                let b = order - a;
                let coef = C64::new(0.0, -1.0).powu(a as u32) * C64::new(0.0, 1.0).powu(b as u32)
                    / (factorial(a) * factorial(b));
                for j in 0..d {
                    let x = ancilla_block(&powers[a], ds, d, j, i);
                    let y = ancilla_block(&powers[b], ds, d, ip, j);
                    acc = acc.add(&Superoperator::sandwich(&x, &y)?.scale(coef))?;
                }
            }
            maps.push(acc);
        }
    }
    Ok(PhiTable { order, ancilla_dim: d, maps })
}

/// Connected correlator entries over a set of sites; `entries` is indexed
/// by `(i₁, i₁', i₂, i₂', …)` in row-major order.
#[derive(Clone, Debug)]
pub struct CumulantTable {
    pub order: usize,
    pub ancilla_dim: usize,
    /// Offsets of the later sites from the first one.
    pub offsets: Vec<usize>,
    pub entries: Vec<C64>,
}

impl CumulantTable {
    fn index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.ancilla_dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.entries[self.index(idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `⟨i₁…i_r| ρ |i₁'…i_r'⟩` rearranged so the index order is
/// `(i₁, i₁', …, i_r, i_r')`.
fn interleave(rho: &ComplexMatrix, d: usize, r: usize) -> Vec<C64> {
    let total = d.pow(2 * r as u32);
    let mut out = vec![C64::new(0.0, 0.0); total];
    for flat in 0..total {
        let mut rem = flat;
        let mut digits = vec![0usize; 2 * r];
        for k in (0..2 * r).rev() {
            digits[k] = rem % d;
            rem /= d;
        }
        let (mut row, mut col) = (0, 0);
        for s in 0..r {
            row = row * d + digits[2 * s];
            col = col * d + digits[2 * s + 1];
        }
        out[flat] = rho[(row, col)];
    }
    out
}

/// Two-point cumulant between ancillas `first` and `first + m`.
pub fn two_point_cumulant_at(env: &EnvironmentMpdo, first: usize, m: usize) -> Result<CumulantTable> {
    if m == 0 {
        return Err(Error::InvalidArgument("cumulant offsets must be at least 1".into()));
    }
    let d = env.physical_dim();
    let pair = interleave(env.reduced_two_site_density(first, first + m)?.matrix(), d, 2);
    let a = interleave(env.reduced_site_density(first)?.matrix(), d, 1);
    let b = interleave(env.reduced_site_density(first + m)?.matrix(), d, 1);
    let d2 = d * d;
    let entries = (0..d2 * d2).map(|x| pair[x] - a[x / d2] * b[x % d2]).collect();
    Ok(CumulantTable { order: 2, ancilla_dim: d, offsets: vec![m], entries })
}

pub fn two_point_cumulant(env: &EnvironmentMpdo, m: usize) -> Result<CumulantTable> {
    two_point_cumulant_at(env, 1, m)
}

/// Three-point cumulant `⟨OO'O''⟩ − ⟨OO'⟩⟨O''⟩ − ⟨O⟩⟨O'O''⟩ + ⟨O⟩⟨O'⟩⟨O''⟩`
/// over ancillas `first`, `first + l`, `first + m`.
pub fn three_point_cumulant_at(env: &EnvironmentMpdo, first: usize, l: usize, m: usize) -> Result<CumulantTable> {
    if !(0 < l && l < m) {
        return Err(Error::InvalidArgument(format!("need 0 < l < m, got l = {l}, m = {m}")));
    }
    let d = env.physical_dim();
    let (s1, s2, s3) = (first, first + l, first + m);
    let triple = interleave(env.reduced_density(&[s1, s2, s3])?.matrix(), d, 3);
    let p12 = interleave(env.reduced_two_site_density(s1, s2)?.matrix(), d, 2);
    let p23 = interleave(env.reduced_two_site_density(s2, s3)?.matrix(), d, 2);
    let r1 = interleave(env.reduced_site_density(s1)?.matrix(), d, 1);
    let r2 = interleave(env.reduced_site_density(s2)?.matrix(), d, 1);
    let r3 = interleave(env.reduced_site_density(s3)?.matrix(), d, 1);
    let d2 = d * d;
    let entries = (0..d2 * d2 * d2)
        .map(|x| {
            let (a, b, c) = (x / (d2 * d2), (x / d2) % d2, x % d2);
            triple[x] - p12[a * d2 + b] * r3[c] - r1[a] * p23[b * d2 + c] + r1[a] * r2[b] * r3[c]
        })
        .collect();
    Ok(CumulantTable { order: 3, ancilla_dim: d, offsets: vec![l, m], entries })
}

pub fn three_point_cumulant(env: &EnvironmentMpdo, l: usize, m: usize) -> Result<CumulantTable> {
    three_point_cumulant_at(env, 1, l, m)
}

pub(crate) fn require_hamiltonian(scenario: &CollisionScenario) -> Result<&ComplexMatrix> {
    scenario.hamiltonian().ok_or(Error::MissingHamiltonian)
}

/// `Σ C_{i₁i₁'i₂i₂'} Φ_b{i₂i₂'} ∘ Φ_a{i₁i₁'}`.
pub(crate) fn contract_two(c: &[C64], d: usize, first: &PhiTable, second: &PhiTable, ds: usize) -> Result<Superoperator> {
    let mut acc = ComplexMatrix::zeros(ds * ds, ds * ds);
    let d2 = d * d;
    for x in 0..d2 {
        let (i1, i1p) = (x / d, x % d);
        let inner = first.get(i1, i1p);
        let mut weighted = ComplexMatrix::zeros(ds * ds, ds * ds);
        for y in 0..d2 {
            let coef = c[x * d2 + y];
            if coef.norm() == 0.0 {
                continue;
            }
            weighted += &second.get(y / d, y % d).matrix.scale(coef);
        }
        acc += &weighted.matmul(&inner.matrix);
    }
    Superoperator::from_matrix(ds, ds, acc)
}

/// `Σ C_{…} Φ_c ∘ Φ_b ∘ Φ_a` over three sites.
pub(crate) fn contract_three(
    c: &[C64],
    d: usize,
    a: &PhiTable,
    b: &PhiTable,
    last: &PhiTable,
    ds: usize,
) -> Result<Superoperator> {
    let d2 = d * d;
    let mut acc = ComplexMatrix::zeros(ds * ds, ds * ds);
    for x in 0..d2 {
        let first = &a.get(x / d, x % d).matrix;
        for y in 0..d2 {
            let mut weighted = ComplexMatrix::zeros(ds * ds, ds * ds);
            let mut any = false;
            for z in 0..d2 {
                let coef = c[(x * d2 + y) * d2 + z];
                if coef.norm() == 0.0 {
                    continue;
                }
                any = true;
                weighted += &last.get(z / d, z % d).matrix.scale(coef);
            }
            if any {
                acc += &weighted.matmul(&b.get(y / d, y % d).matrix).matmul(first);
            }
        }
    }
    Superoperator::from_matrix(ds, ds, acc)
}

/// Order-`g²τ` coefficient of `𝓚_{km}` (sites `k−m+1` and `k+1`).
pub fn kernel_order2_at(scenario: &CollisionScenario, k: usize, m: usize) -> Result<Superoperator> {
    if m == 0 || m > k {
        return Err(Error::InvalidArgument(format!("need 1 ≤ m ≤ k, got k = {k}, m = {m}")));
    }
    let h = require_hamiltonian(scenario)?;
    let (ds, d) = (scenario.system_dim, scenario.ancilla_dim);
    let phi1 = phi_table(h, ds, d, 1)?;
    let c2 = two_point_cumulant_at(&scenario.env, k - m + 1, m)?;
    Ok(contract_two(&c2.entries, d, &phi1, &phi1, ds)?.with_label(format!("K2_{m}")))
}

pub fn kernel_order2(scenario: &CollisionScenario, m: usize) -> Result<Superoperator> {
    kernel_order2_at(scenario, m, m)
}

/// Order-`g³τ²` coefficient of `𝓚_{km}`.
pub fn kernel_order3_at(scenario: &CollisionScenario, k: usize, m: usize) -> Result<Superoperator> {
    if m == 0 || m > k {
        return Err(Error::InvalidArgument(format!("need 1 ≤ m ≤ k, got k = {k}, m = {m}")));
    }
    let h = require_hamiltonian(scenario)?;
    let (ds, d) = (scenario.system_dim, scenario.ancilla_dim);
    let phi1 = phi_table(h, ds, d, 1)?;
    let phi2 = phi_table(h, ds, d, 2)?;
    let first = k - m + 1;
    let c2 = two_point_cumulant_at(&scenario.env, first, m)?;
    let mut acc = contract_two(&c2.entries, d, &phi2, &phi1, ds)?;
    acc = acc.add(&contract_two(&c2.entries, d, &phi1, &phi2, ds)?)?;
    for l in 1..m {
        let c3 = three_point_cumulant_at(&scenario.env, first, l, m)?;
        acc = acc.add(&contract_three(&c3.entries, d, &phi1, &phi1, &phi1, ds)?)?;
    }
    Ok(acc.with_label(format!("K3_{m}")))
}

pub fn kernel_order3(scenario: &CollisionScenario, m: usize) -> Result<Superoperator> {
    kernel_order3_at(scenario, m, m)
}

/// Scaling audit of one exact kernel term.
#[derive(Clone, Debug)]
pub struct OrderReport {
    pub k: usize,
    pub m: usize,
    /// Norm of the kernel term with the interaction switched off.
    pub zeroth_order_norm: f64,
    pub g_tau: Vec<f64>,
    pub norms: Vec<f64>,
    /// Fitted exponent of `‖𝓚_{km}‖` against `g` at fixed `τ`; `None` when
    /// every norm vanishes.
    pub exponent: Option<f64>,
}

/// Geometric `gτ` grid used by the scaling audit.
pub const ORDER_CHECK_G_TAU: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Kernel norms below this count as identically zero.
pub const ZERO_KERNEL_NORM: f64 = 1e-13;

impl OrderReport {
    pub fn identically_zero(&self) -> bool {
        self.exponent.is_none()
    }

    /// `‖𝓚⁽⁰⁾‖ < 1e-12` and an exponent within `[1.9, 2.1]` (or a
    /// vanishing term).
    pub fn passed(&self) -> bool {
        self.zeroth_order_norm < 1e-12 && self.exponent.map_or(true, |e| (1.9..=2.1).contains(&e))
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn perturbative_order_check(scenario: &CollisionScenario, k: usize, m: usize) -> Result<OrderReport> {
    require_hamiltonian(scenario)?;
    let dim = scenario.system_dim * scenario.ancilla_dim;
    let zeroth = kernel_term_with_unitary(scenario, &ComplexMatrix::identity(dim), k, m)?.norm();
    let mut norms = Vec::with_capacity(ORDER_CHECK_G_TAU.len());
    for &gt in &ORDER_CHECK_G_TAU {
        let s = scenario.with_g_tau(gt);
        norms.push(kernel_term_with_unitary(&s, &s.unitary()?, k, m)?.norm());
    }
    let exponent = if norms.iter().all(|&n| n < ZERO_KERNEL_NORM) {
        None
    } else {
        Some(log_log_slope(&ORDER_CHECK_G_TAU, &norms))
    };
    Ok(OrderReport { k, m, zeroth_order_norm: zeroth, g_tau: ORDER_CHECK_G_TAU.to_vec(), norms, exponent })
}
