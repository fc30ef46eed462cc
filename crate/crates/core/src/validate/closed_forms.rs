//! Reference formulas evaluated literally, for comparison against the
//! engine. Nothing here calls into the simulator; only the plain matrix
//! type is shared.

use num_complex::Complex64 as C64;

use crate::numkernel::ComplexMatrix;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat(rows: [[C64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, k| rows[r][k])
}

pub fn sigma(j: usize) -> ComplexMatrix {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match j {
        0 => mat([[z, o], [o, z]]),
        1 => mat([[z, c(0.0, -1.0)], [c(0.0, 1.0), z]]),
        _ => mat([[o, z], [z, -o]]),
    }
}

pub fn spin_one(j: usize) -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    let rows: [[C64; 3]; 3] = match j {
        0 => [[c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)], [c(h, 0.0), c(0.0, 0.0), c(h, 0.0)], [c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]],
        1 => [[c(0.0, 0.0), c(0.0, -h), c(0.0, 0.0)], [c(0.0, h), c(0.0, 0.0), c(0.0, -h)], [c(0.0, 0.0), c(0.0, h), c(0.0, 0.0)]],
        _ => [[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]],
    };
    ComplexMatrix::from_fn(3, 3, |r, k| rows[r][k])
}

/// Amplitude of `|↓…↓ ↑ ↓…↓⟩` with the `↑` on ancilla `k+1` (`k < n`), or
/// of the all-`↓` ancillas with the system `↑` (`k = n`).
pub fn w_amplitude(g_tau: f64, k: usize, n: usize) -> f64 {
    if k < n {
        g_tau.cos().powi(k as i32) * g_tau.sin()
    } else {
        g_tau.cos().powi(n as i32)
    }
}

/// Transverse Bloch scaling after `k` collisions with the GHZ qutrit chain.
pub fn ghz_lambda(g_tau: f64, k: u32) -> C64 {
    let e = c(0.0, 1.5 * g_tau).exp();
    let three_k = 3f64.powi(k as i32);
    let a = (c(1.0, 0.0) + e * 2.0).powu(k) * three_k;
    let b = (c(1.0, 0.0) + e.conj() * 2.0).powu(k) * three_k;
    let cc = (5.0 + 4.0 * (1.5 * g_tau).cos()).powi(k as i32);
    (a + b + cc) / 3f64.powi(2 * k as i32 + 1)
}

/// Longitudinal Bloch scaling for the GHZ qutrit chain.
pub fn ghz_lambda_z(g_tau: f64, k: u32) -> f64 {
    let cs = (1.5 * g_tau).cos();
    ((1.0 + 8.0 * cs).powi(k as i32) + 2.0 * (5.0 + 4.0 * cs).powi(k as i32)) / 3f64.powi(2 * k as i32 + 1)
}

/// `(x, y, z)` of the AKLT depolarization function.
pub fn aklt_xyz(g_tau: f64) -> (f64, f64, f64) {
    let cs = (1.5 * g_tau).cos();
    let sn = (1.5 * g_tau).sin();
    let x = 2.0 + 7.0 * cs;
    let y = 7.0 + 2.0 * cs;
    let z = 2.0 * (y * y + 27.0 * sn * sn).sqrt();
    (x, y, z)
}

/// Depolarization factor `q(kτ)` for the AKLT chain with `σ·J/2` coupling.
pub fn aklt_q(g_tau: f64, k: i32) -> f64 {
    let (x, y, z) = aklt_xyz(g_tau);
    (0.5 + x / z) * ((y + z) / 27.0).powi(k) + (0.5 - x / z) * ((y - z) / 27.0).powi(k)
}

/// `q(2τ) − q(τ)`.
pub fn aklt_q_jump(g_tau: f64) -> f64 {
    let (_, y, _) = aklt_xyz(g_tau);
    32.0 * y / 729.0 * (0.75 * g_tau).sin().powi(2)
}

/// Small-coupling decay rate of `q` per unit time.
pub fn aklt_q_rate(g: f64, tau: f64) -> f64 {
    g.powi(4) * tau.powi(3) / 8.0
}

/// Two-site AKLT state for ancillas `1` and `m+1`:
/// `I/9 + (1/3)(−1/3)^m Σ J_α ⊗ J_α`.
pub fn aklt_pair(m: i32) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(9).scale_real(1.0 / 9.0);
    let w = (-1.0f64 / 3.0).powi(m) / 3.0;
    for a in 0..3 {
        let j = spin_one(a);
        out += &ComplexMatrix::from_fn(9, 9, |r, k| j[(r / 3, k / 3)] * j[(r % 3, k % 3)] * w);
    }
    out
}

/// `e^{−iθσ_j}`.
fn rotation(theta: f64, j: usize) -> ComplexMatrix {
    let s = sigma(j);
    ComplexMatrix::from_fn(2, 2, |r, k| {
        let id = if r == k { c(theta.cos(), 0.0) } else { c(0.0, 0.0) };
        id + s[(r, k)] * c(0.0, -theta.sin())
    })
}

/// GHZ controlled-rotation kernel `𝓚_{km}[ρ]`: the
/// `(δ − 1/3)`-weighted sum over index strings of length `m + 1`, with
/// `−ρ/τ` added for `m = 0`.
pub fn ghz_controlled_kernel(g_tau: f64, tau: f64, m: usize, rho: &ComplexMatrix) -> ComplexMatrix {
    let len = m + 1;
    let mut out = ComplexMatrix::zeros(2, 2);
    for flat in 0..3usize.pow(len as u32) {
        // idx[0] is the earliest collision.
        let mut idx = vec![0usize; len];
        let mut rem = flat;
        for slot in idx.iter_mut() {
            *slot = rem % 3;
            rem /= 3;
        }
        let mut weight = 1.0;
        for l in 0..m {
            weight *= if idx[l] == idx[l + 1] { 1.0 } else { 0.0 } - 1.0 / 3.0;
        }
        let mut v = ComplexMatrix::identity(2);
        for &i in &idx {
            v = rotation(g_tau, i).matmul(&v);
        }
        out += &v.matmul(rho).matmul(&v.adjoint()).scale_real(weight);
    }
    let mut out = out.scale_real(1.0 / (3.0 * tau));
    if m == 0 {
        out = &out - &rho.scale_real(1.0 / tau);
    }
    out
}

/// Right-hand side of the AKLT stroboscopic master equation.
pub fn aklt_gksl_rhs(g2tau: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for j in 0..3 {
        let s = sigma(j);
        out += &(&s.matmul(rho).matmul(&s) - rho).scale_real(g2tau / 3.0);
    }
    let a = (&sigma(0) - &sigma(2)).scale_real(1.0 / 2f64.sqrt());
    out += &(&a.matmul(rho).matmul(&a) - rho).scale_real(-g2tau / 3.0);
    out
}

/// Local-only AKLT generator `(g²τ/3) Σ (σ_j ρ σ_j − ρ)`.
pub fn aklt_local_rhs(g2tau: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for j in 0..3 {
        let s = sigma(j);
        out += &(&s.matmul(rho).matmul(&s) - rho).scale_real(g2tau / 3.0);
    }
    out
}
