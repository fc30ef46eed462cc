//! Built-in scenarios and the operator presets they use.
//!
//! Qubit basis for the energy-exchange chains: index 0 is `↓`, index 1 is
//! `↑`. Qutrit basis: `(|1⟩, |2⟩, |3⟩)` as in the spin-1 matrices.

use num_complex::Complex64 as C64;

use crate::env::{CollisionScenario, EnvironmentMpdo, Interaction};
use crate::error::{Error, Result};
use crate::mpdo::MpdoSite;
use crate::numkernel::ops::{bloch_state, paulis, spin1};
use crate::numkernel::{kron, ComplexMatrix, DensityMatrix};

pub const PRESET_NAMES: [&str; 6] =
    ["w-chain", "gibbs-chain", "ghz-qutrit", "ghz-controlled", "aklt-projective", "aklt-heisenberg"];

/// `(E↑ − E↓)/k_B T` for the thermal ancillas of `gibbs-chain`.
pub const GIBBS_BETA_DELTA_E: f64 = 1.0;

/// Initial Bloch vector shared by the presets that leave it free.
pub const GENERIC_BLOCH: [f64; 3] = [0.2, 0.5, -0.6];

/// One-line descriptions for `list`.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "w-chain" => "qubit |↑⟩ exchanging energy with ground-state qubits (pure MPS, W-like output)",
        "gibbs-chain" => "qubit |↑⟩ exchanging energy with thermal qubits (MPDO output)",
        "ghz-qutrit" => "qubit coupled by σ·J/2 to a qutrit GHZ chain",
        "ghz-controlled" => "qubit rotated by e^{−igτσ_j} controlled on a qutrit GHZ chain",
        "aklt-projective" => "qubit coupled by Σσ_j⊗|j⟩⟨j| to an AKLT chain",
        "aklt-heisenberg" => "qubit coupled by σ·J/2 to an AKLT chain",
        _ => return None,
    })
}

/// `i(|↓↑⟩⟨↑↓| − |↑↓⟩⟨↓↑|)`, so `exp(−igτH)` is the energy-exchange unitary.
pub fn energy_exchange_hamiltonian() -> ComplexMatrix {
    // |s a⟩ ↦ index 2s + a; ↓↑ = 1, ↑↓ = 2.
    let mut h = ComplexMatrix::zeros(4, 4);
    h[(1, 2)] = C64::new(0.0, 1.0);
    h[(2, 1)] = C64::new(0.0, -1.0);
    h
}

/// `½ Σ_j σ_j ⊗ J_j`.
pub fn sigma_dot_j_hamiltonian() -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(6, 6);
    for (s, j) in paulis().iter().zip(spin1().iter()) {
        h += &kron(s, j).expect("small").scale_real(0.5);
    }
    h
}

/// `Σ_j σ_j ⊗ |j⟩⟨j|`.
pub fn sigma_projector_hamiltonian() -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(6, 6);
    for (j, s) in paulis().iter().enumerate() {
        h += &kron(s, &ComplexMatrix::unit(3, 3, j, j)).expect("small");
    }
    h
}

pub fn ghz_environment(length: Option<usize>) -> Result<EnvironmentMpdo> {
    let chi0 = DensityMatrix::new(ComplexMatrix::from_fn(3, 3, |_, _| C64::new(1.0 / 3.0, 0.0)))?;
    let slices = (0..3).map(|j| ComplexMatrix::unit(3, 3, j, j)).collect();
    EnvironmentMpdo::homogeneous(chi0, MpdoSite::from_pure(slices)?, length)
}

pub fn aklt_environment(length: Option<usize>) -> Result<EnvironmentMpdo> {
    let a = (2.0f64 / 3.0).sqrt();
    let b = 1.0 / 3f64.sqrt();
    let slices = vec![
        ComplexMatrix::from_real_rows(&[&[0.0, a], &[0.0, 0.0]]),
        ComplexMatrix::from_real_rows(&[&[-b, 0.0], &[0.0, b]]),
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[-a, 0.0]]),
    ];
    EnvironmentMpdo::homogeneous(DensityMatrix::maximally_mixed(2), MpdoSite::from_pure(slices)?, length)
}

/// `diag(p↓, p↑)` with `p↓ = 1/(1 + e^{−βΔE})`.
pub fn gibbs_qubit(beta_delta_e: f64) -> DensityMatrix {
    let down = 1.0 / (1.0 + (-beta_delta_e).exp());
    DensityMatrix::new_unchecked(ComplexMatrix::diag_real(&[down, 1.0 - down]))
}

fn up() -> DensityMatrix {
    DensityMatrix::new_unchecked(ComplexMatrix::diag_real(&[0.0, 1.0]))
}

fn down() -> DensityMatrix {
    DensityMatrix::new_unchecked(ComplexMatrix::diag_real(&[1.0, 0.0]))
}

/// `(I + Σσ_j/√3)/2`, which commutes with `⟨H⟩_anc` for `aklt-projective`.
pub fn aklt_projective_initial() -> DensityMatrix {
    let r = 1.0 / 3f64.sqrt();
    DensityMatrix::new_unchecked(bloch_state([r, r, r]))
}

/// Builds a preset at `τ = 1`; `g` then equals `gτ`.
pub fn preset(name: &str) -> Result<CollisionScenario> {
    let generic = || DensityMatrix::new_unchecked(bloch_state(GENERIC_BLOCH));
    let h = Interaction::Hamiltonian;
    match name {
        "w-chain" => CollisionScenario::new(
            h(energy_exchange_hamiltonian()),
            0.3,
            1.0,
            up(),
            EnvironmentMpdo::factorized(&down(), None)?,
            6,
        ),
        "gibbs-chain" => CollisionScenario::new(
            h(energy_exchange_hamiltonian()),
            0.3,
            1.0,
            up(),
            EnvironmentMpdo::factorized(&gibbs_qubit(GIBBS_BETA_DELTA_E), None)?,
            6,
        ),
        "ghz-qutrit" => {
            CollisionScenario::new(h(sigma_dot_j_hamiltonian()), 0.2, 1.0, generic(), ghz_environment(None)?, 50)
        }
        "ghz-controlled" => {
            CollisionScenario::new(h(sigma_projector_hamiltonian()), 0.7, 1.0, generic(), ghz_environment(None)?, 8)
        }
        "aklt-projective" => CollisionScenario::new(
            h(sigma_projector_hamiltonian()),
            0.1,
            1.0,
            aklt_projective_initial(),
            aklt_environment(None)?,
            200,
        ),
        "aklt-heisenberg" => {
            CollisionScenario::new(h(sigma_dot_j_hamiltonian()), 0.4, 1.0, generic(), aklt_environment(None)?, 50)
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::matrix_exp_skew;

    #[test]
    fn every_preset_loads() {
        for name in PRESET_NAMES {
            let s = preset(name).unwrap();
            assert!(describe(name).is_some());
            assert!(s.validate(&Default::default()).is_ok());
        }
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn energy_exchange_unitary() {
        // exp(gτ(|↓↑⟩⟨↑↓| − |↑↓⟩⟨↓↑|)) acting on |↑↓⟩ gives cos|↑↓⟩ + sin|↓↑⟩.
        let gt = 0.37;
        let u = matrix_exp_skew(&energy_exchange_hamiltonian(), gt).unwrap();
        assert!((u[(2, 2)] - gt.cos()).norm() < 1e-14);
        assert!((u[(1, 2)] - gt.sin()).norm() < 1e-14);
        assert!((u[(2, 1)] + gt.sin()).norm() < 1e-14);
    }

    #[test]
    fn controlled_unitary_form() {
        let gt = 0.7;
        let u = matrix_exp_skew(&sigma_projector_hamiltonian(), gt).unwrap();
        let mut want = ComplexMatrix::zeros(6, 6);
        for (j, s) in paulis().iter().enumerate() {
            want += &kron(&matrix_exp_skew(s, gt).unwrap(), &ComplexMatrix::unit(3, 3, j, j)).unwrap();
        }
        assert!(u.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn gibbs_populations() {
        let g = gibbs_qubit(GIBBS_BETA_DELTA_E);
        assert!(g[(0, 0)].re > g[(1, 1)].re);
        assert!((g.trace().re - 1.0).abs() < 1e-15);
    }
}
