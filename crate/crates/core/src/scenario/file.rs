//! TOML scenario files. Dense matrices are row-major arrays of `[re, im]`
//! pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{CollisionScenario, EnvSites, EnvironmentMpdo, Interaction};
use crate::error::{Error, Result};
use crate::mpdo::MpdoSite;
use crate::numkernel::ops::bloch_state;
use crate::numkernel::{ComplexMatrix, DensityMatrix};
use crate::scenario::presets::{
    aklt_environment, energy_exchange_hamiltonian, ghz_environment, preset, sigma_dot_j_hamiltonian,
    sigma_projector_hamiltonian,
};
use crate::tol::Tolerances;
use crate::C64;

pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    pub g_tau: f64,
    #[serde(default = "unit_tau")]
    pub tau: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
    pub interaction: InteractionSpec,
    pub environment: EnvironmentSpec,
    pub initial_state: InitialStateSpec,
}

fn unit_tau() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InteractionSpec {
    /// `generator` names a preset Hamiltonian; otherwise `matrix` is used.
    Hamiltonian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<MatrixLiteral>,
    },
    Unitary { matrix: MatrixLiteral },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// Every ancilla in `state`.
    Factorized {
        state: MatrixLiteral,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<usize>,
    },
    /// Homogeneous pure chain: `tensors[i]` is `A^i`.
    Mps {
        chi0: MatrixLiteral,
        tensors: Vec<MatrixLiteral>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<usize>,
    },
    /// Homogeneous mixed chain: `tensors[i][b]` is `B_b^i`.
    Mpdo {
        chi0: MatrixLiteral,
        tensors: Vec<Vec<MatrixLiteral>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<usize>,
    },
    /// `ghz` or `aklt`.
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

pub fn matrix_from_literal(field: &str, rows: &MatrixLiteral) -> Result<ComplexMatrix> {
    let parsed: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect()).collect();
    ComplexMatrix::from_rows(&parsed).map_err(|e| Error::Parse { field: field.into(), message: e.to_string() })
}

pub fn matrix_to_literal(m: &ComplexMatrix) -> MatrixLiteral {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn density(field: &str, rows: &MatrixLiteral, tol: &Tolerances) -> Result<DensityMatrix> {
    DensityMatrix::with_tolerances(matrix_from_literal(field, rows)?, tol)
        .map_err(|e| Error::Parse { field: field.into(), message: e.to_string() })
}

/// Hamiltonian presets usable as `interaction.generator`.
pub fn named_hamiltonian(name: &str) -> Result<ComplexMatrix> {
    match name {
        "energy-exchange" => Ok(energy_exchange_hamiltonian()),
        "sigma-dot-j" => Ok(sigma_dot_j_hamiltonian()),
        "sigma-projector" => Ok(sigma_projector_hamiltonian()),
        other => Err(Error::Parse { field: "interaction.generator".into(), message: format!("unknown generator {other:?}") }),
    }
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| line_of(text, s.start)).map(|l| format!("line {l}")).unwrap_or_default();
            Error::Parse { field: at, message: e.message().to_string() }
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse { field: "scenario".into(), message: e.to_string() })
    }

    pub fn build(&self) -> Result<CollisionScenario> {
        self.build_with(&Tolerances::default())
    }

    pub fn build_with(&self, tol: &Tolerances) -> Result<CollisionScenario> {
        if !(self.tau > 0.0) {
            return Err(Error::Parse { field: "tau".into(), message: "must be positive".into() });
        }
        let interaction = match &self.interaction {
            InteractionSpec::Hamiltonian { generator: Some(g), matrix: None } => {
                Interaction::Hamiltonian(named_hamiltonian(g)?)
            }
            InteractionSpec::Hamiltonian { generator: None, matrix: Some(m) } => {
                Interaction::Hamiltonian(matrix_from_literal("interaction.matrix", m)?)
            }
            InteractionSpec::Hamiltonian { .. } => {
                return Err(Error::Parse {
                    field: "interaction".into(),
                    message: "give exactly one of generator or matrix".into(),
                })
            }
            InteractionSpec::Unitary { matrix } => Interaction::Unitary(matrix_from_literal("interaction.matrix", matrix)?),
        };
        let env = match &self.environment {
            EnvironmentSpec::Factorized { state, length } => {
                EnvironmentMpdo::factorized(&density("environment.state", state, tol)?, *length)?
            }
            EnvironmentSpec::Mps { chi0, tensors, length } => {
                let slices = tensors
                    .iter()
                    .map(|t| matrix_from_literal("environment.tensors", t))
                    .collect::<Result<Vec<_>>>()?;
                EnvironmentMpdo::homogeneous(density("environment.chi0", chi0, tol)?, MpdoSite::from_pure(slices)?, *length)?
            }
            EnvironmentSpec::Mpdo { chi0, tensors, length } => {
                let slices = tensors
                    .iter()
                    .map(|fam| fam.iter().map(|t| matrix_from_literal("environment.tensors", t)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?;
                EnvironmentMpdo::homogeneous(density("environment.chi0", chi0, tol)?, MpdoSite::new(slices)?, *length)?
            }
            EnvironmentSpec::Preset { name, length } => match name.as_str() {
                "ghz" => ghz_environment(*length)?,
                "aklt" => aklt_environment(*length)?,
                other => {
                    return Err(Error::Parse {
                        field: "environment.name".into(),
                        message: format!("unknown environment preset {other:?}"),
                    })
                }
            },
        };
        if env.physical_dim() != self.ancilla_dim {
            return Err(Error::DimensionMismatch(format!(
                "environment ancillas have dimension {}, ancilla_dim is {}",
                env.physical_dim(),
                self.ancilla_dim
            )));
        }
        let rho = match (&self.initial_state.bloch, &self.initial_state.matrix) {
            (Some(r), None) if self.system_dim == 2 => density_from_bloch(*r, tol)?,
            (None, Some(m)) => density("initial_state.matrix", m, tol)?,
            _ => {
                return Err(Error::Parse {
                    field: "initial_state".into(),
                    message: "give exactly one of bloch (qubits only) or matrix".into(),
                })
            }
        };
        if rho.dim() != self.system_dim {
            return Err(Error::DimensionMismatch(format!(
                "initial state has dimension {}, system_dim is {}",
                rho.dim(),
                self.system_dim
            )));
        }
        let s = CollisionScenario::new(interaction, self.g_tau / self.tau, self.tau, rho, env, self.steps)?;
        s.validate(tol)?;
        Ok(s)
    }

    /// Fully explicit description of a scenario (homogeneous environments
    /// only).
    pub fn from_scenario(name: &str, s: &CollisionScenario) -> Result<Self> {
        let interaction = match &s.interaction {
            Interaction::Hamiltonian(h) => InteractionSpec::Hamiltonian { generator: None, matrix: Some(matrix_to_literal(h)) },
            Interaction::Unitary(u) => InteractionSpec::Unitary { matrix: matrix_to_literal(u) },
        };
        let site = match s.env.sites() {
            EnvSites::Homogeneous(site) => site,
            EnvSites::PerSite(_) => return Err(Error::NotHomogeneous),
        };
        let tensors = (0..site.physical_dim())
            .map(|i| site.kraus_family(i).iter().map(matrix_to_literal).collect())
            .collect();
        let environment = EnvironmentSpec::Mpdo {
            chi0: matrix_to_literal(s.env.chi0().matrix()),
            tensors,
            length: s.env.length(),
        };
        Ok(Self {
            name: name.to_string(),
            system_dim: s.system_dim,
            ancilla_dim: s.ancilla_dim,
            g_tau: s.g_tau(),
            tau: s.tau,
            steps: s.steps,
            outputs: Vec::new(),
            interaction,
            environment,
            initial_state: InitialStateSpec { bloch: None, matrix: Some(matrix_to_literal(s.rho_s0.matrix())) },
        })
    }
}

fn density_from_bloch(r: [f64; 3], tol: &Tolerances) -> Result<DensityMatrix> {
    DensityMatrix::with_tolerances(bloch_state(r), tol)
        .map_err(|e| Error::Parse { field: "initial_state.bloch".into(), message: e.to_string() })
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// A preset name, or a path to a scenario file.
pub fn load_scenario(selector: &str) -> Result<(String, CollisionScenario, Vec<String>)> {
    load_scenario_with(selector, &Tolerances::default())
}

pub fn load_scenario_with(selector: &str, tol: &Tolerances) -> Result<(String, CollisionScenario, Vec<String>)> {
    let path = Path::new(selector);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let spec = ScenarioSpec::from_toml(&text)?;
        let s = spec.build_with(tol)?;
        return Ok((spec.name.clone(), s, spec.outputs));
    }
    Ok((selector.to_string(), preset(selector)?, Vec::new()))
}
