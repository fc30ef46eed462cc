//! Numerical tolerances.
//!
//! Every check in the crate that accepts a tolerance defaults to the values
//! below. `COLLISIM_TOL` overrides the validation tolerances (Hermiticity,
//! trace, positivity, unitarity) for callers that construct their
//! tolerances through [`Tolerances::from_env`].

/// Hermiticity check for density matrices and generators.
pub const TOL_HERM: f64 = 1e-10;
/// Unit-trace check for density matrices.
pub const TOL_TRACE: f64 = 1e-10;
/// Smallest admissible eigenvalue (negated) of a density matrix.
pub const TOL_PSD: f64 = 1e-10;
/// Unitarity check `‖UU† − I‖_max`.
pub const TOL_UNITARY: f64 = 1e-10;
/// Residual bound for eigenpairs returned by the general eigensolver.
pub const TOL_EIG: f64 = 1e-9;
/// Eigenvalues closer than this are treated as one degenerate group.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Threshold separating unit transfer eigenvalues from decaying ones.
pub const UNIT_EIGENVALUE_GAP: f64 = 1e-8;

/// Name of the environment variable that overrides validation tolerances.
pub const TOL_ENV_VAR: &str = "COLLISIM_TOL";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub unitary: f64,
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            trace: TOL_TRACE,
            psd: TOL_PSD,
            unitary: TOL_UNITARY,
            eig: TOL_EIG,
        }
    }
}

impl Tolerances {
    /// Same tolerance for every validation check.
    pub fn uniform(tol: f64) -> Self {
        Self {
            herm: tol,
            trace: tol,
            psd: tol,
            unitary: tol,
            eig: TOL_EIG.max(tol),
        }
    }

    /// Defaults, overridden by `COLLISIM_TOL` when it parses as a positive
    /// float. Unparseable values are ignored.
    pub fn from_env() -> Self {
        match std::env::var(TOL_ENV_VAR).ok().and_then(|v| v.trim().parse::<f64>().ok()) {
            Some(t) if t > 0.0 && t.is_finite() => Self::uniform(t),
            _ => Self::default(),
        }
    }
}
