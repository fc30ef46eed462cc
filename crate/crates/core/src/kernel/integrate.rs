//! Fixed-step RK4 integration of `dϱ/dt = L[ϱ]`.

use crate::env::Trajectory;
use crate::error::{Error, Result};
use crate::kernel::strobo::StroboscopicGenerator;
use crate::numkernel::{DensityMatrix, Superoperator};

/// Largest `h‖L‖` allowed per RK4 substep.
pub const MAX_STEP_NORM: f64 = 0.1;
/// Allowed trace drift over the whole grid.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Growth of `‖ϱ‖` treated as a blow-up.
const BLOW_UP: f64 = 1e6;

pub fn integrate_generator(gen: &StroboscopicGenerator, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Trajectory> {
    integrate_superoperator(&gen.effective, rho0, t_grid)
}

/// Integrates from `t_grid[0]`, recording the state at each grid time.
pub fn integrate_superoperator(l: &Superoperator, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Trajectory> {
    if l.dim_in != l.dim_out || l.dim_in != rho0.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator on dimension {} cannot act on a {}-dimensional state",
            l.dim_in,
            rho0.dim()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument("time grid must be non-decreasing".into()));
    }
    let norm = l.norm();
    let start_norm = rho0.frobenius_norm().max(1.0);
    let tr0 = rho0.trace();
    let mut v = rho0.matrix().clone();
    let mut states = Vec::with_capacity(t_grid.len());
    for (idx, &t) in t_grid.iter().enumerate() {
        if idx > 0 {
            let span = t - t_grid[idx - 1];
            let n = ((span * norm) / MAX_STEP_NORM).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                let k1 = l.apply(&v)?;
                let k2 = l.apply(&(&v + &k1.scale_real(h / 2.0)))?;
                let k3 = l.apply(&(&v + &k2.scale_real(h / 2.0)))?;
                let k4 = l.apply(&(&v + &k3.scale_real(h)))?;
                let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
                v += &incr.scale_real(h / 6.0);
            }
            if !v.is_finite() || v.frobenius_norm() > BLOW_UP * start_norm {
                return Err(Error::Unstable { t });
            }
            if (v.trace() - tr0).norm() > TRACE_DRIFT_TOL {
                return Err(Error::Unstable { t });
            }
        }
        states.push(DensityMatrix::new_unchecked(v.clone()));
    }
    Ok(Trajectory { times: t_grid.to_vec(), states, joint_states: None })
}
