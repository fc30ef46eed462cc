//! Text and CSV renderings of trajectories, spectra, kernels and
//! generators. Numbers use `{:.16e}` so output is reproducible bit for bit.

use std::fmt::Write as _;

use crate::env::{evolve, CollisionScenario, Trajectory};
use crate::error::{Error, Result};
use crate::kernel::strobo::{gksl_decomposition, GkslDecomposition, StroboscopicGenerator};
use crate::numkernel::ops::bloch_vector;
use crate::numkernel::{ComplexMatrix, Superoperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Bloch,
    /// Real and imaginary part of `ϱ_ij`.
    Element(usize, usize),
}

/// Parses `bloch` or `rho[i,j]`; an empty list means Bloch for qubits and
/// the diagonal otherwise.
pub fn parse_observables(specs: &[String], ds: usize) -> Result<Vec<Observable>> {
    if specs.is_empty() {
        return Ok(if ds == 2 { vec![Observable::Bloch] } else { (0..ds).map(|i| Observable::Element(i, i)).collect() });
    }
    specs
        .iter()
        .map(|s| {
            let bad = || Error::Parse { field: "outputs".into(), message: format!("cannot read observable {s:?}") };
            let t = s.trim();
            if t == "bloch" {
                if ds != 2 {
                    return Err(Error::Parse { field: "outputs".into(), message: "bloch needs a qubit system".into() });
                }
                return Ok(Observable::Bloch);
            }
            let inner = t.strip_prefix("rho[").and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let i: usize = a.trim().parse().map_err(|_| bad())?;
            let j: usize = b.trim().parse().map_err(|_| bad())?;
            if i >= ds || j >= ds {
                return Err(Error::IndexOutOfRange { index: i.max(j), dim: ds });
            }
            Ok(Observable::Element(i, j))
        })
        .collect()
}

pub fn csv_header(obs: &[Observable]) -> String {
    let mut cols = vec!["k".to_string(), "t".to_string()];
    for o in obs {
        match o {
            Observable::Bloch => cols.extend(["sx", "sy", "sz"].map(String::from)),
            Observable::Element(i, j) => {
                cols.push(format!("re_rho_{i}_{j}"));
                cols.push(format!("im_rho_{i}_{j}"));
            }
        }
    }
    cols.join(",")
}

pub fn trajectory_csv(traj: &Trajectory, obs: &[Observable]) -> String {
    let mut out = csv_header(obs);
    out.push('\n');
    for (k, (t, rho)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut fields = vec![k.to_string(), format!("{t:.16e}")];
        for o in obs {
            match o {
                Observable::Bloch => fields.extend(bloch_vector(rho.matrix()).iter().map(|v| format!("{v:.16e}"))),
                Observable::Element(i, j) => {
                    let z = rho[(*i, *j)];
                    fields.push(format!("{:.16e}", z.re));
                    fields.push(format!("{:.16e}", z.im));
                }
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn run_csv(scenario: &CollisionScenario, outputs: &[String]) -> Result<String> {
    let obs = parse_observables(outputs, scenario.system_dim)?;
    Ok(trajectory_csv(&evolve(scenario)?, &obs))
}

fn complex(z: crate::C64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

pub fn spectrum_report(scenario: &CollisionScenario) -> Result<String> {
    let spec = scenario.env.correlation_spectrum()?;
    let mut out = String::from("index,re,im,modulus\n");
    for (k, l) in spec.eigenvalues().iter().enumerate() {
        writeln!(out, "{k},{:.16e},{:.16e},{:.16e}", l.re, l.im, l.norm()).ok();
    }
    writeln!(out, "# unit eigenvalues: {}", spec.unit_count).ok();
    writeln!(out, "# correlation length: {}", spec.correlation_length()).ok();
    Ok(out)
}

pub fn superoperator_table(s: &Superoperator) -> String {
    let mut out = format!("# {} ({}² → {}²), Frobenius norm {:.16e}\n", s.label, s.dim_in, s.dim_out, s.norm());
    out.push_str(&matrix_rows(&s.matrix));
    out
}

fn matrix_rows(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|z| complex(*z)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn gksl_lines(out: &mut String, title: &str, dec: &GkslDecomposition) {
    writeln!(out, "[{title}]").ok();
    writeln!(out, "hamiltonian:").ok();
    out.push_str(&matrix_rows(&dec.hamiltonian));
    writeln!(out, "kossakowski eigenvalues: {}", fmt_list(&dec.kossakowski_eigenvalues)).ok();
    for (rate, jump) in &dec.channels {
        if rate.abs() < 1e-15 {
            continue;
        }
        writeln!(out, "rate {rate:.16e} jump:").ok();
        out.push_str(&matrix_rows(jump));
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
}

pub fn strobo_report(gen: &StroboscopicGenerator) -> Result<String> {
    let g2tau = gen.g * gen.g * gen.tau;
    let mut out = format!("order {} (g = {}, tau = {})\n", gen.order, gen.g, gen.tau);
    writeln!(out, "fit residual {:.3e}, resummation residual {:.3e}", gen.fit_residual, gen.resummation_residual).ok();
    gksl_lines(&mut out, "local", &gksl_decomposition(&gen.local)?);
    for (j, term) in gen.nonlocal_terms.iter().enumerate() {
        writeln!(out, "nonlocal term {j}: lambda {} (multiplicity {})", complex(term.lambda), term.multiplicity).ok();
        gksl_lines(&mut out, &format!("nonlocal {j}, resummed"), &gksl_decomposition(&term.resummed(g2tau))?);
    }
    if let Some(t) = &gen.third_order {
        gksl_lines(&mut out, "third order", &gksl_decomposition(t)?);
    }
    gksl_lines(&mut out, "effective", &gen.gksl);
    writeln!(out, "kossakowski PSD: {}", gen.gksl.is_positive(crate::tol::TOL_PSD)).ok();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::preset;

    #[test]
    fn observables() {
        assert_eq!(parse_observables(&[], 2).unwrap(), vec![Observable::Bloch]);
        let o = parse_observables(&["rho[0,1]".into()], 3).unwrap();
        assert_eq!(o, vec![Observable::Element(0, 1)]);
        assert!(parse_observables(&["rho[0,3]".into()], 3).is_err());
        assert!(parse_observables(&["bloch".into()], 3).is_err());
        assert_eq!(csv_header(&o), "k,t,re_rho_0_1,im_rho_0_1");
    }

    #[test]
    fn csv_is_deterministic() {
        let s = preset("aklt-heisenberg").unwrap().with_steps(5);
        let a = run_csv(&s, &[]).unwrap();
        assert_eq!(a, run_csv(&s, &[]).unwrap());
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], "k,t,sx,sy,sz");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0,0.0000000000000000e0,2.0000000000000001e-1"));
    }
}
