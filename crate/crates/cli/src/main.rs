use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use collisim::kernel::{exact_kernel_term, stroboscopic_generator};
use collisim::scenario::file::ScenarioSpec;
use collisim::scenario::presets::describe;
use collisim::scenario::report::{run_csv, spectrum_report, strobo_report, superoperator_table};
use collisim::scenario::{load_scenario_with, PRESET_NAMES};
use collisim::tol::Tolerances;
use collisim::{validate, Error};

#[derive(Parser)]
#[command(name = "collisim", version, about = "Collision models with correlated matrix-product environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArg {
    /// Preset name or path to a TOML scenario file.
    #[arg(long, short)]
    scenario: String,
    /// Override the collision strength gτ.
    #[arg(long)]
    gtau: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in presets.
    List,
    /// Evolve a scenario and write the trajectory as CSV.
    Run {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        steps: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Transfer-matrix spectrum of the environment.
    Spectrum {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
    /// Exact memory-kernel term 𝓚_{km} as a superoperator table.
    Kernel {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Stroboscopic generator in GKSL form.
    Strobo {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Self-checks against reference formulas and a dense oracle.
    Validate {
        /// `all`, a check group or a preset name.
        selector: Option<String>,
        #[arg(long, conflicts_with = "selector")]
        all: bool,
    },
    /// Write a preset as a TOML scenario file.
    Export {
        preset: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownPreset(_) | Error::InvalidArgument(_) | Error::Io(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn load(arg: &ScenarioArg) -> Result<(String, collisim::env::CollisionScenario, Vec<String>), Failure> {
    let (name, mut s, outputs) = load_scenario_with(&arg.scenario, &Tolerances::from_env())?;
    if let Some(gt) = arg.gtau {
        if !gt.is_finite() {
            return Err(Failure::Usage(format!("--gtau must be finite, got {gt}")));
        }
        s = s.with_g_tau(gt);
    }
    Ok((name, s, outputs))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::List => {
            for name in PRESET_NAMES {
                println!("{name}\t{}", describe(name).unwrap_or(""));
            }
        }
        Command::Run { scenario, steps, out } => {
            let (_, mut s, outputs) = load(&scenario)?;
            if let Some(n) = steps {
                s = s.with_steps(n);
            }
            emit(&run_csv(&s, &outputs)?, out.as_ref())?;
        }
        Command::Spectrum { scenario } => {
            let (_, s, _) = load(&scenario)?;
            print!("{}", spectrum_report(&s)?);
        }
        Command::Kernel { scenario, k, m } => {
            let (_, s, _) = load(&scenario)?;
            print!("{}", superoperator_table(&exact_kernel_term(&s, k, m)?));
        }
        Command::Strobo { scenario, order } => {
            let (_, s, _) = load(&scenario)?;
            print!("{}", strobo_report(&stroboscopic_generator(&s, order)?)?);
        }
        Command::Validate { selector, .. } => {
            let report = validate::validate(selector.as_deref().unwrap_or("all"))?;
            print!("{report}");
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} of {} checks failed", report.checks.len())));
            }
        }
        Command::Export { preset, out } => {
            let s = collisim::scenario::preset(&preset)?;
            emit(&ScenarioSpec::from_scenario(&preset, &s)?.to_toml()?, out.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
