//! `mvop`: build orthogonal polynomial systems from moment functionals and
//! verify their Uvarov and Christoffel modifications.

mod commands;
mod config;
mod experiments;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use mvop::Rational;

use commands::Outcome;
use config::{Backend, Overrides, RunConfig};
use experiments::Experiment;

#[derive(Debug, Parser)]
#[command(
    name = "mvop",
    version,
    about = "Multivariate orthogonal polynomials: construction and modifications"
)]
struct Cli {
    /// TOML file describing the functional and its modifications.
    #[arg(long, global = true, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Highest degree to construct and verify.
    #[arg(long, global = true, value_name = "N")]
    degree: Option<usize>,
    #[arg(long, global = true, value_enum)]
    backend: Option<Backend>,
    /// Float tolerance (or experiment threshold).
    #[arg(long, global = true, value_name = "T")]
    tol: Option<f64>,
    /// Directory for CSV output; stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for random rational functionals.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Point mass `x1,x2,...:lambda`; repeat for several. Replaces the file's masses.
    #[arg(
        long = "mass",
        global = true,
        value_name = "POINT:LAMBDA",
        allow_hyphen_values = true
    )]
    masses: Vec<String>,
    /// Quadratic coefficients of the multiplier in graded order, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambda2: Option<Vec<String>>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambda1: Option<Vec<String>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda0: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monic OPS: Gram matrices, recurrence coefficients, quasi-definiteness.
    Build,
    /// Point-mass modification: certification and modified Grams.
    Uvarov,
    /// Degree-two multiplier: equation-by-equation verification.
    Christoffel {
        /// Add this value to entry (0, 0) of N_3 before checking consistency.
        #[arg(long, value_name = "DELTA", allow_hyphen_values = true)]
        mutate_n3: Option<String>,
    },
    /// Build, Uvarov and Christoffel checks for the spec.
    VerifyAll,
    /// Ball and disk experiments (float backend).
    Experiment {
        #[arg(value_enum)]
        name: Experiment,
        #[arg(long)]
        mu: Option<f64>,
        /// Mass at the origin.
        #[arg(long)]
        lambda: Option<f64>,
        /// |x| for the interior experiment.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
    },
}

fn dispatch<F, G>(cfg: &RunConfig, exact: F, float: G) -> Result<Outcome>
where
    F: FnOnce(&RunConfig) -> Result<Outcome>,
    G: FnOnce(&RunConfig) -> Result<Outcome>,
{
    match cfg.backend {
        Backend::Exact => exact(cfg),
        Backend::Float => float(cfg),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let overrides = Overrides {
        spec: cli.spec.clone(),
        degree: cli.degree,
        backend: cli.backend,
        tol: cli.tol,
        seed: cli.seed,
        masses: cli.masses.clone(),
        lambda2: cli.lambda2.clone(),
        lambda1: cli.lambda1.clone(),
        lambda0: cli.lambda0.clone(),
    };
    let outcome = match &cli.command {
        Command::Build => {
            let cfg = RunConfig::resolve(&overrides, Backend::Exact)?;
            dispatch(&cfg, commands::build::<Rational>, commands::build::<f64>)?
        }
        Command::Uvarov => {
            let cfg = RunConfig::resolve(&overrides, Backend::Exact)?.with_sampled_masses()?;
            let mut out = dispatch(&cfg, commands::uvarov::<Rational>, commands::uvarov::<f64>)?;
            note_seed(&cfg, &mut out);
            out
        }
        Command::Christoffel { mutate_n3 } => {
            let cfg = RunConfig::resolve(&overrides, Backend::Exact)?.with_sampled_multiplier()?;
            let m = mutate_n3.as_deref();
            let mut out = dispatch(
                &cfg,
                |c| commands::christoffel::<Rational>(c, m),
                |c| commands::christoffel::<f64>(c, m),
            )?;
            note_seed(&cfg, &mut out);
            out
        }
        Command::VerifyAll => {
            let cfg = RunConfig::resolve(&overrides, Backend::Exact)?;
            dispatch(
                &cfg,
                commands::verify_all::<Rational>,
                commands::verify_all::<f64>,
            )?
        }
        Command::Experiment {
            name,
            mu,
            lambda,
            radius,
            degrees,
        } => {
            let cfg = RunConfig::resolve(&overrides, Backend::Float)?;
            if cfg.backend == Backend::Exact {
                bail!("experiments run on the float backend");
            }
            let mut p = experiments::params_from(&cfg, cli.spec.is_some())?;
            p.mu = mu.unwrap_or(p.mu);
            p.lambda = lambda.unwrap_or(p.lambda);
            p.radius = radius.unwrap_or(p.radius);
            p.degrees = degrees.clone().or(p.degrees);
            experiments::run(*name, &p, &cfg, cli.tol)?
        }
    };
    table::emit(&outcome.tables, cli.out.as_deref())?;
    Ok(outcome)
}

fn note_seed(cfg: &RunConfig, out: &mut Outcome) {
    if cfg.spec.kind == mvop::spec_file::Kind::Random {
        out.notes
            .push(format!("random functional seed {}", cfg.seed));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            if outcome.passed {
                eprintln!("PASS");
                ExitCode::SUCCESS
            } else {
                eprintln!("FAIL");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
