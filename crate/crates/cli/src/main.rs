use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dwb_core::Family;

mod commands;
mod output;
mod svg;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "dwb", version, about = "Invariant curves and Darboux first integrals for a Lotka-Volterra family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the degree-n invariant curve and check it exactly
    Curve(CurveArgs),
    /// Exact sweep of the invariance and auxiliary identities
    Verify(VerifyArgs),
    /// Cofactor kernel, first integral and rationality of its exponents
    Darboux(DarbouxArgs),
    /// Integrate one trajectory and audit the curve and the first integral along it
    Simulate(SimulateArgs),
    /// Merge JSON fragments from earlier runs into one report
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Minus,
    Plus,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Minus => Family::MinusY,
            FamilyArg::Plus => Family::PlusY,
        }
    }
}

fn order(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(0) => Err("n must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, value_parser = order)]
    n: u32,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock timings (makes output non-reproducible)
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = order)]
    n_max: u32,
    /// Restrict to one family; both by default
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Replace every cofactor K by K + 1
    #[arg(long, conflicts_with = "perturb_coefficient")]
    perturb_cofactor: bool,
    /// Add 1 to the leading coefficient of every curve
    #[arg(long)]
    perturb_coefficient: bool,
    /// Seed for the sampled Pochhammer identity sweep
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    lemma1_samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct DarbouxArgs {
    #[arg(long, value_parser = order)]
    n: u32,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Parameter value: p/q, an exact decimal, or `irrational`
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_parser = order)]
    n: u32,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    /// Starting y; defaults to the point on the curve above x0
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_f: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_logh: f64,
    /// Trajectory CSV destination
    #[arg(long)]
    out: Option<PathBuf>,
    /// Phase-plane SVG destination
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// JSON fragments written with `--format json`
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("DWB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("DWB_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        bail!("DWB_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Curve(a) => commands::curve(a.n, a.family.into(), a.format, a.timings),
        Command::Verify(a) => commands::verify(&commands::VerifyConfig {
            n_max: a.n_max,
            families: match a.family {
                Some(f) => vec![f.into()],
                None => Family::ALL.to_vec(),
            },
            perturbation: if a.perturb_cofactor {
                Some(commands::Perturbation::Cofactor)
            } else if a.perturb_coefficient {
                Some(commands::Perturbation::Coefficient)
            } else {
                None
            },
            seed: a.seed,
            lemma1_samples: a.lemma1_samples,
            format: a.format,
            timings: a.timings,
        }),
        Command::Darboux(a) => commands::darboux(a.n, a.family.into(), a.b.as_deref(), a.format),
        Command::Simulate(a) => commands::simulate(&commands::SimulateConfig {
            n: a.n,
            family: a.family.into(),
            b: a.b,
            x0: a.x0,
            y0: a.y0,
            t_end: a.t_end,
            h: a.h,
            tol_f: a.tol_f,
            tol_logh: a.tol_logh,
            out: a.out,
            plot: a.plot,
            format: a.format,
        }),
        Command::Report(a) => commands::report(&a.paths, a.format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
