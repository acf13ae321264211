//! `tmode`: value at the mode, densities, ball probabilities and moments of
//! multivariate Student t distributions.
//!
//! Exit codes: 0 when every check passed, 1 on a verification mismatch,
//! 2 on a usage error.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CliError, Outcome};
use crate::output::{Format, Precision};

#[derive(Debug, Parser)]
#[command(
    name = "tmode",
    version,
    about = "Value at the mode and related quantities of multivariate Student t distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Significant digits for computed values, or "full".
    #[arg(long, default_value = "6", global = true)]
    precision: Precision,
}

/// `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let start: f64 = start
            .trim()
            .parse()
            .map_err(|_| format!("bad start in {s:?}"))?;
        let stop: f64 = stop
            .trim()
            .parse()
            .map_err(|_| format!("bad stop in {s:?}"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad count in {s:?}"))?;
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(format!("need finite start < stop in {s:?}"));
        }
        if count < 2 {
            return Err(format!("need at least 2 points in {s:?}"));
        }
        Ok(GridSpec { start, stop, count })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Value at the mode c(nu, k), at one nu or along a grid.
    ModeValue {
        /// Dimension(s), comma separated.
        #[arg(long, required = true, value_delimiter = ',')]
        k: Vec<u32>,
        /// A single number of degrees of freedom ("inf" for the Gaussian).
        #[arg(long, conflicts_with = "grid")]
        nu: Option<String>,
        /// Grid of nu values (default 0.1:30:200, log-spaced).
        #[arg(long)]
        grid: Option<GridSpec>,
        /// Space grid points evenly in log(nu).
        #[arg(long)]
        log: bool,
    },
    /// Density along the first coordinate axis, f(t e1).
    DensityProfile {
        /// Degrees of freedom, "inf", or "all" for 1, 2, 10 and inf.
        #[arg(long, default_value = "all")]
        nu: String,
        #[arg(long)]
        k: u32,
        /// Range of t as a:b:n.
        #[arg(long, default_value = "-5:5:401", allow_hyphen_values = true)]
        axis_range: GridSpec,
    },
    /// Ball probabilities at r = 0.1 compared with the published table.
    Table1 {
        /// Also estimate every cell by Monte Carlo with this many draws.
        #[arg(long)]
        n_mc: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check the monotonicity of c(nu, k) in nu for k = 1..=k_max.
    Verify {
        #[arg(long)]
        k_max: u32,
        /// Grid of nu values (log-spaced).
        #[arg(long, default_value = "0.01:10000:200")]
        grid: GridSpec,
        /// Derivatives with absolute value at most this count as zero.
        #[arg(long, default_value_t = tmode_core::monotone::DEFAULT_ZERO_TOL)]
        tol: f64,
    },
    /// Radial moment and kurtosis ratios between two t laws, swept over k.
    Moments {
        #[arg(long)]
        nu1: String,
        #[arg(long)]
        nu2: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: f64,
    },
    /// Monte Carlo draws or summary estimates.
    Sample {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Radii for ball-probability estimates.
        #[arg(long, value_delimiter = ',', default_value = "0.1")]
        radius: Vec<f64>,
        /// Emit the draws themselves instead of summaries.
        #[arg(long)]
        draws: bool,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let outcome = match cli.command {
        Command::ModeValue { k, nu, grid, log } => {
            commands::mode_value(&k, nu.as_deref(), grid, log)?
        }
        Command::DensityProfile { nu, k, axis_range } => {
            commands::density_profile(&nu, k, axis_range)?
        }
        Command::Table1 { n_mc, seed } => commands::table1(n_mc, seed)?,
        Command::Verify { k_max, grid, tol } => commands::verify(k_max, grid, tol)?,
        Command::Moments { nu1, nu2, k, m } => commands::moments(&nu1, &nu2, k, m)?,
        Command::Sample {
            nu,
            k,
            n,
            seed,
            radius,
            draws,
        } => commands::sample(&nu, k, n, seed, &radius, draws)?,
    };
    let format = cli.output.format;
    let precision = cli.output.precision;
    match &cli.output.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            outcome.table.write(&mut w, format, precision)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.table.write(&mut w, format, precision)?;
            w.flush()?;
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) if outcome.mismatches.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for m in &outcome.mismatches {
                eprintln!("mismatch: {m}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
