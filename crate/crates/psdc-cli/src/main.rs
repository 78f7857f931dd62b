//! Command-line front end for the power-sum DC toolkit.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::{BenchPlan, MvskSource};
use config::{parse_flat, parse_omega, Decomposition, Flat, Method, RhoPolicy, Settings};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration; exit code 2.
    Validation(String),
    /// The computation itself broke down; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<psdc::Error> for CliError {
    fn from(e: psdc::Error) -> Self {
        use psdc::Error::*;
        match e {
            ResidualTooLarge { .. } | ProjectionStalled { .. } | EqualityViolated => {
                CliError::Numerical(e.to_string())
            }
            DimensionMismatch { .. } | SizeOverflow { .. } | NotHomogeneous { .. }
            | OddDegree(_) | TargetDegreeTooLow { .. } | InfeasiblePoint
            | NonPositiveRho(_) | Parse { .. } | Invalid(_) => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "psdc", version, about = "Power-sum DC decomposition and solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every solver-backed subcommand.
#[derive(Args)]
struct SolverFlags {
    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver: dca, bdca (Armijo), or bdcae (exact line search)
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Decomposition: tpsdc or hdpsdc
    #[arg(long, value_enum)]
    decomposition: Option<Decomposition>,
    /// Curvature policy: one, specnorm, or a positive number
    #[arg(long)]
    rho: Option<String>,
    /// Seed for the initial point and any synthetic data
    #[arg(long)]
    seed: Option<u64>,
}

fn load_flat(path: Option<&PathBuf>) -> Result<Flat, CliError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::validation(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_flat(&text)
        }
        None => Ok(Flat::empty()),
    }
}

impl SolverFlags {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut flat = load_flat(self.config.as_ref())?;
        let rho = self
            .rho
            .as_deref()
            .map(|s| s.parse::<RhoPolicy>().map_err(CliError::validation))
            .transpose()?;
        let settings = Settings::resolve(
            &mut flat,
            self.method,
            self.decomposition,
            rho,
            self.seed,
        )?;
        flat.finish()?;
        Ok(settings)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Split a polynomial into a difference of convex power sums
    Decompose {
        /// Polynomial file
        #[arg(long)]
        poly: PathBuf,
        /// Decomposition: tpsdc or hdpsdc
        #[arg(long, value_enum, default_value = "hdpsdc")]
        method: Decomposition,
        /// Output directory for block CSVs and the manifest
        #[arg(long)]
        out: PathBuf,
        /// Seed for the reconstruction check points
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize a polynomial over a polyhedron
    Solve {
        /// Polynomial file
        #[arg(long)]
        poly: PathBuf,
        /// Constraint file (inequality and equality rows)
        #[arg(long)]
        constraints: PathBuf,
        /// Starting point as comma-separated floats (must be feasible)
        #[arg(long)]
        x0: Option<String>,
        /// Output directory for trace.csv, summary.txt, manifest.txt
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Moment portfolio selection on the standard simplex
    Mvsk {
        /// Returns file: header of asset names, then one row per period
        #[arg(long, conflicts_with = "synthetic")]
        returns: Option<PathBuf>,
        /// Generate a synthetic market instead, as "assets,periods"
        #[arg(long)]
        synthetic: Option<String>,
        /// Keep only the leading N columns of the returns file
        #[arg(long, requires = "returns")]
        assets: Option<usize>,
        /// Preset (seeking, averse, neutral) or four comma-separated weights
        #[arg(long, default_value = "neutral")]
        omega: String,
        /// Output directory for trace.csv, summary.txt, manifest.txt
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Compare all three solvers over a batch of synthetic instances
    Bench {
        /// Flat key=value configuration (instances, n, t, omega, ...)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed base; instance i uses seed + i
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for bench.csv and the manifest
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_x0(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("x0: bad number {tok:?}")))
        })
        .collect()
}

fn parse_synthetic(s: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::validation(
            "synthetic takes \"assets,periods\", e.g. --synthetic 8,200",
        ));
    }
    let n = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("synthetic: bad asset count {:?}", parts[0])))?;
    let t = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("synthetic: bad period count {:?}", parts[1])))?;
    Ok((n, t))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decompose {
            poly,
            method,
            out,
            seed,
        } => commands::cmd_decompose(&poly, method, &out, seed),
        Command::Solve {
            poly,
            constraints,
            x0,
            out,
            flags,
        } => {
            let settings = flags.settings()?;
            let x0 = x0.as_deref().map(parse_x0).transpose()?;
            commands::cmd_solve(&poly, &constraints, &settings, x0, out.as_deref())
        }
        Command::Mvsk {
            returns,
            synthetic,
            assets,
            omega,
            out,
            flags,
        } => {
            let settings = flags.settings()?;
            let source = match (returns, synthetic) {
                (Some(path), None) => MvskSource::Returns(path),
                (None, Some(spec)) => {
                    let (n, t) = parse_synthetic(&spec)?;
                    MvskSource::Synthetic { n, t }
                }
                (None, None) => {
                    return Err(CliError::validation(
                        "mvsk needs either --returns or --synthetic",
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
            };
            let omega = parse_omega(&omega)?;
            commands::cmd_mvsk(source, assets, omega, &settings, out.as_deref())
        }
        Command::Bench { config, seed, out } => {
            let mut flat = load_flat(config.as_ref())?;
            let instances = flat.take_parsed("instances")?.unwrap_or(5);
            let n = flat.take_parsed("n")?.unwrap_or(8);
            let t = flat.take_parsed("t")?.unwrap_or(200);
            let omega = match flat.take("omega") {
                Some(s) => parse_omega(&s)?,
                None => parse_omega("neutral")?,
            };
            let settings = Settings::resolve(&mut flat, None, None, None, seed)?;
            flat.finish()?;
            let plan = BenchPlan {
                instances,
                n,
                t,
                omega,
                settings,
            };
            commands::cmd_bench(&plan, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
