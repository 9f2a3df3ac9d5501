mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use toa_lab::kernels::Region;

use crate::config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "toa-lab",
    version,
    about = "Time-of-arrival operators and barrier traversal times"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Converging factor for position-space eigenfunctions.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of points in the swept grid.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RegionArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    #[value(name = "III")]
    Iii,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::I => Region::I,
            RegionArg::Ii => Region::II,
            RegionArg::Iii => Region::III,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dump a time kernel on the (η, ζ) grid.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Single barrier region instead of the stitched kernel.
        #[arg(long, value_enum)]
        region: Option<RegionArg>,
    },
    /// Deform the Weyl kernel and compare with closed forms where known.
    Deform {
        #[command(flatten)]
        common: Common,
    },
    /// Barrier traversal time by all three routes.
    TunnelTime {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenfunctions in momentum and position space.
    Eigen {
        #[command(flatten)]
        common: Common,
    },
    /// Arrival-time distributions with and without the barrier.
    Distribution {
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;
pub const EXIT_ACCEPTANCE: u8 = 3;

pub fn load(common: &Common) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", common.config.display()))?;
    if let Some(t) = common.tol {
        cfg.physical.tol.rel_tol = t;
    }
    if let Some(e) = common.epsilon {
        cfg.epsilon = e;
    }
    if common.grid.is_some_and(|n| n < 3) {
        bail!(toa_lab::Error::InvalidInput("--grid needs at least 3 points".into()));
    }
    Ok(cfg.validated()?)
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("TOA_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        toa_lab::Error::InvalidInput(format!("TOA_LAB_THREADS must be a positive integer, got `{v}`"))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    match cli.command {
        Command::Kernel { common, region } => commands::kernel(&common, region.map(Region::from)),
        Command::Deform { common } => commands::deform(&common),
        Command::TunnelTime { common } => commands::tunnel_time(&common),
        Command::Eigen { common } => commands::eigen(&common),
        Command::Distribution { common } => commands::distribution(&common),
        Command::Verify { suite, out } => commands::verify(&suite, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let nonconv = e.chain().any(|c| {
        c.downcast_ref::<toa_lab::Error>()
            .is_some_and(|t| t.is_non_convergence())
    });
    if nonconv {
        EXIT_NONCONVERGENCE
    } else {
        EXIT_VALIDATION
    }
}
