//! `ramp-exp`: paired RAMP/NDN experiments, rate sweeps and analyzers.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure (including a
//! verification that found violations).

mod generate;
mod inputs;
mod report;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ramp_core::simcore::{CacheMode, Mode};

#[derive(Parser)]
#[command(name = "ramp-exp", version, about = "Anchor-routed forwarding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one or both planes and write CSV summaries.
    Run(RunArgs),
    /// Check path equivalence, loop freedom or the multi-homing conditions.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Write topology, anchor or scenario files.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Ramp,
    Ndn,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Ramp => vec![Mode::Ramp],
            ModeArg::Ndn => vec![Mode::Ndn],
            ModeArg::Both => vec![Mode::Ramp, Mode::Ndn],
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub anchors: PathBuf,
    /// Scenario TOML; flags override its values.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    /// Interests per second per consumer router.
    #[arg(long, conflicts_with = "sweep")]
    pub rate: Option<f64>,
    /// Comma-separated rates, e.g. 100,500,1000,2000.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub sweep: Option<Vec<f64>>,
    /// `none` or `lru:N`.
    #[arg(long, value_parser = parse_cache)]
    pub cache: Option<CacheMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated seconds.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write one event trace per run.
    #[arg(long)]
    pub trace: bool,
}

fn parse_cache(s: &str) -> Result<CacheMode, String> {
    s.parse().map_err(|e: ramp_core::error::ConfigError| e.to_string())
}

#[derive(Subcommand)]
pub enum VerifyCommand {
    /// Compare per-prefix FIB routes with PRT+FAB routes for every origin.
    Paths {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        anchors: PathBuf,
    },
    /// Seeded fuzz runs with perturbed routing tables, audited for loops.
    Loops {
        /// Runs per severity.
        #[arg(long, default_value_t = 100)]
        runs: u64,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.1,0.5,1.0")]
        severity: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        routers: u32,
        /// Simulated seconds per run.
        #[arg(long, default_value_t = 2.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the multi-homing advantage conditions after a link failure.
    Multihoming(verify::MultihomingArgs),
}

#[derive(Subcommand)]
pub enum GenerateCommand {
    /// Synthetic backbone topology.
    Topology {
        #[arg(long, default_value_t = 153)]
        routers: u32,
        #[arg(long, default_value_t = 184)]
        links: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 30.0)]
        delay_ms: f64,
        #[arg(long, default_value_t = 10_000.0)]
        rate_mbps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-homed prefixes on randomly chosen anchor routers.
    Anchors {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value_t = 20)]
        anchors: usize,
        #[arg(long, default_value_t = 500)]
        prefixes: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scenario file with every default spelled out.
    Scenario {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run::cmd_run(&args),
        Command::Verify(v) => verify::cmd_verify(v),
        Command::Generate(g) => generate::cmd_generate(g),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
