//! `chur`: command-line driver for the verification library.
//!
//! Exit codes: 0 when every checked relation holds, 1 on a violation, 2 on a
//! usage or configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use report::Output;

#[derive(Debug, Parser)]
#[command(name = "chur", version, about = "Characteristic-function uncertainty relation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, env = "CHUR_DEFAULT_CONFIG")]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    grid_n: Option<usize>,

    #[arg(long, global = true)]
    grid_length: Option<f64>,

    #[arg(long, global = true)]
    hbar: Option<f64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "chur-out")]
    out: PathBuf,

    /// Worker threads (0: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Scale the bound by 0.4 in every verdict; the run should then fail.
    #[arg(long, global = true)]
    self_test: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Random-state sweep with Gram, proof-chain and representation checks.
    Verify,
    /// Bound and Gaussian curve against γ.
    Figure1,
    /// Full (λx, λp) sweep of one state.
    Sweep,
    /// Detection-mask readouts and their relation.
    Mask,
    /// Ancilla-qubit readout of the momentum characteristic function.
    Qubit,
    /// Clock/shift Weyl pairs in finite dimension.
    FiniteDim,
    /// Volume fluctuation bound of the loop quantum cosmology example.
    Lqc,
    /// Search for states close to the bound.
    Tightness,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Figure1 => "figure1",
            Command::Sweep => "sweep",
            Command::Mask => "mask",
            Command::Qubit => "qubit",
            Command::FiniteDim => "finite-dim",
            Command::Lqc => "lqc",
            Command::Tightness => "tightness",
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        grid_n: cli.grid_n,
        grid_length: cli.grid_length,
        hbar: cli.hbar,
        workers: cli.workers,
        self_test: cli.self_test,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = effective_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().context("thread pool")?;
    let out = Output::create(&cli.out)?;
    let command = cli.command;
    let report = pool.install(|| match command {
        Command::Verify => commands::verify(&cfg, &out),
        Command::Figure1 => commands::figure1(&cfg, &out),
        Command::Sweep => commands::sweep(&cfg, &out),
        Command::Mask => commands::mask(&cfg, &out),
        Command::Qubit => commands::qubit(&cfg, &out),
        Command::FiniteDim => commands::finite_dim(&cfg, &out),
        Command::Lqc => commands::lqc(&cfg, &out),
        Command::Tightness => commands::tightness(&cfg, &out),
    })?;
    let summary = out.summary(command.name(), &report, &cfg)?;
    if report.passed() {
        println!("{}: pass ({})", command.name(), summary.display());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{}: FAIL [{}] ({})", command.name(), report.failures().join(", "), summary.display());
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
