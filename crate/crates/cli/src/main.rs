//! `synth` — command-line driver for cascade synthesis, rule induction,
//! hybrid inference, and search-space accounting.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse or I/O error,
//! 3 generation exhaustion.

mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use synth_core::solvers::{SafetyMode, StrategyConfig, StrategyId};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Exhausted(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Exhausted(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Exhausted(msg) => write!(f, "generation exhausted: {msg}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<synth_core::records::JsonlError> for CliError {
    fn from(err: synth_core::records::JsonlError) -> Self {
        CliError::Input(err.to_string())
    }
}

#[derive(Parser)]
#[command(name = "synth", version, about = "Symbolic synthesis of string-rewrite cascades and train-classification rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a task file with one strategy or an ensemble.
    Solve(commands::SolveArgs),
    /// Generate tasks with known ground-truth cascades.
    Gen(commands::GenArgs),
    /// Generate train-classification instances with planted rules.
    GenSlr(commands::GenSlrArgs),
    /// Induce classification rules for a task file.
    Slr(commands::SlrArgs),
    /// Solver-first inference with a fallback candidate generator.
    Hybrid(commands::HybridArgs),
    /// Print the rewrite-program and cascade search-space counts.
    Space(commands::SpaceArgs),
    /// Print the rule candidate count for a literal vocabulary size.
    SlrSpace(commands::SlrSpaceArgs),
    /// Re-solve a task file under a budget compression sweep.
    Compress(commands::CompressArgs),
}

/// Solver configuration flags shared by every solving command.
#[derive(Args, Debug, Clone)]
pub struct SolverFlags {
    /// Run a single strategy by id.
    #[arg(long, conflicts_with = "ensemble")]
    strategy: Option<String>,
    /// Comma-separated strategy ids, or "all".
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long, default_value_t = 16)]
    beam_width: usize,
    #[arg(long, default_value_t = 64)]
    max_candidates: usize,
    #[arg(long, default_value_t = 2)]
    lookahead: u8,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SafetyModeArg::TwoPhase)]
    safety_mode: SafetyModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SafetyModeArg {
    Strict,
    TwoPhase,
    Off,
}

impl SolverFlags {
    pub fn config(&self) -> StrategyConfig {
        StrategyConfig {
            beam_width: self.beam_width,
            max_candidates_per_step: self.max_candidates,
            lookahead: self.lookahead,
            restarts: self.restarts,
            seed: self.seed,
            safety_mode: match self.safety_mode {
                SafetyModeArg::Strict => SafetyMode::Strict,
                SafetyModeArg::TwoPhase => SafetyMode::TwoPhase,
                SafetyModeArg::Off => SafetyMode::Off,
            },
        }
    }

    pub fn strategies(&self) -> Result<Vec<StrategyId>, CliError> {
        if let Some(single) = &self.strategy {
            let id = single
                .parse::<StrategyId>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            return Ok(vec![id]);
        }
        match self.ensemble.as_deref() {
            None | Some("all") => Ok(StrategyId::ALL.to_vec()),
            Some(list) => list
                .split(',')
                .map(|s| s.trim().parse::<StrategyId>().map_err(|e| CliError::Usage(e.to_string())))
                .collect(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are not usage errors
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Gen(args) => commands::gen(args),
        Command::GenSlr(args) => commands::gen_slr(args),
        Command::Slr(args) => commands::slr(args),
        Command::Hybrid(args) => commands::hybrid(args),
        Command::Space(args) => commands::space(args),
        Command::SlrSpace(args) => commands::slr_space(args),
        Command::Compress(args) => commands::compress(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
