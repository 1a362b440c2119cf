//! `scramble`: ensemble runs, fits, OTOCs and oracle checks for super-Clifford
//! circuits. Every run writes CSV or JSON files plus a manifest recording the
//! resolved settings, from which the run can be repeated bit for bit.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error,
//! 4 oracle check failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
    CheckFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::CheckFailed(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<scramble_core::Error> for CliError {
    fn from(e: scramble_core::Error) -> Self {
        use scramble_core::Error as E;
        match e {
            E::FitWindow(_) | E::DegenerateFit(_) | E::InvalidTableau(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "scramble", version, about = "Operator scrambling in super-Clifford circuits")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, env = "SCRAMBLE_OUT_DIR", default_value = "scramble-out")]
    out_dir: PathBuf,

    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON config file or a manifest from an earlier run. Flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Entropy curves per N and scrambling times across N.
    EntropySweep,
    /// Saturation and log-scaling fits of entropy-sweep output.
    Fit {
        /// Directory holding entropy-sweep output [default: --out-dir].
        #[arg(long)]
        input_dir: Option<PathBuf>,
    },
    /// OTOC ensemble traces.
    Otoc,
    /// Late-time OTOC plateau of V.
    Plateau,
    /// Differential checks against brute-force oracles.
    OracleCheck {
        /// Run the checks with a deliberately broken T sign rule.
        #[arg(long, hide = true)]
        inject_sign_bug: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EntropySweep => "entropy-sweep",
            Command::Fit { .. } => "fit",
            Command::Otoc => "otoc",
            Command::Plateau => "plateau",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    let file = match &cli.config {
        Some(path) => Settings::from_file(path, name)?,
        None => Settings::default(),
    };
    let settings = Settings::defaults().overlay(file).overlay(cli.settings.clone());
    let ctx = commands::Context {
        subcommand: name,
        out_dir: cli.out_dir.clone(),
        settings,
    };
    let command = cli.command.clone();
    let body = move || match command {
        Command::EntropySweep => commands::entropy_sweep(&ctx),
        Command::Fit { input_dir } => commands::fit(&ctx, input_dir),
        Command::Otoc => commands::otoc(&ctx),
        Command::Plateau => commands::plateau(&ctx),
        Command::OracleCheck { inject_sign_bug } => commands::oracle_check(&ctx, inject_sign_bug),
    };
    scramble_core::experiments::with_threads(cli.threads, body)?
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
