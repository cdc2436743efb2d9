//! `qimage`: sweeps over image encodings, MPS compression, Fourier error
//! bounds and variational circuits, emitting CSV/JSON for offline plotting.
//!
//! Exit codes: 0 success, 1 partial or runtime failure, 2 invalid arguments.

mod commands;
mod corpus;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qimage", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Base seed; per-item seeds are derived from it deterministically.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode one image as a state vector.
    Encode(commands::EncodeArgs),
    /// Decode a state vector back into an image.
    Decode(commands::DecodeArgs),
    /// Compress a corpus to MPS over encodings, indexings, resolutions and χ.
    Compress(commands::CompressArgs),
    /// Write the centered DFT spectrum of an image, optionally truncated.
    Spectrum(commands::SpectrumArgs),
    /// Compare the Fourier error bound with Fourier and SVD truncation.
    Bound(commands::BoundArgs),
    /// Generate synthetic decay-model images.
    Synth(commands::SynthArgs),
    /// Optimize circuit ansätze against encoded images or MPS targets.
    Optimize(commands::OptimizeArgs),
}

/// Failure class of a command.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<qimage::Error> for CliError {
    fn from(e: qimage::Error) -> Self {
        match e {
            qimage::Error::InvalidArgument(_) | qimage::Error::TooLarge(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
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

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Number of items that failed and were skipped.
pub struct Outcome {
    pub failures: usize,
}

fn run(cli: Cli) -> CliResult<Outcome> {
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    std::fs::create_dir_all(&cli.common.out)?;
    let c = &cli.common;
    match &cli.command {
        Command::Encode(a) => commands::encode(c, a),
        Command::Decode(a) => commands::decode(c, a),
        Command::Compress(a) => commands::compress(c, a),
        Command::Spectrum(a) => commands::spectrum(c, a),
        Command::Bound(a) => commands::bound(c, a),
        Command::Synth(a) => commands::synth(c, a),
        Command::Optimize(a) => commands::optimize(c, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome { failures: 0 }) => ExitCode::SUCCESS,
        Ok(Outcome { failures }) => {
            eprintln!("qimage: {failures} item(s) failed");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("qimage: invalid arguments: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("qimage: {msg}");
            ExitCode::from(1)
        }
    }
}
