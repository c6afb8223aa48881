//! The `floorlog` command line: reproducible experiments on
//! `a(n) = floor(alpha + log_k(n+1))`.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 budget exceeded,
//! 4 internal consistency failure (including self-test mismatches).

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{CliError, ExperimentConfig, Outcome};

#[derive(Parser, Debug)]
#[command(name = "floorlog", version, about = "Exact experiments on floor(alpha + log_k(n+1))")]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base k, at least 2.
    #[arg(long, global = true, default_value_t = 2)]
    pub k: u64,
    /// Exponent shift: a/b, a/b+log(p/q), log(p/q) or dec:<digits>~<radius>.
    #[arg(long, global = true, default_value = "1/2", allow_hyphen_values = true)]
    pub alpha: String,
    /// Output format; `report` defaults to json, everything else to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for the randomized consistency checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock times. Output is no longer byte-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// series coefficients b(0), b(1), ...
    B,
    /// digit transform g(1), g(2), ...
    G,
    /// sequence terms a(0), a(1), ...
    A,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sequence terms with their base-k words, grouped by word length.
    Terms {
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Series coefficients: brute force against closed form and decomposition.
    Coeffs {
        #[arg(long, default_value_t = 9)]
        mmax: u32,
    },
    /// Digit transform g against the independent digit oracle, with period search.
    Digits {
        /// Number of digits (the period search horizon).
        #[arg(long, default_value_t = 64)]
        mmax: u32,
        /// Largest preperiod + period searched; defaults to a third of the horizon.
        #[arg(long)]
        max_span: Option<usize>,
    },
    /// Rank growth of the k-kernel.
    Kernel {
        #[arg(long, default_value_t = 6)]
        emax: u32,
        #[arg(long, default_value_t = 1024)]
        trunc: usize,
    },
    /// Run the recurrence detectors on a sequence file or a generated sequence.
    Guess {
        /// Whitespace-separated integers.
        #[arg(long, conflicts_with = "gen")]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        gen: Option<Generator>,
        /// Terms produced by --gen.
        #[arg(long, default_value_t = 60)]
        count: usize,
        #[command(flatten)]
        bounds: DetectorBounds,
    },
    /// Deterministic JSON bundle of all of the above for one (k, alpha).
    Report {
        #[arg(long, default_value_t = 20)]
        mmax: u32,
        #[arg(long, default_value_t = 64)]
        horizon: u32,
        #[arg(long, default_value_t = 6)]
        emax: u32,
        #[arg(long, default_value_t = 1024)]
        trunc: usize,
        /// Terms of b handed to the detectors.
        #[arg(long, default_value_t = 60)]
        count: usize,
        /// Random samples per consistency property.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[command(flatten)]
        bounds: DetectorBounds,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct DetectorBounds {
    /// Largest order of a constant-coefficient recurrence.
    #[arg(long, default_value_t = 20)]
    pub max_order: usize,
    /// Largest numerator and denominator degree of a rational generating function.
    #[arg(long, default_value_t = 20)]
    pub max_degree: usize,
    /// Largest order of a polynomial-coefficient recurrence.
    #[arg(long, default_value_t = 3)]
    pub prec_order: usize,
    /// Largest coefficient degree of a polynomial-coefficient recurrence.
    #[arg(long, default_value_t = 3)]
    pub prec_degree: usize,
    /// Largest preperiod + period for digit sequences.
    #[arg(long, default_value_t = 20)]
    pub period_span: usize,
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = ExperimentConfig::from_common(&cli.common)?;
    match cli.command {
        Command::Terms { start, count } => commands::terms(&cfg, start, count),
        Command::Coeffs { mmax } => commands::coeffs(&cfg, mmax),
        Command::Digits { mmax, max_span } => commands::digits(&cfg, mmax, max_span),
        Command::Kernel { emax, trunc } => commands::kernel(&cfg, emax, trunc),
        Command::Guess { input, gen, count, bounds } => commands::guess(&cfg, input.as_deref(), gen, count, bounds),
        Command::Report { mmax, horizon, emax, trunc, count, samples, bounds } => report::report(
            &cfg,
            &report::ReportSizes { m_max: mmax, horizon, e_max: emax, trunc_len: trunc, terms: count, samples },
            bounds,
        ),
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Runs the command line given by `args` (program name first) without touching
/// the process's streams.
pub fn run_args<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code().clamp(0, 255) as u8;
            return if e.use_stderr() {
                Invocation { stdout: String::new(), stderr: text, code }
            } else {
                Invocation { stdout: text, stderr: String::new(), code }
            };
        }
    };
    match execute(cli) {
        Ok(out) => Invocation { stdout: out.text, stderr: String::new(), code: out.code },
        Err(e) => Invocation { stdout: String::new(), stderr: format!("floorlog: {e}\n"), code: e.exit_code() },
    }
}
