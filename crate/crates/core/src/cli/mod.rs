//! The `certctl` command surface: argument parsing, spec loading, the
//! five subcommands and their exit codes.
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | verify suite has a failing row |
//! | 2 | bad arguments or spec |
//! | 3 | representation violated (`g(x, μ) ≥ 0`) |
//! | 4 | a required certificate failed |
//! | 5 | grid requested for a problem that is not 2-D |

mod commands;
pub mod spec;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    certify_from_spec, grid_from_spec, prob_from_spec, separable_threshold, threshold_from_spec, CertifyOutcome,
    GridOutput, ProbRecord, ThresholdRecord,
};
pub use spec::{catalog_spec, load_spec, CheckKind, ProblemSpec};
pub use verify::{run_suite, VerifyOptions, VerifyRow};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_REPRESENTATION: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;
pub const EXIT_NOT_2D: i32 = 5;

pub const SEED_ENV: &str = "CERTCTL_SEED";

#[derive(Debug, Parser)]
#[command(name = "certctl", version, about = "Probability functions, concavity certificates and convexity thresholds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate φ(x) for a spec.
    Prob {
        #[arg(long)]
        spec: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the convexity threshold p* for a spec.
    Threshold {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write φ over a 2-D grid plus the convexity-region mask.
    Grid {
        #[arg(long)]
        spec: String,
        /// x_min,x_max,y_min,y_max
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        bbox: Option<Vec<f64>>,
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "grid.csv")]
        out: PathBuf,
    },
    /// Run the built-in reproduction suite.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a concavity certificate described by a spec.
    Certify {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        check: Option<CheckKind>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RepresentationViolated { .. } => EXIT_REPRESENTATION,
            Error::Certification(_)
            | Error::NoSignChange { .. }
            | Error::Oscillation { .. }
            | Error::CriticalPoint { .. } => EXIT_CERTIFICATE,
            _ => EXIT_PARSE,
        };
        Self::new(code, e.to_string())
    }
}

/// Seed precedence: `--seed`, then `CERTCTL_SEED`, then the spec.
pub fn resolve_seed(flag: Option<u64>, spec_seed: u64) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::new(EXIT_PARSE, format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(spec_seed),
    }
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::new(EXIT_PARSE, format!("cannot write {}: {e}", path.display()))),
        None => writeln!(stdout, "{text}").map_err(|e| CliError::new(EXIT_PARSE, e.to_string())),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

/// Runs `certctl` on `args` (including the program name) and returns the
/// exit code. Records go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_PARSE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "certctl: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Prob { spec, x, seed, out } => {
            let spec = load_spec(&spec)?;
            let seed = resolve_seed(seed, spec.integration.seed)?;
            let record = prob_from_spec(&spec, &x, seed)?;
            emit(&to_json(&record), out.as_ref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Threshold { spec, seed, out } => {
            let spec = load_spec(&spec)?;
            let seed = resolve_seed(seed, spec.integration.seed)?;
            let record = threshold_from_spec(&spec, seed)?;
            emit(&to_json(&record), out.as_ref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Grid { spec, bbox, n, seed, out } => {
            let spec = load_spec(&spec)?;
            let seed = resolve_seed(seed, spec.integration.seed)?;
            let bbox = match bbox {
                Some(v) => {
                    let arr: [f64; 4] = v
                        .try_into()
                        .map_err(|_| CliError::new(EXIT_PARSE, "--box needs four values a,b,c,d"))?;
                    Some(arr)
                }
                None => None,
            };
            let summary = grid_from_spec(&spec, bbox, n, seed, &out)?;
            emit(&to_json(&summary), None, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { out } => {
            let rows = run_suite(&VerifyOptions::default());
            let table = verify::render_table(&rows);
            emit(&table, out.as_ref(), stdout)?;
            Ok(if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Certify { spec, check, n, seed, out } => {
            let spec = load_spec(&spec)?;
            let seed = resolve_seed(seed, spec.integration.seed)?;
            let outcome = certify_from_spec(&spec, check, n, seed)?;
            emit(&to_json(&outcome), out.as_ref(), stdout)?;
            if outcome.holds {
                Ok(EXIT_OK)
            } else {
                Err(CliError::new(EXIT_CERTIFICATE, format!("certificate failed: {}", outcome.detail)))
            }
        }
    }
}
