use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussian_cascade::mats::Tolerances;
use gaussian_cascade::Error;

/// Exit code contract.
pub const EXIT_OK: u8 = 0;
pub const EXIT_RESIDUAL: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID_STATE: u8 = 3;
pub const EXIT_DIMENSION: u8 = 4;
pub const EXIT_STABILITY: u8 = 5;

/// Hurwitz margin used by the CLI when verifying.
pub const CLI_HURWITZ_MARGIN: f64 = 1e-10;
/// Steady-state residual below which a verification passes.
pub const CLI_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "gcascade", version, about = "Cascade synthesis and verification for pure Gaussian states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Io {
    /// Input document: a file path, `-` for stdin, or inline JSON.
    #[arg(long)]
    pub input: Option<String>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Tolerance override, e.g. `--tol residual=1e-6`. Repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Realization1,
    Realization2,
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleName::Realization1 => "realization1",
            ExampleName::Realization2 => "realization2",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the cascade preparing the state in --input and verify it.
    Synthesize {
        #[command(flatten)]
        io: Io,
    },
    /// Compose the oscillators in --input and print the composed model and
    /// its QSDE matrices.
    Compose {
        #[command(flatten)]
        io: Io,
    },
    /// Check that the system in --input prepares the state in --target.
    Verify {
        #[command(flatten)]
        io: Io,
        /// Target state document. When omitted, --input must hold
        /// `{"system": .., "target": ..}`.
        #[arg(long)]
        target: Option<String>,
    },
    /// Integrate the moment equations and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        io: Io,
        #[arg(long = "t-end", default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = gaussian_cascade::dynamics::DEFAULT_DT)]
        dt: f64,
        /// Initial covariance: `vacuum`, `thermal:NU`, or a covariance document.
        #[arg(long, default_value = "vacuum")]
        v0: String,
        /// Where to write the summary JSON. Defaults to stdout when --output
        /// is given, stderr otherwise.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Emit one of the built-in two-mode squeezing cascades with its report.
    Example {
        name: ExampleName,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        io: Io,
    },
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub residual: f64,
}

impl RunConfig {
    pub fn from_overrides(pairs: &[String]) -> Result<Self, CliError> {
        let mut cfg = RunConfig {
            tolerances: Tolerances { hurwitz_margin: CLI_HURWITZ_MARGIN, ..Tolerances::default() },
            residual: CLI_RESIDUAL,
        };
        for pair in pairs {
            let (key, val) = pair
                .split_once('=')
                .ok_or_else(|| CliError::parse(format!("--tol expects KEY=VAL, got {pair:?}")))?;
            let val: f64 = val
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| CliError::parse(format!("--tol {key}: {val:?} is not a non-negative number")))?;
            let t = &mut cfg.tolerances;
            match key.trim() {
                "residual" => cfg.residual = val,
                "hurwitz_margin" => t.hurwitz_margin = val,
                "symmetry" => t.symmetry = val,
                "eigen_floor" => t.eigen_floor = val,
                "purity_gate" => t.purity_gate = val,
                "heisenberg" => t.heisenberg = val,
                other => {
                    return Err(CliError::parse(format!(
                        "unknown tolerance {other:?} (expected residual, hurwitz_margin, symmetry, \
                         eigen_floor, purity_gate or heisenberg)"
                    )))
                }
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, kind: "parse", message: message.into() }
    }

    pub fn invalid_state(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID_STATE, kind: "invalid-state", message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Parameter(_) | Error::Shape(_) | Error::Arity(_) | Error::NonFinite(_) => {
                EXIT_PARSE
            }
            Error::Symmetry(_) | Error::Definiteness(_) | Error::NotPure(_) => EXIT_INVALID_STATE,
            Error::Dimension(_) => EXIT_DIMENSION,
            Error::Stability(_) => EXIT_STABILITY,
        };
        CliError { code, kind: e.kind(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::parse(format!("i/o: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.kind, self.message)
    }
}
