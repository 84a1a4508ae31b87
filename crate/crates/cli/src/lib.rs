//! Command-line front end for `posetrep`: JSON codecs and the commands
//! behind the `posetrep` binary.

pub mod codec;
pub mod commands;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub use commands::run;

/// Environment variable that overrides enumeration budgets.
pub const BUDGET_ENV: &str = "POSETREP_BUDGET";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] posetrep::Error),
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(posetrep::Error::BudgetExceeded { .. })
            | CliError::Core(posetrep::Error::UndecidableAtBudget { .. }) => 3,
            _ => 2,
        }
    }
}

/// Output of a command: the JSON document and the exit code (0, or 1 when
/// `verify` finds a failing claim).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub json: Value,
    pub code: i32,
}

impl Outcome {
    pub fn ok(json: Value) -> Self {
        Outcome { json, code: 0 }
    }

    /// Compact JSON with sorted keys and a trailing newline.
    pub fn canonical(&self) -> String {
        format!("{}\n", self.json)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "posetrep",
    version,
    about = "Representations of finite posets over exact fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    Sum,
    Intersection,
}

/// Input paths accept `-` for stdin.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide finite type and report a dominated critical dimension.
    CheckFiniteType {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        dim: PathBuf,
        /// Also run the weak-positivity scan.
        #[arg(long)]
        scan: bool,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Evaluate the Tits form.
    Tits {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        dim: PathBuf,
    },
    /// List the critical subposets.
    Criticals {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Derive a poset at a maximal element.
    Derive {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        pivot: String,
    },
    /// Integrate a block matrix on the derived poset back to the base.
    Integrate {
        #[arg(long)]
        derived: PathBuf,
        #[arg(long)]
        rep: PathBuf,
    },
    /// Differentiate a block matrix on the base poset.
    Differentiate {
        #[arg(long)]
        derived: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, value_enum, default_value_t = Reading::Sum)]
        reading: Reading,
    },
    /// Build the indecomposable of a finite-type dimension, if any.
    Construct {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        dim: PathBuf,
        /// A prime or Q.
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Count isomorphism classes and indecomposables by enumeration.
    BruteCount {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        dim: PathBuf,
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Split a block matrix into indecomposables.
    Decompose {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        rep: PathBuf,
    },
    /// Run the classification harness on every dimension up to a total.
    Verify {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        max_total: usize,
        /// Comma-separated primes.
        #[arg(long, default_value = "2")]
        fields: String,
        #[arg(long)]
        budget: Option<u128>,
    },
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let name = path.display().to_string();
    let mut text = String::new();
    let res = if name == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Io {
        path: name.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: name, source })
}

/// The enumeration budget: the flag, then the environment, then `default`.
pub fn resolve_budget(flag: Option<u128>, default: u128) -> Result<u128, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV} must be an integer, got `{s}`"))),
        Err(_) => Ok(default),
    }
}
