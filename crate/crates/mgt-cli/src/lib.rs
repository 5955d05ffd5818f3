//! Experiment front end for the spectral kernels in `mgt-core`.
//!
//! Each subcommand resolves its parameters from flags plus an optional
//! `key=value` config file (flags win on conflict), runs one experiment,
//! and writes a CSV or JSON artifact.  Outputs are byte-deterministic for
//! a fixed seed: floats are printed with 17 significant digits, reductions
//! run in fixed order, and the only randomness is the seeded generator.
//!
//! Exit codes: 0 success (a blow-up is a result, not an error), 1 for
//! configuration problems, 2 for numerical failures.

pub mod config;
pub mod experiments;
pub mod format;

use std::fmt;

/// Error classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or parameter domain: exit 1.
    Config(String),
    /// The computation itself broke down: exit 2.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mgt_core::Error> for CliError {
    fn from(err: mgt_core::Error) -> Self {
        use mgt_core::Error as E;
        match err {
            E::InvalidArgument(_) | E::UnsupportedBasis | E::Regime { .. }
            | E::DegenerateWindow => CliError::Config(err.to_string()),
            E::ShapeMismatch { .. } | E::NearSingular { .. } | E::Data(_)
            | E::NumericalFailure(_) => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(format!("io: {err}"))
    }
}
