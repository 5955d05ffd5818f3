//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the library layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A scalar argument violated its precondition.
    InvalidArgument(&'static str),
    /// Two vectors that must share a length do not.
    ShapeMismatch { expected: usize, got: usize },
    /// The operation needs the built-in Dirichlet sine basis but the
    /// eigenvalue sequence is user-supplied.
    UnsupportedBasis,
    /// A resolvent was requested within `1e-12 * |a|` of a spectral point.
    /// Carries the offending spectral value and the requested `lambda`.
    NearSingular {
        spectral_value: Complex64,
        lambda: Complex64,
    },
    /// The operation is only meaningful in the parabolic regime `eta > 1`.
    Regime { eta: f64 },
    /// A rate-measurement window `[t0, t1]` with `0 < t0 < t1` was expected.
    DegenerateWindow,
    /// Input data violated a representation contract (e.g. a physical field
    /// with a non-negligible imaginary part).
    Data(String),
    /// A numerical computation produced NaN or otherwise broke down.
    NumericalFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected length {expected}, got {got}")
            }
            Error::UnsupportedBasis => {
                write!(f, "operation requires the built-in Dirichlet sine basis")
            }
            Error::NearSingular {
                spectral_value,
                lambda,
            } => write!(
                f,
                "lambda = {lambda} is numerically on the spectrum (nearest spectral value {spectral_value})"
            ),
            Error::Regime { eta } => write!(
                f,
                "operation requires the parabolic regime eta > 1 (got eta = {eta})"
            ),
            Error::DegenerateWindow => write!(f, "degenerate time window: need 0 < t0 < t1"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
