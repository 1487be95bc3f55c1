use thiserror::Error;

/// Errors produced by the solver suite.
///
/// Evolution stop rules (amplitude growth, drift, non-finite values) are
/// reported through [`crate::evolution::HaltReason`], not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("operation requires a {expected} grid")]
    GridMismatch { expected: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Petviashvili iterate collapsed (|SR| = {sr:e})")]
    DegenerateIterate { sr: f64 },

    #[error("no convergence after {iterations} iterations (last update {last_delta:e})")]
    NoConvergence { iterations: usize, last_delta: f64 },

    #[error("rescaled profile is not resolved by the grid: {0}")]
    ResampleOutOfBand(String),

    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },

    #[error("curvature at the frame center is degenerate (v_xixi(0) = {curvature:e})")]
    DegenerateCurvature { curvature: f64 },

    #[error("peak is ambiguous: nodes {first} and {second} tie")]
    AmbiguousPeak { first: usize, second: usize },

    #[error("fit window half-width {window} exceeds the grid extent {extent}")]
    WindowOutOfRange { window: f64, extent: f64 },

    #[error("mass-energy bound has no real positive roots (discriminant {discriminant:e})")]
    NoRealRoots { discriminant: f64 },

    #[error("profile functionals do not converge under refinement (relative change {change:e})")]
    NonIntegrableProfile { change: f64 },

    #[error("bracket [{lo}, {hi}] does not straddle the blow-up transition")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
