//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A point that should lie strictly inside the unit disk does not.
    #[error("point outside the open unit disk (|z| = {modulus})")]
    OutsideDisk { modulus: f64 },

    /// Two points of a sequence coincide within the distinctness tolerance.
    #[error("degenerate sequence: points {i} and {j} coincide (rho = {rho:.3e})")]
    DegenerateSequence { i: usize, j: usize, rho: f64 },

    /// A scalar argument is outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// Coefficient extraction could not reach the requested accuracy.
    #[error("taylor extraction residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy { residual: f64, tolerance: f64 },

    /// A symbol could not be constructed with the given parameters.
    #[error("symbol construction failed: {0}")]
    Construction(String),

    /// The operation needs an evaluation the symbol does not provide
    /// (e.g. off the real diameter for a radial-profile-only symbol).
    #[error("unsupported for symbol `{symbol}`: {what}")]
    Unsupported { symbol: String, what: String },

    /// A symbol grammar string could not be parsed.
    #[error("invalid symbol spec `{0}`: {1}")]
    SymbolParse(String, String),

    /// Decay-law fitting was asked for a range it cannot handle.
    #[error("fit error: {0}")]
    Fit(String),

    /// CLI / run configuration error.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
