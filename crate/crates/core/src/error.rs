//! Error taxonomy shared by all modules.
//!
//! Errors fall into the classes the command line maps to exit codes:
//! parameter/domain problems (exit 1), accuracy failures of numerical
//! routines (exit 2), and I/O problems (exit 3, raised as `std::io::Error`
//! by the binary itself). Contract violations and degenerate normalizations
//! are domain-class errors with their own variants so callers can match on
//! them.

use thiserror::Error;

/// Library-wide result alias.
pub type CoreResult<T> = Result<T, CoreError>;

/// All failure modes of the core library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoreError {
    /// A model or run parameter is outside its admissible domain.
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An operation was called with arguments outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied object broke its stated contract.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A normalization factor vanished; the matrix cannot be scaled.
    #[error("degenerate normalization in {context}: scale factor {norm:.3e}")]
    DegenerateNormalization { context: String, norm: f64 },

    /// A numerical routine could not reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A required configuration item is missing or inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),
}

impl CoreError {
    /// Exit code class used by the command line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            CoreError::Accuracy(_) => 2,
            _ => 1,
        }
    }
}
