//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented contract (dimension mismatch,
    /// infeasible parameter, empty batch, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An enumeration or exact computation would exceed its work budget.
    /// Carries the computed cost so the caller can adjust the request.
    #[error("{what} exceeds the cap of {cap}: computed cost {cost}")]
    CapExceeded {
        what: &'static str,
        cost: u128,
        cap: u128,
    },

    /// A data file was missing or malformed.
    #[error("input error in {path}: {detail}")]
    Input { path: String, detail: String },

    /// The optimizer produced a non-finite gradient.
    #[error("non-finite gradient at step {step} (restart {restart}): {detail}")]
    NonFiniteGradient {
        step: usize,
        restart: usize,
        detail: String,
    },

    /// Adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

/// Checks that two dimensions agree, naming the quantity on failure.
pub fn check_dim(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "{what}: expected dimension {expected}, got {got}"
        )))
    }
}
