use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("{function}: argument {value} outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A structurally invalid argument (wrong length, wrong parity, bad grid).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested radial moment is infinite for this number of degrees of freedom.
    #[error("moment of order {order} does not exist for nu = {nu} (requires order < nu)")]
    MomentDoesNotExist { order: f64, nu: f64 },

    /// An iterative scheme stopped before reaching its tolerance.
    #[error("{method} did not converge; best estimate {best_estimate:e} (error estimate {error_estimate:e})")]
    Convergence {
        method: &'static str,
        best_estimate: f64,
        error_estimate: f64,
    },

    /// A numerical check contradicted the monotonicity theorem.
    #[error("monotonicity inconsistency for k = {k}: {detail}")]
    Inconsistent { k: u32, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
