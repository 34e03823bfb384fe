use thiserror::Error;

/// Errors raised by the solvers and channel-model routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid channel dimensions: {0}")]
    Dimensions(String),

    /// The normalized channel has no random eigenvalues; the mutual
    /// information is the constant `pinned_modes * log(1+rho) / nt`.
    #[error("degenerate channel: all {pinned_modes} active eigenvalues are pinned at 1 (Nt = {nt})")]
    Deterministic { pinned_modes: usize, nt: usize },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("eigenvalue {value} outside [0, 1]: source matrix is not a unitary truncation")]
    NonUnitary { value: f64 },

    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("exact solver refused: {0}")]
    Budget(String),

    #[error("exact solver lost precision: P_out = {value} at {precision_bits} bits")]
    Cancellation { value: f64, precision_bits: u32 },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("nonlinear solve failed: {message} (last iterate a = {a}, b = {b})")]
    Convergence { message: String, a: f64, b: f64 },

    #[error("rate {rate} outside the achievable interval ({low}, {high})")]
    RateOutOfRange { rate: f64, low: f64, high: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
