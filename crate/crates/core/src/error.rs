use thiserror::Error;

/// Errors raised across the coordinate, jet, plumbing and estimate layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a type invariant (parameter outside its range, bad cutoff, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A map would leave the admissible coordinate range.
    #[error("range error: {0}")]
    Range(String),

    /// A finite-difference grid point fell outside the domain of the evaluated map.
    #[error("evaluation left the domain at step {step:e}: {reason}")]
    EvaluationDomain { step: f64, reason: String },

    /// Richardson extrapolants did not settle.
    #[error("extrapolation unstable: {0}")]
    Instability(String),

    /// Gauge points collide or violate the cyclic order.
    #[error("degenerate gauge: {0}")]
    DegenerateGauge(String),

    /// A cross-ratio with a 0/0 pattern.
    #[error("degenerate cross-ratio: {0}")]
    Degenerate(String),

    /// Two chart centers do not overlap in the required way.
    #[error("no overlap: {0}")]
    NoOverlap(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
