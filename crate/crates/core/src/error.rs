use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The point sits exactly on a branch endpoint `β/(2j±1)` where the map
    /// is discontinuous; pointwise operator values are ambiguous there.
    #[error("x = {x} is a branch endpoint; perturb the sample point")]
    BranchEndpoint { x: f64 },

    /// Evaluation hit a pole of the defining formula (e.g. `{β/x}₂ = 0`).
    #[error("evaluation singularity at x = {x}: {what}")]
    Singularity { x: f64, what: String },

    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    /// Adaptive quadrature exhausted its panel budget. The best estimate is
    /// carried along so callers can still inspect it.
    #[error(
        "quadrature did not reach tolerance {requested:.3e} (error estimate {achieved:.3e})"
    )]
    QuadratureConvergence {
        requested: f64,
        achieved: f64,
        best_re: f64,
        best_im: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenConvergence { iterations: usize, residual: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}
