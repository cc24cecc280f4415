use thiserror::Error;

/// Errors raised by the solvers, sensitivity machinery and design driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: nonpositive viscosity or permeability, boundary
    /// kinds the model does not accept, out-of-range design values.
    #[error("invalid input: {0}")]
    Input(String),

    /// A field does not match the grid it is used with.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Velocity prescribed on the whole boundary with a nonzero net flux.
    #[error("incompatible boundary data: net outward flux {net_flux:.3e} exceeds tolerance {tolerance:.3e}")]
    Compatibility { net_flux: f64, tolerance: f64 },

    /// The linear solver did not reach the requested tolerance.
    #[error("linear solver did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// `check_compatibility` called on a boundary that is not fully velocity-prescribed.
    #[error("compatibility is only defined when velocity is prescribed on the entire boundary")]
    NotPureVelocity,

    /// The analytical adjoint only exists for classes A-D.
    #[error("no analytical adjoint for a problem of class {0}")]
    NotAnalyticallySolvable(String),

    /// The constant-pressure datum shift requires one constant pressure value and no body force.
    #[error("pressure datum cannot be shifted: {0}")]
    NotShiftable(String),

    /// An operation that is only meaningful for classes A-D received a general problem.
    #[error("unsupported for this problem: {0}")]
    Unsupported(String),

    /// A checked property did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
