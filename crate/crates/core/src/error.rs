use thiserror::Error;

/// Every failure the numerical layer can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GapError {
    #[error("invalid interval ({a}, {b}): need a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("Newton iteration for {m}-point Gauss-Legendre nodes did not converge")]
    NonConvergence { m: usize },

    #[error("integrand returned a non-finite value at x = {x}")]
    Evaluation { x: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision loss: 1 - lambda_max = {gap:e} is below {limit:e}; reduce s")]
    PrecisionLoss { gap: f64, limit: f64 },

    #[error("Cholesky pivot {index} failed (value {pivot:e}); smallest accepted pivot {smallest:e}")]
    PivotFailure { index: usize, pivot: f64, smallest: f64 },

    #[error("Szego recursion broke down at step {step}: |reflection coefficient| = {modulus}")]
    RecursionBreakdown { step: usize, modulus: f64 },

    #[error("Omega bracket [{lo:e}, {hi:e}] does not straddle 4 (values {f_lo}, {f_hi})")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("moment matrix is numerically singular (determinant {det:e})")]
    SingularSystem { det: f64 },

    #[error("tuple expectation supports k <= 3, got {k}")]
    DimensionCap { k: usize },

    #[error("point {re} + {im}i lies on a branch cut or singularity")]
    Branch { re: f64, im: f64 },
}

pub type Result<T> = std::result::Result<T, GapError>;
