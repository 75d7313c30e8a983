use nalgebra::DVector;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("objective returned a non-finite value or gradient at a point of dimension {}", point.len())]
    Evaluation { point: DVector<f64> },

    #[error("politician `{politician}` broke its contract at iteration {iteration}: f(answer) = {answered} > f(query) = {queried}")]
    ContractViolation {
        politician: String,
        iteration: usize,
        answered: f64,
        queried: f64,
    },

    #[error("point is outside the spanned subspace (residual {residual:e}, tolerance {tolerance:e})")]
    Subspace { residual: f64, tolerance: f64 },

    #[error("ball region is empty at alpha = {alpha}")]
    EmptyRegion { alpha: f64 },

    #[error("point is not strictly inside ball {ball} (slack {slack:e})")]
    Domain { ball: usize, slack: f64 },

    #[error("centering failed: {0}")]
    Centering(String),

    #[error("line search diverged: objective kept decreasing up to step {step:e}")]
    LineSearchDivergence { step: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error(transparent)]
    Parse(#[from] crate::problems::libsvm::ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
