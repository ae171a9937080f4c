use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("step size underflow at t = {t} ps (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t} ps")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("steady state did not converge: residual {residual:e} after {iterations} refinements{}", detuning.map(|d| format!(" (laser detuning {d} µeV)")).unwrap_or_default())]
    SteadyStateNotConverged {
        residual: f64,
        iterations: usize,
        detuning: Option<f64>,
    },

    #[error("singular linear system")]
    Singular,

    #[error("truncation did not converge below n_fock = {cap}")]
    TruncationCap { cap: usize },

    #[error("integration grid failure: integrated correlation {value:e} is negative")]
    NegativeCorrelation { value: f64 },

    #[error("model violation: bunched light (g2 = {g2})")]
    BunchedLight { g2: f64 },

    #[error("inconsistent moments: P({k}) = {value:e}")]
    InconsistentMoments { k: usize, value: f64 },

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error("photon-number distribution is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("click file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
