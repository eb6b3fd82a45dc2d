use thiserror::Error;

/// Errors raised by the simulator and its verification tooling.
#[derive(Debug, Error)]
pub enum GpeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid physics parameters: {0}")]
    InvalidParams(String),

    #[error("time {t} outside the propagator window (0, {window}]")]
    WindowViolation { t: f64, window: f64 },

    #[error("grid with n = {n} exceeds the oracle cap n <= {cap}")]
    GridTooLarge { n: usize, cap: usize },

    #[error("invalid Lebesgue exponent p = {0}; need 2 <= p < 6")]
    InvalidExponent(f64),

    #[error("Q-chirp factorization of H(t) is singular at t = 0")]
    QFactorizationSingular,

    #[error("grid does not resolve the requested state: {0}")]
    ResolutionTooLow(String),

    #[error("blow-up guard tripped at t = {t}: sup|u| = {linf} exceeds {limit}")]
    BlowupDetected { t: f64, linf: f64, limit: f64 },

    #[error("Picard iteration failed to contract (distance ratios {ratios:?})")]
    NoContraction { ratios: Vec<f64> },

    #[error("grid mismatch between fields or trajectories: {0}")]
    GridMismatch(String),

    #[error("invalid configuration at `{path}`: {reason}")]
    ConfigInvalid { path: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, GpeError>;

impl GpeError {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        GpeError::ConfigInvalid {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        GpeError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
