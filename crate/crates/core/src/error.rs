use thiserror::Error;

/// Errors raised by estimators, interval constructors and numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SveError {
    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("value outside its domain: {0}")]
    Domain(String),

    /// Both arms observed zero events, so the effect is 0/0.
    #[error("effect is undefined: {0}")]
    UndefinedEffect(String),

    /// The estimate sits at +/-1 where the atanh scale diverges.
    #[error("estimate on the boundary ({estimate}); {hint}")]
    Boundary { estimate: f64, hint: &'static str },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    Bracketing { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, SveError>;
