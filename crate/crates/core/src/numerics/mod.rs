//! Deterministic numeric kernels shared by the likelihood, interval and
//! simulation code.

mod optimize;
mod rng;
mod root;

pub use optimize::{maximize_scalar, Maximum, OptimizerConfig};
pub use rng::{binomial_sample, mix64, sample_binomial, RngSeed, StreamRng};
pub use root::find_root;

use crate::error::{Result, SveError};

/// `atanh` restricted to the open interval (-1, 1).
pub fn guarded_atanh(x: f64) -> Result<f64> {
    if x > -1.0 && x < 1.0 {
        Ok(x.atanh())
    } else {
        Err(SveError::Domain(format!("atanh is only finite on (-1, 1), got {x}")))
    }
}

/// `tanh` of a finite argument; the result is always within [-1, 1].
pub fn guarded_tanh(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(SveError::Domain("tanh of NaN".into()));
    }
    Ok(x.tanh())
}
