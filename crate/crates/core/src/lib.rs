//! Symmetric vaccine efficacy (SVE).
//!
//! SVE compares infection risks in an unvaccinated arm (`p0`) and a
//! vaccinated arm (`p1`) on a bounded scale:
//!
//! ```text
//! SVE = (p0 - p1) / max(p0, p1)      in [-1, 1]
//! ```
//!
//! It equals traditional vaccine efficacy `1 - p1/p0` when the vaccine is
//! protective and mirrors it when the vaccine is harmful. The crate provides
//! point estimators, delta-method variances, Wald / tanh-Wald /
//! profile-likelihood intervals, a Monte Carlo harness for operating
//! characteristics and the `sve` command-line tool.

pub mod cli;
pub mod error;
pub mod estimands;
pub mod intervals;
pub mod likelihood;
pub mod numerics;
pub mod simulation;
pub mod variance;

pub use error::{Result, SveError};
pub use estimands::{
    empirical_risks, sve_bias_corrected, sve_from_theta, sve_point, theta_from_sve, ve_point,
    EffectEstimate, EffectKind, RelativeEffect, RiskPair, TwoArmCounts,
};
pub use intervals::{
    profile_ci, sve_ci, tanh_wald_ci, theta_ci_transform, theta_wald_ci, wald_ci,
    ConfidenceInterval, Method,
};
