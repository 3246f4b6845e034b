//! Confidence intervals for SVE: Wald, tanh-Wald, profile likelihood, and the
//! relative-effect (theta) versions.

mod profile;
mod quantile;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SveError};
use crate::estimands::{
    empirical_risks, sve_of_theta, sve_point, ve_point, RelativeEffect, TwoArmCounts,
};
use crate::variance::{atanh_variance, sve_variance, sve_variance_from_theta};

pub use profile::{profile_ci, ENDPOINT_TOL, SCAN_EDGE, SCAN_STEP};
pub use quantile::{chi2_1_quantile, normal_quantile, z_critical};

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "Wald")]
    Wald,
    #[serde(rename = "tanh-Wald")]
    TanhWald,
    #[serde(rename = "Profile")]
    Profile,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Profile, Method::Wald, Method::TanhWald];

    /// Display label used in output tables.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Wald => "Wald",
            Method::TanhWald => "tanh-Wald",
            Method::Profile => "Profile",
        }
    }

    /// Lower-case name accepted on the command line and in config files.
    pub fn key(&self) -> &'static str {
        match self {
            Method::Wald => "wald",
            Method::TanhWald => "tanh-wald",
            Method::Profile => "profile",
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::Profile
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = SveError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wald" => Ok(Method::Wald),
            "tanh-wald" | "tanh_wald" | "tanhwald" => Ok(Method::TanhWald),
            "profile" => Ok(Method::Profile),
            other => Err(SveError::Config(format!(
                "unknown method '{other}' (expected profile, wald or tanh-wald)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: Method,
    /// Whether the lower / upper endpoint is pinned at -1 / +1.
    pub boundary: (bool, bool),
}

impl ConfidenceInterval {
    pub fn contains(&self, s: f64) -> bool {
        self.lower <= s && s <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Original-scale Wald interval `SVE_hat -/+ z SE`. Not clipped to [-1, 1].
pub fn wald_ci(counts: &TwoArmCounts, level: f64) -> Result<ConfidenceInterval> {
    let z = z_critical(level)?;
    let estimate = sve_point(&empirical_risks(counts))?.value;
    let half = z * sve_variance(counts)?.se();
    Ok(ConfidenceInterval {
        lower: estimate - half,
        upper: estimate + half,
        level,
        method: Method::Wald,
        boundary: (false, false),
    })
}

/// Wald interval on the atanh scale, back-transformed with tanh.
pub fn tanh_wald_ci(counts: &TwoArmCounts, level: f64) -> Result<ConfidenceInterval> {
    let z = z_critical(level)?;
    let estimate = sve_point(&empirical_risks(counts))?;
    if estimate.boundary {
        return Err(SveError::Boundary {
            estimate: estimate.value,
            hint: "tanh-Wald intervals are undefined here; use the profile method",
        });
    }
    let u = estimate.value.atanh();
    let half = z * atanh_variance(counts)?.se();
    let (lower, upper) = ((u - half).tanh(), (u + half).tanh());
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        method: Method::TanhWald,
        boundary: (lower <= -1.0, upper >= 1.0),
    })
}

/// Interval for `method` on two-arm count data.
pub fn sve_ci(counts: &TwoArmCounts, method: Method, level: f64) -> Result<ConfidenceInterval> {
    match method {
        Method::Wald => wald_ci(counts, level),
        Method::TanhWald => tanh_wald_ci(counts, level),
        Method::Profile => profile_ci(counts, level),
    }
}

/// Wald interval for SVE derived from a relative effect, using the
/// log-scale delta-method variance.
pub fn theta_wald_ci(effect: &RelativeEffect, level: f64) -> Result<ConfidenceInterval> {
    let z = z_critical(level)?;
    let estimate = sve_of_theta(effect.theta_hat)?;
    let half = z * sve_variance_from_theta(effect)?.se();
    Ok(ConfidenceInterval {
        lower: estimate - half,
        upper: estimate + half,
        level,
        method: Method::Wald,
        boundary: (false, false),
    })
}

/// Maps a theta interval to an SVE interval. SVE is decreasing in theta, so
/// the endpoints swap.
pub fn theta_ci_transform(theta_lower: f64, theta_upper: f64) -> Result<(f64, f64)> {
    if !(theta_lower > 0.0) || !(theta_upper > 0.0) {
        return Err(SveError::Domain(format!(
            "theta interval endpoints must be positive, got ({theta_lower}, {theta_upper})"
        )));
    }
    if theta_lower > theta_upper {
        return Err(SveError::Domain(format!(
            "theta interval is reversed: ({theta_lower}, {theta_upper})"
        )));
    }
    Ok((sve_of_theta(theta_upper)?, sve_of_theta(theta_lower)?))
}

/// SVE interval from a likelihood-based theta interval reported by a model
/// fit (profile intervals map endpoint-wise).
pub fn theta_profile_ci(theta_lower: f64, theta_upper: f64, level: f64) -> Result<ConfidenceInterval> {
    quantile::check_level(level)?;
    let (lower, upper) = theta_ci_transform(theta_lower, theta_upper)?;
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        method: Method::Profile,
        boundary: (false, false),
    })
}

/// Traditional VE with a Wald interval on the log relative risk scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VeInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl VeInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `VE = 1 - RR` with `log RR +/- z sqrt(1/x1 - 1/n1 + 1/x0 - 1/n0)`.
pub fn ve_log_rr_ci(counts: &TwoArmCounts, level: f64) -> Result<VeInterval> {
    let z = z_critical(level)?;
    if counts.x0() == 0 || counts.x1() == 0 {
        return Err(SveError::UndefinedEffect(
            "log relative risk interval needs events in both arms".into(),
        ));
    }
    let estimate = ve_point(&empirical_risks(counts))?.value;
    let (x0, n0) = (counts.x0() as f64, counts.n0() as f64);
    let (x1, n1) = (counts.x1() as f64, counts.n1() as f64);
    let log_rr = ((x1 / n1) / (x0 / n0)).ln();
    let se = (1.0 / x1 - 1.0 / n1 + 1.0 / x0 - 1.0 / n0).max(0.0).sqrt();
    Ok(VeInterval {
        estimate,
        lower: 1.0 - (log_rr + z * se).exp(),
        upper: 1.0 - (log_rr - z * se).exp(),
        level,
    })
}
