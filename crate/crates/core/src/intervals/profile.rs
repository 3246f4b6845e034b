//! Profile-likelihood interval by inversion of the LRT.
//!
//! From the point estimate the search steps outward by [`SCAN_STEP`] until
//! `Lambda(s)` exceeds the chi-square(1) critical value, then bisects the last
//! step. If `Lambda` stays below the threshold up to `+/-(1 - 1e-9)` the
//! endpoint is reported as `+/-1` and flagged. The acceptance region of the
//! LRT is an interval (the superlevel sets of the two-arm log-likelihood are
//! convex and SVE is monotone in the slope `p1/p0`), so the first crossing on
//! each side is the endpoint.

use crate::error::{Result, SveError};
use crate::estimands::{empirical_risks, sve_point, TwoArmCounts};
use crate::likelihood::ProfileLikelihood;
use crate::numerics::find_root;

use super::quantile::{check_level, chi2_1_quantile};
use super::{ConfidenceInterval, Method};

pub const SCAN_STEP: f64 = 0.01;
pub const SCAN_EDGE: f64 = 1.0 - 1e-9;
pub const ENDPOINT_TOL: f64 = 1e-6;

/// Profile-likelihood interval `{s : Lambda(s) <= chi2_{1, level}}`.
pub fn profile_ci(counts: &TwoArmCounts, level: f64) -> Result<ConfidenceInterval> {
    check_level(level)?;
    if counts.total_events() == 0 {
        return Err(SveError::UndefinedEffect(
            "profile interval needs at least one event".into(),
        ));
    }
    let threshold = chi2_1_quantile(level)?;
    let estimate = sve_point(&empirical_risks(counts))?.value;
    let start = estimate.clamp(-SCAN_EDGE, SCAN_EDGE);
    let profile = ProfileLikelihood::new(*counts);

    let (lower, lower_pinned) = search_endpoint(&profile, start, -1.0, threshold)?;
    let (upper, upper_pinned) = search_endpoint(&profile, start, 1.0, threshold)?;
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        method: Method::Profile,
        boundary: (lower_pinned, upper_pinned),
    })
}

fn search_endpoint(
    profile: &ProfileLikelihood,
    start: f64,
    direction: f64,
    threshold: f64,
) -> Result<(f64, bool)> {
    let excess = |s: f64| profile.lrt(s).map(|l| l.lambda - threshold);
    let edge = direction * SCAN_EDGE;
    let mut inner = start;
    loop {
        let mut next = inner + direction * SCAN_STEP;
        if direction * next >= SCAN_EDGE {
            next = edge;
        }
        if excess(next)? > 0.0 {
            let (lo, hi) = if inner < next { (inner, next) } else { (next, inner) };
            let root = find_root(excess, lo, hi, ENDPOINT_TOL).map_err(|e| {
                SveError::Numeric(format!(
                    "profile endpoint search failed between {lo} and {hi} for {:?}: {e}",
                    profile.counts()
                ))
            })?;
            return Ok((root, false));
        }
        if next == edge {
            return Ok((direction, true));
        }
        inner = next;
    }
}
