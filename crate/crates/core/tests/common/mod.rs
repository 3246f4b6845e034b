//! Independent oracles and shared checks for the integration tests.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use sve::cli::labbe_curve;
use sve::estimands::{empirical_risks, sve_point, theta_from_sve, RiskPair, TwoArmCounts};
use sve::intervals::{normal_quantile, sve_ci, Method};
use sve::likelihood::{lrt_statistic, profile_loglik};
use sve::numerics::{RngSeed, StreamRng};
use sve::sve_from_theta;
use sve::RelativeEffect;

/// `(p, Phi^-1(p))` computed by bisection on `erfc` in 60-digit arithmetic.
pub const QUANTILE_TABLE: &[(f64, f64)] = &[
    (1e-12, -7.0344838253011319326),
    (1e-09, -5.9978070150076868614),
    (1e-06, -4.7534243088228989573),
    (0.0001, -3.7190164854556805523),
    (0.001, -3.0902323061678135354),
    (0.005, -2.5758293035489007538),
    (0.01, -2.3263478740408410931),
    (0.025, -1.9599639845400542118),
    (0.05, -1.644853626951472688),
    (0.1, -1.2815515655446004353),
    (0.2, -0.84162123357291416552),
    (0.3, -0.52440051270804081597),
    (0.4, -0.25334710313579974132),
    (0.425, -0.18911842627279251844),
    (0.5, -4.8793810120151109501e-62),
    (0.6, 0.25334710313579974132),
    (0.7, 0.52440051270804065631),
    (0.8, 0.8416212335729143638),
    (0.9, 1.2815515655446005935),
    (0.925, 1.4395314709384562291),
    (0.95, 1.6448536269514722843),
    (0.975, 1.9599639845400538556),
    (0.99, 2.3263478740408407676),
    (0.995, 2.5758293035489004539),
    (0.999, 3.0902323061678132778),
    (0.9999, 3.7190164854557083867),
    (0.999999, 4.7534243088170877657),
    (0.117996, -1.1850643628248104967),
    (0.420238, -0.20128465570795846495),
    (0.784976, 0.78910951704619505806),
    (0.584111, 0.21242177422494258861),
    (0.853042, 1.0495696869893262434),
    (0.423962, -0.19176792086268115724),
    (0.202122, -0.83406563295765782093),
    (0.434533, -0.16484497921848368088),
    (0.377992, -0.31075879047319100945),
    (0.076748, -1.4272911169743717676),
    (0.975149, 1.9625197803484891926),
    (0.892808, 1.2416004924382039202),
    (0.826097, 0.93885343424443439705),
    (0.569251, 0.17446758942251028707),
    (0.33651, -0.42200687407045372536),
    (0.128184, -1.1350174668081203825),
    (0.881519, 1.1826144072552012673),
    (0.587128, 0.22016327139241026547),
    (0.126478, -1.1431989455128725551),
    (0.947964, 1.6254251529554113945),
    (0.901596, 1.2906992063058086419),
    (0.587016, 0.21987565095379833825),
    (0.55427, 0.13645701966278793392),
    (0.87824, 1.1662336275699402444),
    (0.653642, 0.3951719394546427443),
];

/// Binomial log-likelihood of one arm, written out directly.
fn arm(x: u64, n: u64, p: f64) -> f64 {
    let (x, f) = (x as f64, (n - x) as f64);
    let a = if x > 0.0 { x * p.ln() } else { 0.0 };
    let b = if f > 0.0 { f * (1.0 - p).ln() } else { 0.0 };
    a + b
}

fn loglik(c: &TwoArmCounts, p0: f64, p1: f64) -> f64 {
    arm(c.x0(), c.n0(), p0) + arm(c.x1(), c.n1(), p1)
}

/// Profile log-likelihood from the stationarity condition of the constrained
/// likelihood, which is a quadratic in the free risk. For `s >= 0` with
/// `p1 = c p0`, `c = 1 - s`:
///
/// `c N t^2 - (n0 + x1 + c (n1 + x0)) t + (x0 + x1) = 0`,
///
/// and the smaller root is the maximizer. `s < 0` swaps the arms.
pub fn profile_closed_form(counts: &TwoArmCounts, s: f64) -> f64 {
    let (a, b) = if s >= 0.0 {
        ((counts.x0(), counts.n0()), (counts.x1(), counts.n1()))
    } else {
        ((counts.x1(), counts.n1()), (counts.x0(), counts.n0()))
    };
    let c = 1.0 - s.abs();
    let ((xa, na), (xb, nb)) = (a, b);
    let events = (xa + xb) as f64;
    let big_b = na as f64 + xb as f64 + c * (nb as f64 + xa as f64);
    let disc = (big_b * big_b - 4.0 * c * (na + nb) as f64 * events).max(0.0);
    let root = if events == 0.0 { 0.0 } else { 2.0 * events / (big_b + disc.sqrt()) };
    let edge = 1e-12;
    let eval = |t: f64| {
        let (pa, pb) = (t, c * t);
        arm(xa, na, pa) + arm(xb, nb, pb)
    };
    [root.clamp(edge, 1.0 - edge), edge, 1.0 - edge]
        .into_iter()
        .map(eval)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Profile log-likelihood maximized over a uniform grid of `points` values
/// of the free risk.
pub fn profile_grid(counts: &TwoArmCounts, s: f64, points: usize) -> f64 {
    let c = 1.0 - s.abs();
    (0..points)
        .map(|i| {
            let t = (i as f64 + 0.5) / points as f64;
            if s >= 0.0 {
                loglik(counts, t, c * t)
            } else {
                loglik(counts, c * t, t)
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn lrt_closed_form(counts: &TwoArmCounts, s: f64) -> f64 {
    let r = empirical_risks(counts);
    (2.0 * (loglik(counts, r.p0, r.p1) - profile_closed_form(counts, s))).max(0.0)
}

/// Endpoints of `{s : Lambda(s) <= threshold}` on the grid `k * step`,
/// `|k * step| < 1`.
pub fn grid_inversion(counts: &TwoArmCounts, threshold: f64, step: f64) -> (f64, f64) {
    let k_max = ((1.0 - 1e-12) / step).floor() as i64;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    for k in -k_max..=k_max {
        let s = k as f64 * step;
        if lrt_closed_form(counts, s) <= threshold {
            if lo.is_nan() {
                lo = s;
            }
            hi = s;
        }
    }
    (lo, hi)
}

/// Seeded random two-arm data sets with `n_j` in `[n_lo, n_hi]` and at least
/// one event.
pub fn random_datasets(seed: u64, count: usize, n_lo: u64, n_hi: u64) -> Vec<TwoArmCounts> {
    let mut rng = StreamRng::new(RngSeed::new(seed, 0));
    let mut pick = |lo: u64, hi: u64| lo + rng.next_u64() % (hi - lo + 1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n0 = pick(n_lo, n_hi);
        let n1 = pick(n_lo, n_hi);
        let x0 = pick(0, n0 / 2);
        let x1 = pick(0, n1 / 2);
        if x0 + x1 > 0 {
            out.push(TwoArmCounts::new(x0, n0, x1, n1).unwrap());
        }
    }
    out
}

pub fn counts_strategy(max_n: u64) -> impl Strategy<Value = TwoArmCounts> {
    (1..=max_n, 1..=max_n)
        .prop_flat_map(|(n0, n1)| (0..=n0, Just(n0), 0..=n1, Just(n1)))
        .prop_filter("at least one event", |(x0, _, x1, _)| x0 + x1 > 0)
        .prop_map(|(x0, n0, x1, n1)| TwoArmCounts::new(x0, n0, x1, n1).unwrap())
}

pub fn risk_strategy() -> impl Strategy<Value = RiskPair> {
    (0.0..=1.0f64, 0.0..=1.0f64)
        .prop_filter("not both zero", |(a, b)| a.max(*b) > 0.0)
        .prop_map(|(p0, p1)| RiskPair::new(p0, p1).unwrap())
}

pub fn level_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.8), Just(0.9), Just(0.95), Just(0.99)]
}

pub fn method_strategy() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Profile), Just(Method::Wald), Just(Method::TanhWald)]
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

pub fn check_bounded(r: &RiskPair) -> Result<(), TestCaseError> {
    let s = sve_point(r).unwrap().value;
    if !(-1.0..=1.0).contains(&s) {
        return Err(fail(format!("SVE {s} outside [-1, 1] for {r:?}")));
    }
    Ok(())
}

pub fn check_swap_point(r: &RiskPair) -> Result<(), TestCaseError> {
    let a = sve_point(r).unwrap().value;
    let b = sve_point(&r.swapped()).unwrap().value;
    prop_assert_eq!(a, -b);
    Ok(())
}

/// Arm swap negates the estimate and mirrors the interval.
pub fn check_swap_interval(c: &TwoArmCounts, m: Method, level: f64) -> Result<(), TestCaseError> {
    let (a, b) = (sve_ci(c, m, level), sve_ci(&c.swapped(), m, level));
    match (a, b) {
        (Ok(a), Ok(b)) => {
            prop_assert!((a.lower + b.upper).abs() < 1e-9, "{:?} vs {:?}", a, b);
            prop_assert!((a.upper + b.lower).abs() < 1e-9, "{:?} vs {:?}", a, b);
        }
        (Err(_), Err(_)) => {}
        (a, b) => return Err(fail(format!("swap changed success: {a:?} vs {b:?}"))),
    }
    Ok(())
}

/// `theta -> SVE -> theta` is the identity and SVE is strictly decreasing.
pub fn check_theta_round_trip(log_theta: f64, gap: f64) -> Result<(), TestCaseError> {
    let t = log_theta.exp();
    let s = sve_from_theta(&RelativeEffect::new(t, 0.1).unwrap()).unwrap().value;
    let back = theta_from_sve(s).unwrap();
    // 1 - s loses absolute precision for small theta, 1 + s relative precision for large
    prop_assert!((back - t).abs() <= 4.0 * f64::EPSILON * (t * t).max(1.0), "{} -> {} -> {}", t, s, back);
    let s2 = sve_from_theta(&RelativeEffect::new((log_theta + gap).exp(), 0.1).unwrap())
        .unwrap()
        .value;
    prop_assert!(s2 < s, "not decreasing: {} at {}, {} at {}", s, log_theta, s2, log_theta + gap);
    Ok(())
}

/// `Lambda(s) <= chi2` exactly on the profile interval, checked on a grid
/// away from the endpoints.
pub fn check_profile_duality(c: &TwoArmCounts, level: f64) -> Result<(), TestCaseError> {
    let ci = sve_ci(c, Method::Profile, level).unwrap();
    let chi2 = sve::intervals::chi2_1_quantile(level).unwrap();
    for k in -19..=19 {
        let s = k as f64 / 20.0;
        let lambda = lrt_statistic(c, s).unwrap().lambda;
        let margin = 1e-4;
        if s > ci.lower + margin && s < ci.upper - margin {
            prop_assert!(lambda <= chi2 + 1e-9, "inside at {} but lambda {} for {:?}", s, lambda, c);
        }
        if s < ci.lower - margin || s > ci.upper + margin {
            prop_assert!(lambda > chi2 - 1e-9, "outside at {} but lambda {} for {:?}", s, lambda, c);
        }
    }
    Ok(())
}

/// A higher level gives an interval that contains the lower-level one.
pub fn check_nested(c: &TwoArmCounts, m: Method) -> Result<(), TestCaseError> {
    let (Ok(a), Ok(b)) = (sve_ci(c, m, 0.9), sve_ci(c, m, 0.99)) else {
        return Ok(());
    };
    let tol = if m == Method::Profile { 2e-6 } else { 1e-12 };
    prop_assert!(b.lower <= a.lower + tol && a.upper <= b.upper + tol, "{:?} not in {:?}", a, b);
    Ok(())
}

pub fn check_quantile_table() -> Result<(), TestCaseError> {
    for &(p, z) in QUANTILE_TABLE {
        let got = normal_quantile(p).unwrap();
        prop_assert!((got - z).abs() < 1e-9, "p = {}: {} vs {}", p, got, z);
    }
    Ok(())
}

pub fn check_labbe(s: f64, points: usize) -> Result<(), TestCaseError> {
    for (p0, p1) in labbe_curve(s, points).unwrap() {
        let got = sve_point(&RiskPair::new(p0, p1).unwrap()).unwrap().value;
        prop_assert!((got - s).abs() <= 1e-12, "s = {}, ({}, {}) -> {}", s, p0, p1, got);
    }
    Ok(())
}

/// Nuisance-grid and closed-form agreement of the profile log-likelihood.
pub fn check_profile_oracle(c: &TwoArmCounts, s: f64) -> Result<(), TestCaseError> {
    let got = profile_loglik(c, s).unwrap().loglik;
    let exact = profile_closed_form(c, s);
    prop_assert!((got - exact).abs() < 1e-7, "closed form {} vs {} at s = {} for {:?}", exact, got, s, c);
    Ok(())
}
