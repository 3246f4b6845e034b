//! Monte Carlo harness for the operating characteristics of SVE estimators
//! and intervals: bias, bias after correction, SE calibration, coverage,
//! type I error and VE-versus-SVE interval width.
//!
//! Each replicate draws from its own random stream, keyed by the scenario's
//! risks and arm sizes, the master seed and the replicate index. Replicates
//! run in parallel and are reduced in index order, so reports do not depend
//! on the thread count or on the order of scenarios in a grid.
//!
//! The stream key is symmetric in the two arms and the arms are drawn in a
//! canonical order, so a scenario with its arms swapped sees exactly the
//! swapped counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SveError};
use crate::estimands::{empirical_risks, sve_bias_corrected, sve_point, RiskPair, TwoArmCounts};
use crate::intervals::{sve_ci, ve_log_rr_ci, Method};
use crate::numerics::{mix64, sample_binomial, RngSeed, StreamRng};
use crate::variance::sve_variance;

/// Risks used on both axes of the full grid.
pub const RISK_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Arm sizes used on both axes of the full grid.
pub const SIZE_GRID: [u64; 3] = [100, 250, 1000];
pub const FULL_REPLICATES: u64 = 10_000;
pub const DESK_REPLICATES: u64 = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub p0: f64,
    pub p1: f64,
    pub n0: u64,
    pub n1: u64,
    pub replicates: u64,
    pub level: f64,
    pub methods: Vec<Method>,
    pub master_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p0", self.p0), ("p1", self.p1)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(SveError::Config(format!("{name} must lie in (0, 1), got {p}")));
            }
        }
        if self.n0 == 0 || self.n1 == 0 {
            return Err(SveError::Config("arm sizes must be positive".into()));
        }
        if self.replicates == 0 {
            return Err(SveError::Config("replicates must be at least 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(SveError::Config(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }

    pub fn true_sve(&self) -> f64 {
        (self.p0 - self.p1) / self.p0.max(self.p1)
    }

    pub fn is_null(&self) -> bool {
        self.p0 == self.p1
    }

    fn arm_keys(&self) -> (u64, u64) {
        let arm = |p: f64, n: u64| mix64(p.to_bits() ^ mix64(n));
        (arm(self.p0, self.n0), arm(self.p1, self.n1))
    }

    /// Random stream of replicate `rep`.
    pub fn replicate_seed(&self, rep: u64) -> RngSeed {
        let (a, b) = self.arm_keys();
        let key = mix64(a.min(b).wrapping_add(mix64(a.max(b))));
        RngSeed::new(self.master_seed, mix64(key.wrapping_add(rep)))
    }

    /// Counts of replicate `rep`.
    pub fn draw(&self, rep: u64) -> TwoArmCounts {
        let mut rng = StreamRng::new(self.replicate_seed(rep));
        let (a, b) = self.arm_keys();
        let (x0, x1) = if a <= b {
            let x0 = sample_binomial(&mut rng, self.n0, self.p0);
            (x0, sample_binomial(&mut rng, self.n1, self.p1))
        } else {
            let x1 = sample_binomial(&mut rng, self.n1, self.p1);
            (sample_binomial(&mut rng, self.n0, self.p0), x1)
        };
        TwoArmCounts::new(x0, self.n0, x1, self.n1).expect("binomial draws never exceed n")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    /// Fraction of scored replicates whose interval contains the true SVE.
    pub coverage: f64,
    /// Fraction of scored replicates whose interval excludes 0; null scenarios only.
    pub type_i_error: Option<f64>,
    /// Mean interval width over replicates that produced an interval.
    pub mean_width_sve: f64,
    /// Defined replicates minus failures.
    pub scored: u64,
    /// Replicates where the interval is undefined at a boundary estimate.
    /// They are scored as not covering and as excluding 0.
    pub unscorable: u64,
    /// Replicates where the interval computation failed numerically.
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: Scenario,
    pub true_sve: f64,
    /// Replicates with at least one event.
    pub defined: u64,
    /// Replicates with zero events in both arms.
    pub undefined_count: u64,
    pub bias: f64,
    pub bias_bc: f64,
    /// Standard deviation of the SVE estimates (divisor `defined - 1`).
    pub empirical_se: f64,
    pub mean_estimated_se: f64,
    /// Mean width of the log relative-risk VE interval.
    pub mean_width_ve: f64,
    /// Replicates with a VE interval (events in both arms).
    pub ve_intervals: u64,
    pub methods: Vec<MethodReport>,
}

impl SimulationReport {
    pub fn se_ratio(&self) -> f64 {
        self.mean_estimated_se / self.empirical_se
    }

    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// One flat row per method, or a single row without method columns if
    /// the scenario requested none.
    pub fn to_rows(&self) -> Vec<ReportRow> {
        let sc = &self.scenario;
        let base = ReportRow {
            p0: sc.p0,
            p1: sc.p1,
            n0: sc.n0,
            n1: sc.n1,
            replicates: sc.replicates,
            level: sc.level,
            master_seed: sc.master_seed,
            true_sve: self.true_sve,
            method: None,
            coverage: None,
            type_i_error: None,
            mean_width_sve: None,
            mean_width_ve: self.mean_width_ve,
            width_ratio: None,
            bias: self.bias,
            bias_bc: self.bias_bc,
            empirical_se: self.empirical_se,
            mean_estimated_se: self.mean_estimated_se,
            se_ratio: self.se_ratio(),
            defined: self.defined,
            undefined_count: self.undefined_count,
            scored: None,
            unscorable: None,
            failures: None,
        };
        if self.methods.is_empty() {
            return vec![base];
        }
        self.methods
            .iter()
            .map(|m| ReportRow {
                method: Some(m.method.label().to_string()),
                coverage: Some(m.coverage),
                type_i_error: m.type_i_error,
                mean_width_sve: Some(m.mean_width_sve),
                width_ratio: Some(self.mean_width_ve / m.mean_width_sve),
                scored: Some(m.scored),
                unscorable: Some(m.unscorable),
                failures: Some(m.failures),
                ..base.clone()
            })
            .collect()
    }
}

/// Flat output record, one per scenario and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub p0: f64,
    pub p1: f64,
    pub n0: u64,
    pub n1: u64,
    pub replicates: u64,
    pub level: f64,
    pub master_seed: u64,
    pub true_sve: f64,
    pub method: Option<String>,
    pub coverage: Option<f64>,
    pub type_i_error: Option<f64>,
    pub mean_width_sve: Option<f64>,
    pub mean_width_ve: f64,
    pub width_ratio: Option<f64>,
    pub bias: f64,
    pub bias_bc: f64,
    pub empirical_se: f64,
    pub mean_estimated_se: f64,
    pub se_ratio: f64,
    pub defined: u64,
    pub undefined_count: u64,
    pub scored: Option<u64>,
    pub unscorable: Option<u64>,
    pub failures: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
enum IntervalOutcome {
    Scored { covers: bool, excludes_zero: bool, width: f64 },
    Unscorable,
    Failed,
}

#[derive(Debug, Clone)]
struct Replicate {
    sve: f64,
    sve_bc: f64,
    se: f64,
    ve_width: Option<f64>,
    intervals: Vec<IntervalOutcome>,
}

fn run_replicate(sc: &Scenario, truth: f64, rep: u64) -> Option<Replicate> {
    let counts = sc.draw(rep);
    if counts.total_events() == 0 {
        return None;
    }
    let risks: RiskPair = empirical_risks(&counts);
    let sve = sve_point(&risks).ok()?.value;
    let sve_bc = sve_bias_corrected(&counts).ok()?.value;
    let se = sve_variance(&counts).ok()?.se();
    let ve_width = ve_log_rr_ci(&counts, sc.level).ok().map(|v| v.width());
    let intervals = sc
        .methods
        .iter()
        .map(|&m| match sve_ci(&counts, m, sc.level) {
            Ok(ci) => IntervalOutcome::Scored {
                covers: ci.contains(truth),
                excludes_zero: !ci.contains(0.0),
                width: ci.width(),
            },
            Err(SveError::Boundary { .. }) => IntervalOutcome::Unscorable,
            Err(_) => IntervalOutcome::Failed,
        })
        .collect();
    Some(Replicate {
        sve,
        sve_bc,
        se,
        ve_width,
        intervals,
    })
}

fn ratio(num: f64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num / den as f64
    }
}

/// Runs every replicate of one scenario.
pub fn run_scenario(sc: &Scenario) -> Result<SimulationReport> {
    sc.validate()?;
    let truth = sc.true_sve();
    let outcomes: Vec<Option<Replicate>> = (0..sc.replicates)
        .into_par_iter()
        .map(|rep| run_replicate(sc, truth, rep))
        .collect();
    Ok(reduce(sc, truth, &outcomes))
}

fn reduce(sc: &Scenario, truth: f64, outcomes: &[Option<Replicate>]) -> SimulationReport {
    let defined: Vec<&Replicate> = outcomes.iter().flatten().collect();
    let n = defined.len() as u64;

    let mean_sve = ratio(defined.iter().map(|r| r.sve).sum(), n);
    let mean_bc = ratio(defined.iter().map(|r| r.sve_bc).sum(), n);
    let ss: f64 = defined.iter().map(|r| (r.sve - mean_sve).powi(2)).sum();
    let empirical_se = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { f64::NAN };
    let mean_estimated_se = ratio(defined.iter().map(|r| r.se).sum(), n);

    let ve: Vec<f64> = defined.iter().filter_map(|r| r.ve_width).collect();
    let mean_width_ve = ratio(ve.iter().sum(), ve.len() as u64);

    let methods = sc
        .methods
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let (mut scored, mut covered, mut rejected, mut unscorable, mut failures) = (0, 0, 0, 0, 0);
            let (mut width_sum, mut widths) = (0.0, 0u64);
            for r in &defined {
                match r.intervals[i] {
                    IntervalOutcome::Scored { covers, excludes_zero, width } => {
                        scored += 1;
                        covered += covers as u64;
                        rejected += excludes_zero as u64;
                        width_sum += width;
                        widths += 1;
                    }
                    IntervalOutcome::Unscorable => {
                        scored += 1;
                        rejected += 1;
                        unscorable += 1;
                    }
                    IntervalOutcome::Failed => failures += 1,
                }
            }
            MethodReport {
                method,
                coverage: ratio(covered as f64, scored),
                type_i_error: sc.is_null().then(|| ratio(rejected as f64, scored)),
                mean_width_sve: ratio(width_sum, widths),
                scored,
                unscorable,
                failures,
            }
        })
        .collect();

    SimulationReport {
        scenario: sc.clone(),
        true_sve: truth,
        defined: n,
        undefined_count: sc.replicates - n,
        bias: mean_sve - truth,
        bias_bc: mean_bc - truth,
        empirical_se,
        mean_estimated_se,
        mean_width_ve,
        ve_intervals: ve.len() as u64,
        methods,
    }
}

/// Runs each scenario; the result is in input order.
pub fn run_grid(scenarios: &[Scenario]) -> Result<Vec<SimulationReport>> {
    if scenarios.is_empty() {
        return Err(SveError::Config("the scenario list is empty".into()));
    }
    scenarios.iter().try_for_each(Scenario::validate)?;
    scenarios.par_iter().map(run_scenario).collect()
}

/// Per-method rejection rate of `H0: SVE = 0` in a null scenario.
pub fn null_type_i(sc: &Scenario) -> Result<Vec<(Method, f64)>> {
    if !sc.is_null() {
        return Err(SveError::Config(format!(
            "type I error needs equal risks, got p0 = {} and p1 = {}",
            sc.p0, sc.p1
        )));
    }
    let report = run_scenario(sc)?;
    Ok(report
        .methods
        .iter()
        .map(|m| (m.method, m.type_i_error.unwrap_or(f64::NAN)))
        .collect())
}

/// The full 9 x 9 risk by 3 x 3 size grid (729 scenarios).
pub fn full_grid(master_seed: u64, replicates: u64, level: f64, methods: &[Method]) -> Vec<Scenario> {
    let mut out = Vec::with_capacity(729);
    for &n0 in &SIZE_GRID {
        for &n1 in &SIZE_GRID {
            for &p0 in &RISK_GRID {
                for &p1 in &RISK_GRID {
                    out.push(Scenario {
                        p0,
                        p1,
                        n0,
                        n1,
                        replicates,
                        level,
                        methods: methods.to_vec(),
                        master_seed,
                    });
                }
            }
        }
    }
    out
}
