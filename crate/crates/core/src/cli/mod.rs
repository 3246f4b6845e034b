//! The `sve` command-line tool.
//!
//! Exit codes: 0 on success, 2 for usage and config errors, 3 for domain and
//! numeric errors, 1 for I/O failures.

pub mod config;
pub mod vax004;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::SveError;
use crate::estimands::{
    empirical_risks, sve_from_theta, sve_point, RelativeEffect, TwoArmCounts,
};
use crate::intervals::{
    sve_ci, theta_profile_ci, theta_wald_ci, ve_log_rr_ci, ConfidenceInterval, Method,
    DEFAULT_LEVEL,
};
use crate::simulation::{full_grid, run_grid, Scenario, SimulationReport, FULL_REPLICATES};

pub use vax004::{Published, TrialRecord, VAX004};

#[derive(Debug, Parser)]
#[command(name = "sve", version, about = "Symmetric vaccine efficacy estimates and intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate SVE and a confidence interval from two-arm counts.
    Estimate(EstimateArgs),
    /// Convert a relative effect (hazard, rate or risk ratio) to SVE.
    FromModel(FromModelArgs),
    /// Reanalyze a bundled trial data set.
    Reanalyze(ReanalyzeArgs),
    /// Run Monte Carlo scenarios from a config file.
    Simulate(SimulateArgs),
    /// Emit iso-effect curves for a L'Abbe plot as CSV.
    Labbe(LabbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: SveError| e.to_string())
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Events in the unvaccinated (placebo) arm.
    #[arg(long)]
    pub x0: u64,
    /// Size of the unvaccinated arm.
    #[arg(long)]
    pub n0: u64,
    /// Events in the vaccinated arm.
    #[arg(long)]
    pub x1: u64,
    /// Size of the vaccinated arm.
    #[arg(long)]
    pub n1: u64,
    /// profile, wald or tanh-wald.
    #[arg(long, default_value = "profile", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FromModelArgs {
    /// Estimated relative effect (vaccinated over unvaccinated).
    #[arg(long)]
    pub theta: f64,
    /// Standard error of log(theta); needed for the Wald interval.
    #[arg(long)]
    pub se_log_theta: Option<f64>,
    /// Lower end of a likelihood-based interval for theta.
    #[arg(long, requires = "theta_upper")]
    pub theta_lower: Option<f64>,
    /// Upper end of a likelihood-based interval for theta.
    #[arg(long, requires = "theta_lower")]
    pub theta_upper: Option<f64>,
    /// profile (needs the theta interval) or wald. Defaults to profile when a
    /// theta interval is given and to wald otherwise.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReanalyzeArgs {
    #[arg(long, default_value = "vax004")]
    pub dataset: String,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["config", "full_grid"])))]
pub struct SimulateArgs {
    /// TOML scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run the full 729-scenario grid with every method at 10000 replicates.
    #[arg(long)]
    pub full_grid: bool,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides the master seed of every scenario.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the replicate count of every scenario.
    #[arg(long)]
    pub replicates: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LabbeArgs {
    /// Comma-separated effect sizes in (-1, 1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub effects: Vec<f64>,
    /// Points per curve.
    #[arg(long, default_value_t = 19)]
    pub points: usize,
}

/// One estimate with its interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: String,
}

impl ResultRow {
    pub fn new(estimate: f64, ci: &ConfidenceInterval) -> Self {
        Self {
            estimate,
            lower: ci.lower,
            upper: ci.upper,
            level: ci.level,
            method: ci.method.label().to_string(),
        }
    }

    /// `estimate  lower  upper  level  method`, numbers at 2 dp.
    pub fn to_text(&self) -> String {
        format!(
            "{}  {}  {}  {}  {}",
            fmt2(self.estimate),
            fmt2(self.lower),
            fmt2(self.upper),
            fmt2(self.level),
            self.method
        )
    }
}

/// Rounds half away from zero to `dp` decimals.
pub fn round_half_away(x: f64, dp: i32) -> f64 {
    let k = 10f64.powi(dp);
    let r = (x * k).round() / k;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Two-decimal display value; never prints `-0.00`.
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", round_half_away(x, 2))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Sve(SveError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Sve(SveError::Config(_)) => 2,
            CliError::Sve(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Sve(e) => write!(f, "{e}"),
        }
    }
}

impl From<SveError> for CliError {
    fn from(e: SveError) -> Self {
        CliError::Sve(e)
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    String::from_utf8(w.into_inner().map_err(io_err)?).map_err(io_err)
}

fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(io_err)?;
    s.push('\n');
    Ok(s)
}

fn render_row(row: &ResultRow, format: Format) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(format!("{}\n", row.to_text())),
        Format::Csv => csv_string(std::slice::from_ref(row)),
        Format::Json => {
            let mut s = serde_json::to_string(row).map_err(io_err)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<String, CliError> {
    let counts = TwoArmCounts::new(args.x0, args.n0, args.x1, args.n1)?;
    let est = sve_point(&empirical_risks(&counts))?.value;
    let ci = sve_ci(&counts, args.method, args.level)?;
    render_row(&ResultRow::new(est, &ci), args.format)
}

pub fn from_model(args: &FromModelArgs) -> Result<String, CliError> {
    let bounds = args.theta_lower.zip(args.theta_upper);
    let method = args
        .method
        .unwrap_or(if bounds.is_some() { Method::Profile } else { Method::Wald });
    let se = args.se_log_theta;
    let effect = RelativeEffect::new(args.theta, se.unwrap_or(0.0))?;
    let est = sve_from_theta(&effect)?.value;
    let ci = match (method, bounds) {
        (Method::Profile, Some((lo, hi))) => theta_profile_ci(lo, hi, args.level)?,
        (Method::Profile, None) => {
            return Err(CliError::Usage(
                "the profile method needs --theta-lower and --theta-upper".into(),
            ))
        }
        (Method::Wald, None) => {
            if se.is_none() {
                return Err(CliError::Usage("the wald method needs --se-log-theta".into()));
            }
            theta_wald_ci(&effect, args.level)?
        }
        (Method::Wald, Some(_)) => {
            return Err(CliError::Usage(
                "--theta-lower/--theta-upper only apply to the profile method".into(),
            ))
        }
        (Method::TanhWald, _) => {
            return Err(CliError::Usage(
                "tanh-wald is not available for model-based estimates; use profile or wald".into(),
            ))
        }
    };
    render_row(&ResultRow::new(est, &ci), args.format)
}

/// One reanalyzed subgroup: VE with a log relative-risk interval and SVE
/// with a profile interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReanalysisRow {
    pub category: String,
    pub x1: u64,
    pub n1: u64,
    pub x0: u64,
    pub n0: u64,
    pub ve_estimate: Option<f64>,
    pub ve_lower: Option<f64>,
    pub ve_upper: Option<f64>,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: String,
}

pub fn reanalysis_rows(records: &[TrialRecord], level: f64) -> Result<Vec<ReanalysisRow>, SveError> {
    records
        .iter()
        .map(|r| {
            let counts = TwoArmCounts::new(r.x0, r.n0, r.x1, r.n1)?;
            let ve = ve_log_rr_ci(&counts, level).ok();
            let est = sve_point(&empirical_risks(&counts))?.value;
            let ci = sve_ci(&counts, Method::Profile, level)?;
            Ok(ReanalysisRow {
                category: r.category.to_string(),
                x1: r.x1,
                n1: r.n1,
                x0: r.x0,
                n0: r.n0,
                ve_estimate: ve.map(|v| v.estimate),
                ve_lower: ve.map(|v| v.lower),
                ve_upper: ve.map(|v| v.upper),
                estimate: est,
                lower: ci.lower,
                upper: ci.upper,
                level,
                method: ci.method.label().to_string(),
            })
        })
        .collect()
}

fn reanalysis_text(rows: &[ReanalysisRow], level: f64) -> String {
    let pct = format!("{}%", round_half_away(level * 100.0, 6));
    let width = rows.iter().map(|r| r.category.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let ve_head = format!("VE ({pct} CI)");
    let sve_head = format!("SVE ({pct} CI)");
    let _ = writeln!(
        out,
        "{:<width$}  {:>10}  {:>10}  {:<20}  {}",
        "Category", "Vaccine", "Placebo", ve_head, sve_head
    );
    for r in rows {
        let ve = match (r.ve_estimate, r.ve_lower, r.ve_upper) {
            (Some(e), Some(l), Some(u)) => format!("{} ({}, {})", fmt2(e), fmt2(l), fmt2(u)),
            _ => "NA".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:<20}  {} ({}, {})",
            r.category,
            format!("{}/{}", r.x1, r.n1),
            format!("{}/{}", r.x0, r.n0),
            ve,
            fmt2(r.estimate),
            fmt2(r.lower),
            fmt2(r.upper)
        );
    }
    out
}

pub fn reanalyze(args: &ReanalyzeArgs) -> Result<String, CliError> {
    let table = vax004::lookup(&args.dataset).ok_or_else(|| {
        CliError::Usage(format!("unknown dataset '{}' (available: vax004)", args.dataset))
    })?;
    let records: Vec<TrialRecord> = table.iter().map(|(r, _)| *r).collect();
    let rows = reanalysis_rows(&records, args.level)?;
    match args.format {
        Format::Text => Ok(reanalysis_text(&rows, args.level)),
        Format::Csv => csv_string(&rows),
        Format::Json => json_string(&rows),
    }
}

pub fn simulation_scenarios(args: &SimulateArgs) -> Result<Vec<Scenario>, CliError> {
    let mut scenarios = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            config::parse_config(&text, &path.display().to_string())?
        }
        None => full_grid(config::DEFAULT_SEED, FULL_REPLICATES, DEFAULT_LEVEL, &Method::ALL),
    };
    for sc in &mut scenarios {
        if let Some(seed) = args.seed {
            sc.master_seed = seed;
        }
        if let Some(r) = args.replicates {
            sc.replicates = r;
        }
    }
    Ok(scenarios)
}

pub fn render_reports(reports: &[SimulationReport], format: ReportFormat) -> Result<String, CliError> {
    let rows: Vec<_> = reports.iter().flat_map(|r| r.to_rows()).collect();
    match format {
        ReportFormat::Csv => csv_string(&rows),
        ReportFormat::Json => json_string(&rows),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let scenarios = simulation_scenarios(args)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(io_err)?;
    let reports = pool.install(|| run_grid(&scenarios))?;
    let out = render_reports(&reports, args.format)?;
    match &args.output {
        Some(path) => {
            std::fs::write(path, out).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(out),
    }
}

/// Vaccinated-arm risk on the iso-effect line of `s` at placebo risk `p0`.
pub fn labbe_p1(s: f64, p0: f64) -> Result<f64, SveError> {
    if !(s > -1.0 && s < 1.0) {
        return Err(SveError::Domain(format!("effect size must lie in (-1, 1), got {s}")));
    }
    Ok(if s >= 0.0 { (1.0 - s) * p0 } else { p0 / (1.0 + s) })
}

/// `points` evenly spaced points on the iso-effect line of `s`. The placebo
/// risk runs over the interior of (0, 1) for `s >= 0` and of (0, 1 + s) for
/// `s < 0`, where the vaccinated risk reaches 1.
pub fn labbe_curve(s: f64, points: usize) -> Result<Vec<(f64, f64)>, SveError> {
    if points < 2 {
        return Err(SveError::Domain(format!("need at least 2 points per curve, got {points}")));
    }
    let top = if s >= 0.0 { 1.0 } else { 1.0 + s };
    (1..=points)
        .map(|i| {
            let p0 = top * i as f64 / (points + 1) as f64;
            Ok((p0, labbe_p1(s, p0)?))
        })
        .collect()
}

pub fn labbe(args: &LabbeArgs) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Point {
        s: f64,
        p0: f64,
        p1: f64,
    }
    let mut rows = Vec::new();
    for &s in &args.effects {
        for (p0, p1) in labbe_curve(s, args.points)? {
            rows.push(Point { s, p0, p1 });
        }
    }
    csv_string(&rows)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::FromModel(a) => from_model(a),
        Command::Reanalyze(a) => reanalyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Labbe(a) => labbe(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}
