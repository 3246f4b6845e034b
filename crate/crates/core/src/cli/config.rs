//! Simulation config files (TOML).
//!
//! ```toml
//! master_seed = 20240601          # optional, default 1
//! replicates  = 2000              # optional, default 2000
//! level       = 0.95              # optional, default 0.95
//! methods     = ["profile", "wald", "tanh-wald"]   # optional, default all three
//!
//! [grid]                          # optional; every combination of the lists
//! p0 = [0.1, 0.3, 0.5]
//! p1 = [0.1, 0.3, 0.5]
//! n0 = [100, 1000]
//! n1 = [100, 1000]
//! replicates = 1000               # optional, overrides the top-level value
//!
//! [[scenario]]                    # optional, repeatable
//! p0 = 0.3
//! p1 = 0.2
//! n0 = 1000
//! n1 = 1000
//! replicates = 10000              # optional
//! level = 0.95                    # optional
//! methods = ["profile"]           # optional
//! ```
//!
//! Grid scenarios come first (ordered by n0, n1, p0, p1), then the explicit
//! scenarios in file order. At least one scenario is required. Unknown keys
//! are errors. Diagnostics carry the line and column of the offending table.

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Result, SveError};
use crate::intervals::{Method, DEFAULT_LEVEL};
use crate::simulation::{Scenario, DESK_REPLICATES};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    master_seed: Option<u64>,
    replicates: Option<u64>,
    level: Option<f64>,
    methods: Option<Spanned<Vec<String>>>,
    grid: Option<Spanned<RawGrid>>,
    #[serde(default)]
    scenario: Vec<Spanned<RawScenario>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    p0: Vec<f64>,
    p1: Vec<f64>,
    n0: Vec<u64>,
    n1: Vec<u64>,
    replicates: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    p0: f64,
    p1: f64,
    n0: u64,
    n1: u64,
    replicates: Option<u64>,
    level: Option<f64>,
    methods: Option<Vec<String>>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn located(source: &str, text: &str, offset: usize, message: impl std::fmt::Display) -> SveError {
    let (line, col) = position(text, offset);
    SveError::Config(format!("{source}:{line}:{col}: {message}"))
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for name in names {
        let m: Method = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Parses a config document into scenarios. `source` names the document in
/// diagnostics.
pub fn parse_config(text: &str, source: &str) -> Result<Vec<Scenario>> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        located(source, text, offset, e.message().trim_end())
    })?;

    let master_seed = raw.master_seed.unwrap_or(DEFAULT_SEED);
    let replicates = raw.replicates.unwrap_or(DESK_REPLICATES);
    let level = raw.level.unwrap_or(DEFAULT_LEVEL);
    let methods = match &raw.methods {
        Some(m) => parse_methods(m.get_ref())
            .map_err(|e| located(source, text, m.span().start, strip(e)))?,
        None => Method::ALL.to_vec(),
    };

    let mut scenarios = Vec::new();
    if let Some(grid) = &raw.grid {
        let start = grid.span().start;
        let g = grid.get_ref();
        for (name, len) in [("p0", g.p0.len()), ("p1", g.p1.len()), ("n0", g.n0.len()), ("n1", g.n1.len())] {
            if len == 0 {
                return Err(located(source, text, start, format!("grid list '{name}' is empty")));
            }
        }
        for &n0 in &g.n0 {
            for &n1 in &g.n1 {
                for &p0 in &g.p0 {
                    for &p1 in &g.p1 {
                        let sc = Scenario {
                            p0,
                            p1,
                            n0,
                            n1,
                            replicates: g.replicates.unwrap_or(replicates),
                            level,
                            methods: methods.clone(),
                            master_seed,
                        };
                        sc.validate().map_err(|e| located(source, text, start, strip(e)))?;
                        scenarios.push(sc);
                    }
                }
            }
        }
    }
    for entry in &raw.scenario {
        let start = entry.span().start;
        let s = entry.get_ref();
        let sc = Scenario {
            p0: s.p0,
            p1: s.p1,
            n0: s.n0,
            n1: s.n1,
            replicates: s.replicates.unwrap_or(replicates),
            level: s.level.unwrap_or(level),
            methods: match &s.methods {
                Some(m) => parse_methods(m).map_err(|e| located(source, text, start, strip(e)))?,
                None => methods.clone(),
            },
            master_seed,
        };
        sc.validate().map_err(|e| located(source, text, start, strip(e)))?;
        scenarios.push(sc);
    }
    if scenarios.is_empty() {
        return Err(SveError::Config(format!(
            "{source}: no scenarios (add a [grid] table or [[scenario]] entries)"
        )));
    }
    Ok(scenarios)
}

fn strip(e: SveError) -> String {
    match e {
        SveError::Config(m) => m,
        other => other.to_string(),
    }
}
