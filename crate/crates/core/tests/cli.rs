use std::process::{Command, Output};

use sve::cli::{fmt2, reanalysis_rows, ResultRow, VAX004};
use sve::estimands::{empirical_risks, sve_point, TwoArmCounts};
use sve::intervals::{sve_ci, Method};

fn sve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sve")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = sve(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const EXAMPLE: [&str; 9] = ["estimate", "--x0", "100", "--n0", "1000", "--x1", "50", "--n1", "1000"];

#[test]
fn estimate_text_golden() {
    assert_eq!(stdout(&EXAMPLE), "0.50  0.31  0.64  0.95  Profile\n");
    let mut tanh = EXAMPLE.to_vec();
    tanh.extend(["--method", "tanh-wald"]);
    assert_eq!(stdout(&tanh), "0.50  0.32  0.65  0.95  tanh-Wald\n");
    let mut wald = EXAMPLE.to_vec();
    wald.extend(["--method", "wald"]);
    assert_eq!(stdout(&wald), "0.50  0.34  0.66  0.95  Wald\n");
    let equal = stdout(&["estimate", "--x0", "5", "--n0", "10", "--x1", "5", "--n1", "10"]);
    assert!(equal.starts_with("0.00  "), "{equal}");
}

#[test]
fn json_round_trips_to_library_values() {
    let c = TwoArmCounts::new(100, 1000, 50, 1000).unwrap();
    for m in Method::ALL {
        let mut args = EXAMPLE.to_vec();
        args.extend(["--method", m.key(), "--format", "json"]);
        let row: ResultRow = serde_json::from_str(stdout(&args).trim()).unwrap();
        let ci = sve_ci(&c, m, 0.95).unwrap();
        let est = sve_point(&empirical_risks(&c)).unwrap().value;
        assert_eq!(row, ResultRow::new(est, &ci));
        let v: serde_json::Value = serde_json::from_str(stdout(&args).trim()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["estimate", "level", "lower", "method", "upper"]);
    }
}

#[test]
fn formats_agree_after_rounding() {
    let args = ["estimate", "--x0", "37", "--n0", "400", "--x1", "52", "--n1", "380", "--level", "0.9"];
    let text = stdout(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = stdout(&csv_args);
    let mut lines = csv_out.lines();
    assert_eq!(lines.next(), Some("estimate,lower,upper,level,method"));
    let f: Vec<&str> = lines.next().unwrap().split(',').collect();
    let nums: Vec<String> = f[..4].iter().map(|x| fmt2(x.parse().unwrap())).collect();
    assert_eq!(text.trim(), format!("{}  {}  {}  {}  {}", nums[0], nums[1], nums[2], nums[3], f[4]));
}

#[test]
fn invalid_input_exit_codes() {
    let out = sve(&["estimate", "--x0", "11", "--n0", "10", "--x1", "1", "--n1", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(out.stdout.is_empty());

    assert_eq!(sve(&["estimate", "--x0", "1"]).status.code(), Some(2));
    assert_eq!(sve(&["estimate", "--x0", "x", "--n0", "1", "--x1", "1", "--n1", "1"]).status.code(), Some(2));
    let mut bad = EXAMPLE.to_vec();
    bad.extend(["--method", "bayes"]);
    assert_eq!(sve(&bad).status.code(), Some(2));
    let mut bad = EXAMPLE.to_vec();
    bad.extend(["--level", "1.5"]);
    assert_eq!(sve(&bad).status.code(), Some(3));
    let tanh_boundary = ["estimate", "--x0", "5", "--n0", "50", "--x1", "0", "--n1", "50", "--method", "tanh-wald"];
    assert_eq!(sve(&tanh_boundary).status.code(), Some(3));
    assert_eq!(sve(&["reanalyze", "--dataset", "nope"]).status.code(), Some(2));
    assert_eq!(sve(&["--help"]).status.code(), Some(0));
}

#[test]
fn from_model_examples() {
    assert_eq!(stdout(&["from-model", "--theta", "1", "--se-log-theta", "0.1"]), "0.00  -0.20  0.20  0.95  Wald\n");
    assert_eq!(
        stdout(&["from-model", "--theta", "0.32", "--theta-lower", "0.25", "--theta-upper", "0.41"]),
        "0.68  0.59  0.75  0.95  Profile\n"
    );
    assert_eq!(
        stdout(&["from-model", "--theta", "1", "--theta-lower", "1", "--theta-upper", "1"]),
        "0.00  0.00  0.00  0.95  Profile\n"
    );
    assert_eq!(sve(&["from-model", "--theta", "0.5"]).status.code(), Some(2));
    assert_eq!(sve(&["from-model", "--theta", "0.5", "--method", "profile", "--se-log-theta", "0.1"]).status.code(), Some(2));
    assert_eq!(sve(&["from-model", "--theta=-1", "--se-log-theta", "0.1"]).status.code(), Some(3));
    assert_eq!(sve(&["from-model", "--theta", "0.5", "--theta-lower", "0.6", "--theta-upper", "0.4"]).status.code(), Some(3));
}

#[test]
fn reanalysis_rows_and_formats() {
    let text = stdout(&["reanalyze"]);
    assert_eq!(text.lines().count(), VAX004.len() + 1);
    let all = text.lines().find(|l| l.starts_with("All volunteers")).unwrap();
    assert!(all.ends_with("0.05 (-0.17, 0.23)    0.05 (-0.15, 0.22)"), "{all}");
    let low = text.lines().find(|l| l.starts_with("Low risk")).unwrap();
    assert!(low.contains("-0.46 (-1.88, 0.26)") && low.ends_with("-0.32 (-0.67, 0.23)"), "{low}");
    let women = text.lines().find(|l| l.starts_with("Women")).unwrap();
    assert!(women.ends_with("0.76 (-0.19, 0.97)"), "{women}");

    let json = stdout(&["reanalyze", "--format", "json"]);
    let rows: Vec<sve::cli::ReanalysisRow> = serde_json::from_str(&json).unwrap();
    let records: Vec<_> = VAX004.iter().map(|(r, _)| *r).collect();
    assert_eq!(rows, reanalysis_rows(&records, 0.95).unwrap());
    let csv_out = stdout(&["reanalyze", "--format", "csv"]);
    assert_eq!(csv_out.lines().count(), VAX004.len() + 1);
}

#[test]
fn labbe_output() {
    let out = stdout(&["labbe", "--effects", "-0.5,0,0.5", "--points", "3"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "s,p0,p1");
    assert_eq!(lines.len(), 10);
    assert!(lines.contains(&"0.0,0.5,0.5"));
    assert!(lines.contains(&"0.5,0.5,0.25"));
    assert!(lines.contains(&"-0.5,0.25,0.5"));
    assert_eq!(sve(&["labbe", "--effects", "1.0"]).status.code(), Some(3));
    assert_eq!(sve(&["labbe", "--effects", "0.2", "--points", "1"]).status.code(), Some(3));
}

#[test]
fn simulate_null_config_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("null.toml");
    std::fs::write(
        &cfg,
        "master_seed = 42\nreplicates = 200\nmethods = [\"profile\"]\n\n[[scenario]]\np0 = 0.3\np1 = 0.3\nn0 = 100\nn1 = 100\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    stdout(&["simulate", "--config", cfg, "--output", a.to_str().unwrap(), "--threads", "1"]);
    stdout(&["simulate", "--config", cfg, "--output", b.to_str().unwrap(), "--threads", "3"]);
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());

    let mut rdr = csv::Reader::from_reader(a.as_slice());
    let rows: Vec<sve::simulation::ReportRow> = rdr.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].type_i_error.is_some());
    assert_eq!(rows[0].master_seed, 42);

    let seeded = stdout(&["simulate", "--config", cfg, "--seed", "7", "--format", "json"]);
    let rows: Vec<sve::simulation::ReportRow> = serde_json::from_str(&seeded).unwrap();
    assert_eq!(rows[0].master_seed, 7);
}

#[test]
fn simulate_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "replicates = 10\n\n[[scenario]]\np0 = 0.3\np1 = 1.3\nn0 = 100\nn1 = 100\n").unwrap();
    let out = sve(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml:3:"), "{err}");
    assert_eq!(sve(&["simulate"]).status.code(), Some(2));
    assert_eq!(sve(&["simulate", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for name in ["desk.toml", "full.toml"] {
        let path = format!("{root}/{name}");
        let text = std::fs::read_to_string(&path).unwrap();
        let scenarios = sve::cli::config::parse_config(&text, &path).unwrap();
        assert!(!scenarios.is_empty());
        if name == "full.toml" {
            assert_eq!(scenarios.len(), 729);
            assert!(scenarios.iter().all(|s| s.replicates == 10_000 && s.methods.len() == 3));
        }
    }
}
