use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_aqft1d");

/// `C = ∫ cos(s) φ(s) ds` for the unit bump of radius 0.1 at 0.
const COSINE_MOMENT: f64 = 0.999_209_652_544_227;
/// `τ₁₂` for unit bumps of radius 0.1 at 0 and 2, m = 1, ρ = 1.
const TAU_12: f64 = -0.907_860_673_001_836_6;

const FLAT: &str = r#"
scenario = "constant-mass-scalar"
[base]
lo = [0.0]
hi = [1.0]
grid = [2]
[density]
value = 1.0
slope = [0.0]
[[tests]]
centre = 0.0
radius = 0.1
[[tests]]
centre = 2.0
radius = 0.1
[propagate]
field = 0
x = [0.0]
lo = -1.0
hi = 3.0
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("AQFT1D_THREADS", "2").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"massless-dirac\"\n");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for r in [&a, &b] {
        let o = run(&["verify", "--config", s(&cfg), "--report", s(r)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["scenario"], "massless-dirac");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass" && c.get("runtime_ms").is_none()));
    let names: Vec<_> = checks.iter().map(|c| c["check"].as_str().unwrap().to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn zero_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"massless-dirac\"\n");
    let report = dir.path().join("r.json");
    let o = run(&["verify", "--config", s(&cfg), "--report", s(&report), "--tol", "green.exact_sequence=0"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    let failing = v["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert!(failing["check"].as_str().unwrap().starts_with("green.exact_sequence["));
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"massless-dirac\"\n");
    let report = dir.path().join("r.json");
    assert_eq!(code(&run(&["verify", "--config", s(&cfg), "--report", s(&report), "--timings"])), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["runtime_ms"].is_u64()));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "scenario = \"quartic\"\n");
    let bad = write(dir.path(), "b.toml", "scenario = \"constant-mass-scalar\"\n[[tests]]\ncentre = 0.0\nradius = -1.0\n");
    let good = write(dir.path(), "g.toml", "scenario = \"massless-dirac\"\n");
    let missing = dir.path().join("missing.toml");
    for args in [
        vec!["verify", "--config", s(&unknown)],
        vec!["verify", "--config", s(&missing)],
        vec!["verify", "--config", s(&good), "--tol", "no.such.check=1"],
        vec!["verify", "--config", s(&good), "--tol", "models.quotient"],
        vec!["verify"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
    let o = run(&["verify", "--config", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tests[0].radius"));
}

#[test]
fn propagate_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", FLAT);
    let csv = dir.path().join("o.csv");
    assert_eq!(code(&run(&["propagate", "--config", s(&cfg), "--csv", s(&csv), "--samples", "5"])), 0);
    let mut r = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["T", "x0", "value0"]);
    let rows: Vec<Vec<f64>> = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], vec![-1.0, 0.0, 0.0]);
    for row in &rows[2..] {
        let expected = row[0].sin() * COSINE_MOMENT;
        assert!((row[2] - expected).abs() < 1e-10, "{row:?} vs {expected}");
    }
    assert_eq!(code(&run(&["propagate", "--config", s(&cfg), "--csv", s(&csv), "--samples", "0"])), 2);
}

/// `G⁺φ` at `T = −3 + 6k/199` for the rows inside the support of the bump.
const INTERIOR_ROWS: [(usize, f64); 6] = [
    (97, 0.000_073_362_085_496_141_37),
    (98, 0.002_282_098_603_800_781_4),
    (99, 0.010_120_004_424_730_418),
    (100, 0.025_182_895_958_593_483),
    (101, 0.047_457_081_050_724_99),
    (102, 0.075_319_371_427_642_66),
];

#[test]
fn propagate_two_hundred_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &FLAT.replace("lo = -1.0", "lo = -3.0"));
    let csv = dir.path().join("o.csv");
    assert_eq!(code(&run(&["propagate", "--config", s(&cfg), "--csv", s(&csv), "--samples", "200"])), 0);
    let rows: Vec<Vec<f64>> = csv::Reader::from_path(&csv)
        .unwrap()
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    for (k, row) in rows.iter().enumerate() {
        assert!((row[0] - (-3.0 + 6.0 * k as f64 / 199.0)).abs() < 1e-15);
        let expected = match INTERIOR_ROWS.iter().find(|(i, _)| *i == k) {
            Some(&(_, v)) => v,
            None if row[0] <= -0.1 => 0.0,
            None => row[0].sin() * COSINE_MOMENT,
        };
        assert!((row[2] - expected).abs() < 1e-7, "row {k}: {} vs {expected}", row[2]);
    }
}

#[test]
fn propagate_zero_field_and_dirac_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"massless-dirac\"\n[propagate]\nzero = true\noperator = \"causal\"\n");
    let csv = dir.path().join("o.csv");
    assert_eq!(code(&run(&["propagate", "--config", s(&cfg), "--csv", s(&csv), "--samples", "3"])), 0);
    let mut r = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["T", "x0", "re0", "im0", "re1", "im1"]);
    for rec in r.records() {
        let rec = rec.unwrap();
        assert!(rec.iter().skip(2).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn commutator_normal_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", FLAT);
    let o = run(&["commutator", "--config", s(&cfg), "w1", "w2"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    let coeff: f64 = out.trim().strip_prefix("i*").unwrap().strip_suffix(" * 1").unwrap().parse().unwrap();
    assert!((coeff - TAU_12).abs() < 1e-9, "{out}");
    let o = run(&["commutator", "--config", s(&cfg), "w1 +", "w2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));

    let dirac = write(dir.path(), "d.toml", "scenario = \"massless-dirac\"\n");
    let o = run(&["commutator", "--config", s(&dirac), "v1", "v1"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0");
    let o = run(&["commutator", "--config", s(&dirac), "v1", "v2"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).trim().ends_with(" * 1"));
}
