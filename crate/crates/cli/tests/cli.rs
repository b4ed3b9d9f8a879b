use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kendall-walks"));
    c.env_remove("KENDALL_WALKS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

const SMALL_CONFIG: &str = r#"{
  "seed": 5,
  "paths": 4000,
  "alphas": [1.0],
  "moment_ns": [1, 2, 3],
  "envelope": {"horizon": 200, "paths": 2000, "checkpoints": [50, 100]},
  "axioms": {"samples": 4000, "instances": 1}
}"#;

#[test]
fn nstep_from_unit_atom_is_pareto() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nstep.csv");
    let o = run(&[
        "nstep", "--step", "dirac:1", "--alpha", "1", "--n", "2", "--grid", "1:10:10", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(text.starts_with("x,cdf,pdf\n"));
    let rows = csv(&text);
    assert_eq!(rows.len(), 10);
    for r in rows {
        let x: f64 = r[0].parse().unwrap();
        let cdf: f64 = r[1].parse().unwrap();
        assert!((cdf - (1.0 - x.powi(-2))).abs() < 1e-12, "x={x} cdf={cdf}");
    }
}

#[test]
fn simulate_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path, threads: &str| {
        vec![
            "--threads".to_string(), threads.to_string(), "simulate".into(), "--conv".into(),
            "weak-kendall".into(), "--alpha".into(), "0.7".into(), "--step".into(),
            "symdirac:1".into(), "--n".into(), "6".into(), "--paths".into(), "1500".into(),
            "--seed".into(), "9".into(), "--out".into(), p.to_str().unwrap().to_string(),
        ]
    };
    assert_eq!(bin().args(args(&a, "1")).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(args(&b, "4")).status().unwrap().code(), Some(0));
    let (ta, tb) = (read(&a), read(&b));
    assert_eq!(ta, tb);
    assert!(ta.starts_with("path_id,n,x,q,theta\n"));
    let rows = csv(&ta);
    assert_eq!(rows.len(), 1500 * 7);
    assert_eq!(rows[0], ["0", "0", "0", "0", "1"]);
    assert_eq!(rows[1][1], "1");
    assert_eq!(rows[1][3], "0");
    assert_eq!(rows[1][4], "1");
    assert_eq!(rows[1][2].parse::<f64>().unwrap().abs(), 1.0);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "1499");
    assert_eq!(last[1], "6");
    for r in &rows {
        let q: u8 = r[3].parse().unwrap();
        let theta: f64 = r[4].parse().unwrap();
        assert!(q <= 1);
        assert!(theta >= 1.0);
        if q == 0 {
            assert_eq!(theta, 1.0);
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["simulate", "--conv", "kendall", "--alpha", "1", "--step", "dirac:1", "--n", "4", "--paths", "0"],
        &["simulate", "--conv", "kendall", "--alpha", "1", "--step", "dirac:1", "--n", "0", "--paths", "3"],
        &["simulate", "--conv", "kendall", "--alpha", "-1", "--step", "dirac:1", "--n", "4", "--paths", "3"],
        &["simulate", "--conv", "weak-kendall", "--alpha", "1.5", "--step", "symdirac:1", "--n", "4", "--paths", "3"],
        &["simulate", "--conv", "kendall", "--alpha", "1", "--step", "dirac:-1", "--n", "4", "--paths", "3"],
        &["simulate", "--conv", "classical", "--alpha", "1", "--step", "dirac:1", "--n", "4", "--paths", "3"],
        &["simulate", "--conv", "kendall", "--alpha", "1", "--step", "normal:1", "--n", "4", "--paths", "3"],
        &["nstep", "--step", "dirac:1", "--alpha", "1", "--n", "2", "--grid", "5:1:3"],
        &["nstep", "--step", "dirac:1", "--alpha", "1", "--n", "0", "--grid", "1:2:3"],
        &["verify", "--suite", "everything"],
        &["verify", "--config", "/nonexistent/config.json"],
        &["bogus"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?} wrote to stdout");
    }
}

#[test]
fn verify_moments_default_passes() {
    let o = run(&["verify", "--suite", "moments", "--config", "default"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["suite"], "moments");
    assert!(v.get("wall_clock_seconds").is_none());
    let checks = v["checks"].as_array().unwrap();
    let quad: Vec<_> = checks
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("quadrature_alpha_moment(alpha=1, n="))
        .collect();
    assert_eq!(quad.len(), 10);
    for c in quad {
        assert_eq!(c["verdict"], "pass");
        assert!(c["statistic"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn verify_reports_match_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, SMALL_CONFIG).unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("r{threads}.json"));
        let o = run(&[
            "--threads", threads, "verify", "--suite", "all", "--config", cfg.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(read(&out));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn failing_verification_exits_one() {
    // a_n = 1.5 exceeds kappa = 1, so the envelope preconditions fail
    let config = r#"{
      "paths": 100,
      "envelope": {"horizon": 60, "paths": 200, "n0": 50, "checkpoints": [],
        "spec": {
          "a": {"form": "constant", "value": 1.5},
          "b": {"form": "constant", "value": 1.0},
          "c": {"form": "power_log", "coef": 1.0, "power": 2.0, "log_power": 0.0},
          "d": {"form": "constant", "value": 1.0},
          "kappa": 1.0, "n0": 50}}
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, config).unwrap();
    let o = run(&["verify", "--suite", "envelope", "--config", cfg.to_str().unwrap(), "--timing"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["wall_clock_seconds"].as_f64().is_some());
    assert!(String::from_utf8_lossy(&o.stderr).contains("user/a_bounded_by_kappa"));
}

#[test]
fn transform_inversion_recovers_nstep_cdf() {
    let inv = run(&["transform", "--step", "beta:2,3", "--alpha", "0.8", "--power", "3", "--grid", "0.2:4:9", "--invert"]);
    let exact = run(&["nstep", "--step", "beta:2,3", "--alpha", "0.8", "--n", "3", "--grid", "0.2:4:9"]);
    assert_eq!(code(&inv), 0);
    assert_eq!(code(&exact), 0);
    let a = csv(&String::from_utf8(inv.stdout).unwrap());
    let b = csv(&String::from_utf8(exact.stdout).unwrap());
    assert_eq!(a.len(), 9);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra[0], rb[0]);
        let (x, y): (f64, f64) = (ra[1].parse().unwrap(), rb[1].parse().unwrap());
        assert!((x - y).abs() < 1e-9, "{ra:?} {rb:?}");
    }
    let table = run(&["transform", "--step", "dirac:1", "--alpha", "1", "--grid", "0.5:0.5:1"]);
    let text = String::from_utf8(table.stdout).unwrap();
    // Φ(t) = 1 - t for δ_1 with α = 1
    assert_eq!(text, "t,phi,dphi\n0.5,0.5,-1\n");
}
