use std::path::Path;
use std::process::{Command, Output};

use superres_cli::commands::load_signal;
use superres_cli::pipeline::{reconstruct, simulate};
use superres_cli::sweep::{run_sweep, SweepPlan, Variant};
use superres_cli::{ExperimentConfig, Method};

fn superres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superres")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(superres(&["--help"]).status.code(), Some(0));
    assert_eq!(superres(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(superres(&["reconstruct", "--signal", "/nonexistent/signal.json"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"signal": {"t_max": 0.3, "n": 6}}"#).unwrap();
    assert_eq!(superres(&["simulate", "--config", path(&bad)]).status.code(), Some(1));

    // One sample is too short for the solver.
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"signal": {"t_max": 0.05}}"#).unwrap();
    let out = dir.path().join("out");
    assert!(superres(&["simulate", "--config", path(&short), "--out", path(&out)]).status.success());
    let signal = out.join("signal.json");
    let code = superres(&["reconstruct", "--config", path(&short), "--signal", path(&signal), "--method", "anm", "--out", path(&out)])
        .status
        .code();
    assert_eq!(code, Some(3));
}

#[test]
fn simulate_then_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(superres(&["--quiet", "simulate", "--out", path(out)]).status.success());
    let signal = load_signal(&out.join("signal.json")).unwrap();
    let cfg = ExperimentConfig::default();
    assert_eq!(signal, simulate(&cfg).unwrap());

    let r = superres(&["reconstruct", "--signal", path(&out.join("signal.json")), "--out", path(out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["spectrum_anm.json", "spectrum_dft.json", "report_anm.json", "report_dft.json", "dual_polynomial.csv"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report_anm.json")).unwrap()).unwrap();
    let direct = reconstruct(&cfg, &signal, Method::Anm).unwrap();
    assert!((report["epsilon"].as_f64().unwrap() - direct.epsilon()).abs() < 1e-12);
    assert!(report["anm"]["max_dual"].as_f64().unwrap() <= 1.001);
}

#[test]
fn sweep_matches_single_runs() {
    let cfg = ExperimentConfig::default();
    let plan = SweepPlan {
        t_max: vec![0.27, 0.4],
        seeds: vec![5, 6],
        methods: Method::ALL.to_vec(),
        variants: vec![Variant::standard(1000).remove(0)],
        workers: 2,
    };
    let rows = run_sweep(&cfg, &plan).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for row in &rows {
        let c = cfg.clone().with_t_max(row.t_max);
        let single = reconstruct(&c, &simulate(&c).unwrap(), row.method).unwrap();
        assert_eq!(row.epsilon, Some(single.epsilon()));
        assert_eq!(row.n, Some(single.n));
    }
}

#[test]
fn sweep_writes_csv_and_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = superres(&["sweep", "--t-max", "0.25,0.3", "--seeds", "0,1", "--variants", "trotter2+shots", "--shots", "5000", "--out", path(out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let mut reader = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().take(6).collect::<Vec<_>>(), ["t_max", "method", "variant", "seed", "epsilon", "n"]);
    assert_eq!(reader.records().count(), 2 * 2 * 2);
    let th: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("threshold.json")).unwrap()).unwrap();
    assert!((th["t_max"].as_f64().unwrap() - 1.0024).abs() < 1e-3);
}
