//! Subcommand bodies; each writes its files under `out` and returns a short
//! summary for the terminal.

use std::fs;
use std::path::{Path, PathBuf};

use superres::qsim::spectral_oracle;
use superres::spectrum::{Domain, TimeSignal};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{self, green_kind, Method};
use crate::sweep::{run_sweep, write_csv, SweepPlan};

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, format!("malformed json: {e}")))
}

pub fn signal_path(out: &Path) -> PathBuf {
    out.join("signal.json")
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> CliResult<String> {
    let signal = pipeline::simulate(cfg)?;
    ensure_dir(out)?;
    let path = signal_path(out);
    write_json(&path, &signal.to_json())?;
    let meta = serde_json::json!({
        "model": cfg.model,
        "evolver": cfg.signal.evolver(),
        "seed": cfg.signal.seed,
        "shots": cfg.signal.shots,
        "sigma": cfg.signal.sigma,
        "kind": green_kind(cfg),
        "time_unit": cfg.signal.time_unit,
        "config": cfg,
    });
    write_json(&out.join("signal.meta.json"), &meta)?;
    Ok(format!("wrote {} samples to {}", signal.len(), path.display()))
}

pub fn load_signal(path: &Path) -> CliResult<TimeSignal<f64>> {
    let value = read_json(path)?;
    TimeSignal::from_json(&value, Domain::Physical).map_err(|e| CliError::io(path, e))
}

pub fn cmd_reconstruct(
    cfg: &ExperimentConfig,
    signal_file: &Path,
    methods: &[Method],
    out: &Path,
) -> CliResult<String> {
    let signal = load_signal(signal_file)?;
    ensure_dir(out)?;
    let mut lines = Vec::new();
    for &m in methods {
        let r = pipeline::reconstruct(cfg, &signal, m)?;
        write_json(&out.join(format!("spectrum_{m}.json")), &r.spectrum.to_json())?;
        write_json(&out.join(format!("report_{m}.json")), &r.report_json(cfg.signal.t_max))?;
        if let Some(details) = &r.anm {
            let path = out.join("dual_polynomial.csv");
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e))?;
            let rows = std::iter::once(["f".to_string(), "omega".into(), "q".into()]).chain(
                details.dual_samples.iter().map(|(f, w, q)| [f.to_string(), w.to_string(), q.to_string()]),
            );
            for row in rows {
                w.write_record(&row).map_err(|e| CliError::io(&path, e))?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        lines.push(format!("{m}: n = {}, poles = {}, epsilon = {:.6}", r.n, r.spectrum.len(), r.epsilon()));
    }
    Ok(lines.join("\n"))
}

pub fn cmd_sweep(cfg: &ExperimentConfig, plan: &SweepPlan, out: &Path) -> CliResult<String> {
    let rows = run_sweep(cfg, plan)?;
    ensure_dir(out)?;
    let path = out.join("sweep.csv");
    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_csv(&rows, file).map_err(|e| CliError::io(&path, e))?;
    let th = pipeline::resolution_threshold(cfg)?;
    write_json(&out.join("threshold.json"), &serde_json::to_value(th).expect("threshold serializes"))?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(format!(
        "wrote {} rows ({failed} failed) to {}\nseparation bound: n >= {}, t_max >= {:.4} ({:.4} physical)",
        rows.len(),
        path.display(),
        th.n_required,
        th.t_max,
        th.t_max_physical
    ))
}

/// Pole table of the exact spectral function.
pub fn cmd_oracle(cfg: &ExperimentConfig) -> CliResult<String> {
    let o = spectral_oracle(cfg.model)?.sorted();
    let mut s = format!("U = {}, V = {}\n{:>12} {:>12} {:>10}\n", cfg.model.u, cfg.model.v, "amplitude", "omega", "<Z>");
    for p in o.poles() {
        s += &format!("{:>12.6} {:>12.6} {:>10.2e}\n", p.amplitude.re, p.frequency, p.z_expect.unwrap_or(0.0));
    }
    Ok(s.trim_end().to_string())
}
