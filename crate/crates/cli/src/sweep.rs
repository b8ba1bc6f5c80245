//! `t_max` sweeps over methods, simulation variants and seeds.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::config::{EvolverKind, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::pipeline::{reconstruct, simulate, Method};

/// One simulation setting of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    pub evolver: EvolverKind,
    pub shots: Option<u64>,
}

impl Variant {
    /// Exact and product-formula evolution without shot noise, and the
    /// product formula with `shots` per expectation.
    pub fn standard(shots: u64) -> Vec<Variant> {
        vec![
            Variant { name: "exact".into(), evolver: EvolverKind::Exact, shots: None },
            Variant { name: "trotter2".into(), evolver: EvolverKind::Trotter2, shots: None },
            Variant { name: "trotter2+shots".into(), evolver: EvolverKind::Trotter2, shots: Some(shots) },
        ]
    }

    pub fn is_deterministic(&self, base: &ExperimentConfig) -> bool {
        self.shots.is_none() && base.signal.sigma == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t_max: f64,
    pub method: Method,
    pub variant: String,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub n: Option<usize>,
    /// ANM only: solver convergence and the certificate maximum.
    pub converged: Option<bool>,
    pub max_dual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub t_max: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub variants: Vec<Variant>,
    pub workers: usize,
}

impl SweepPlan {
    /// `{0.05, 0.10, …, 1.50}`.
    pub fn default_t_max() -> Vec<f64> {
        (1..=30).map(|k| k as f64 / 20.0).collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the cell `(t_max, seed)`.
pub fn cell_seed(seed: u64, t_max: f64) -> u64 {
    splitmix64(seed ^ splitmix64(t_max.to_bits()))
}

struct Cell {
    t_max: f64,
    variant: usize,
    seed: u64,
}

#[derive(Clone, Copy)]
struct CellValue {
    epsilon: f64,
    n: usize,
    converged: Option<bool>,
    max_dual: Option<f64>,
}

type CellResult = Vec<(Method, CliResult<CellValue>)>;

fn run_cell(base: &ExperimentConfig, plan: &SweepPlan, cell: &Cell) -> CellResult {
    let v = &plan.variants[cell.variant];
    let mut cfg = base.clone().with_t_max(cell.t_max);
    cfg.signal.evolver = v.evolver;
    cfg.signal.shots = v.shots;
    cfg.signal.seed = cell_seed(cell.seed, cell.t_max);
    let signal = match simulate(&cfg) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            return plan.methods.iter().map(|&m| (m, Err(CliError::Usage(msg.clone())))).collect();
        }
    };
    plan.methods
        .iter()
        .map(|&m| {
            let value = reconstruct(&cfg, &signal, m).map(|r| CellValue {
                epsilon: r.epsilon(),
                n: r.n,
                converged: r.anm.as_ref().map(|a| a.converged),
                max_dual: r.anm.as_ref().map(|a| a.max_dual),
            });
            (m, value)
        })
        .collect()
}

/// Runs every `(t_max, variant, seed)` cell on a bounded pool of worker
/// threads. Rows come back in plan order regardless of scheduling.
///
/// Cells of deterministic variants are computed once and repeated for each
/// seed.
pub fn run_sweep(base: &ExperimentConfig, plan: &SweepPlan) -> CliResult<Vec<SweepRow>> {
    if plan.t_max.is_empty() || plan.seeds.is_empty() || plan.methods.is_empty() || plan.variants.is_empty() {
        return Err(CliError::Usage("sweep needs non-empty t_max, seed, method and variant lists".into()));
    }
    base.validate()?;
    let mut cells = Vec::new();
    for &t_max in &plan.t_max {
        for (vi, v) in plan.variants.iter().enumerate() {
            if v.is_deterministic(base) {
                cells.push(Cell { t_max, variant: vi, seed: plan.seeds[0] });
            } else {
                cells.extend(plan.seeds.iter().map(|&seed| Cell { t_max, variant: vi, seed }));
            }
        }
    }
    let results: Vec<Mutex<Option<CellResult>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = plan.workers.clamp(1, cells.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let r = run_cell(base, plan, &cells[i]);
                *results[i].lock().expect("result slot") = Some(r);
            });
        }
    });

    let mut rows = Vec::new();
    let mut k = 0;
    for &t_max in &plan.t_max {
        for v in &plan.variants {
            let seeds: Vec<u64> = plan.seeds.clone();
            let shared = v.is_deterministic(base);
            let first = k;
            for (si, &seed) in seeds.iter().enumerate() {
                let idx = if shared { first } else { first + si };
                let cell = results[idx].lock().expect("result slot");
                for (m, r) in cell.as_ref().expect("cell ran") {
                    let mut row = SweepRow {
                        t_max,
                        method: *m,
                        variant: v.name.clone(),
                        seed,
                        epsilon: None,
                        n: None,
                        converged: None,
                        max_dual: None,
                        error: None,
                    };
                    match r {
                        Ok(c) => {
                            row.epsilon = Some(c.epsilon);
                            row.n = Some(c.n);
                            row.converged = c.converged;
                            row.max_dual = c.max_dual;
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                    rows.push(row);
                }
            }
            k += if shared { 1 } else { seeds.len() };
        }
    }
    Ok(rows)
}

/// CSV with columns `t_max, method, variant, seed, epsilon, n, converged,
/// max_dual, error`.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_max", "method", "variant", "seed", "epsilon", "n", "converged", "max_dual", "error"])?;
    for r in rows {
        w.write_record([
            format!("{}", r.t_max),
            r.method.to_string(),
            r.variant.clone(),
            r.seed.to_string(),
            r.epsilon.map(|e| format!("{e:.10e}")).unwrap_or_default(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.converged.map(|c| c.to_string()).unwrap_or_default(),
            r.max_dual.map(|q| format!("{q:.10e}")).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_differ() {
        assert_ne!(cell_seed(1, 0.25), cell_seed(1, 0.3));
        assert_ne!(cell_seed(1, 0.25), cell_seed(2, 0.25));
        assert_eq!(cell_seed(7, 0.5), cell_seed(7, 0.5));
    }

    #[test]
    fn default_grid() {
        let g = SweepPlan::default_t_max();
        assert_eq!(g.len(), 30);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[29] - 1.5).abs() < 1e-12);
    }
}
