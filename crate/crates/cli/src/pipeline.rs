//! simulate → mitigate → rescale → reconstruct → map back → score.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use superres::anm::{self, dual_polynomial_grid, select_tau, Diagnostics, Tau};
use superres::dft::extract_peaks_clean;
use superres::metrics::{match_poles_within, MatchReport};
use superres::qsim::{
    build_hamiltonians, mitigate_gate_error, spectral_oracle, truth_for, GreenKind, GreenSampler, ShotConfig,
};
use superres::spectrum::{add_noise, energy_bounds, Domain, LineSpectrum, RescaleMap, SamplingGrid, TimeSignal};
use superres::scalar::wrap_distance;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Scan density used when checking the certificate bound.
pub const CERTIFICATE_GRID: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Anm,
    Dft,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Anm, Method::Dft];

    pub fn name(self) -> &'static str {
        match self {
            Method::Anm => "anm",
            Method::Dft => "dft",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "anm" => Ok(Method::Anm),
            "dft" => Ok(Method::Dft),
            _ => Err(CliError::Usage(format!("unknown method {s:?}"))),
        }
    }
}

pub fn green_kind(cfg: &ExperimentConfig) -> GreenKind {
    if cfg.signal.use_sym {
        GreenKind::Symmetric
    } else {
        GreenKind::General
    }
}

/// Energy window from the config, falling back to the coefficient bound of
/// the effective Hamiltonian.
pub fn energy_window(cfg: &ExperimentConfig) -> CliResult<(f64, f64)> {
    let (lo, hi) = energy_bounds(&build_hamiltonians(cfg.model).effective)?;
    Ok((cfg.rescale.omega_a.unwrap_or(lo), cfg.rescale.omega_b.unwrap_or(hi)))
}

pub fn rescale_map(cfg: &ExperimentConfig) -> CliResult<RescaleMap<f64>> {
    let (a, b) = energy_window(cfg)?;
    let t0 = cfg.signal.t0_physical();
    Ok(match cfg.rescale.delta_omega_override {
        Some(gap) => RescaleMap::with_gap(a, b, gap, t0)?,
        None => RescaleMap::new(a, b, cfg.rescale.k_min, t0)?,
    })
}

/// Sampling grid: `n` if given, otherwise every grid point up to `t_max`.
pub fn sample_grid(cfg: &ExperimentConfig, map: &RescaleMap<f64>) -> CliResult<SamplingGrid<f64>> {
    let n = match (cfg.signal.n, cfg.signal.t_max) {
        (Some(n), _) => n,
        (None, Some(t)) => map.samples_up_to(t * cfg.signal.time_unit.to_physical()),
        (None, None) => return Err(CliError::Usage("signal needs t_max or n".into())),
    };
    Ok(map.grid(n)?)
}

/// Physical-domain Green's-function samples for `cfg`.
pub fn simulate(cfg: &ExperimentConfig) -> CliResult<TimeSignal<f64>> {
    cfg.validate()?;
    let map = rescale_map(cfg)?;
    let grid = sample_grid(cfg, &map)?;
    let sampler = GreenSampler::new(cfg.model, cfg.signal.evolver())?;
    let shot = ShotConfig::new(cfg.signal.shots, cfg.signal.seed)?;
    let signal = sampler.signal(green_kind(cfg), &grid, shot)?;
    if cfg.signal.sigma > 0.0 {
        // Offset keeps the noise stream apart from the shot streams.
        Ok(add_noise(&signal, cfg.signal.sigma, cfg.signal.seed ^ 0x6e6f_6973_6500_0000)?)
    } else {
        Ok(signal)
    }
}

/// Exact poles of the signal `cfg` simulates, two-sided for `green_sym`.
pub fn scoring_truth(cfg: &ExperimentConfig) -> CliResult<LineSpectrum<f64>> {
    let oracle = spectral_oracle(cfg.model)?;
    Ok(match green_kind(cfg) {
        GreenKind::Symmetric => oracle.mirrored()?,
        GreenKind::General => truth_for(&oracle, GreenKind::General)?,
    })
}

/// `t_max` beyond which the sample-complexity bound `n ≥ 2.5/Δ_f` holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionThreshold {
    /// Minimal wraparound separation of the signal's poles, canonical.
    pub delta_f: f64,
    /// Same separation in angular units.
    pub delta_omega: f64,
    pub n_required: usize,
    pub t_max_physical: f64,
    /// `t_max_physical` in the config's time unit.
    pub t_max: f64,
}

pub fn resolution_threshold(cfg: &ExperimentConfig) -> CliResult<ResolutionThreshold> {
    let map = rescale_map(cfg)?;
    let truth = truth_for(&spectral_oracle(cfg.model)?, green_kind(cfg))?;
    let canon = map.spectrum_to_canonical(&truth)?;
    let f = canon.frequencies();
    let mut delta_f = f64::INFINITY;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            delta_f = delta_f.min(wrap_distance(f[i], f[j]));
        }
    }
    if !delta_f.is_finite() || delta_f <= 0.0 {
        return Err(CliError::Numeric(superres::Error::InvalidArgument(
            "separation needs at least two distinct poles".into(),
        )));
    }
    let delta_omega = delta_f * std::f64::consts::TAU * map.omega_max;
    let span = 2.5 / (delta_f * map.omega_max);
    let t_phys = cfg.signal.t0_physical() + span;
    Ok(ResolutionThreshold {
        delta_f,
        delta_omega,
        n_required: (2.5 / delta_f).ceil() as usize,
        t_max_physical: t_phys,
        t_max: t_phys / cfg.signal.time_unit.to_physical(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnmDetails {
    pub tau: f64,
    pub diagnostics: Diagnostics,
    pub converged: bool,
    /// Maximum of the dual polynomial on [`CERTIFICATE_GRID`] points.
    pub max_dual: f64,
    /// `(f, ω, Q)` on the locate-peaks scan.
    #[serde(skip)]
    pub dual_samples: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub method: Method,
    pub n: usize,
    /// Physical-domain estimate, two-sided for `green_sym`.
    pub spectrum: LineSpectrum<f64>,
    pub truth: LineSpectrum<f64>,
    pub report: MatchReport,
    pub alpha: Option<f64>,
    pub anm: Option<AnmDetails>,
}

impl Reconstruction {
    pub fn epsilon(&self) -> f64 {
        self.report.epsilon
    }

    pub fn report_json(&self, t_max: Option<f64>) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "n": self.n,
            "t_max": t_max,
            "epsilon": self.report.epsilon,
            "match": self.report,
            "alpha": self.alpha,
            "anm": self.anm,
        })
    }
}

/// τ for `cfg`: an explicit value, or the noise-scaled rule bounded below by
/// `tau_floor`, with the noise level taken from the signal settings when the
/// solver config leaves it at zero.
pub fn resolve_tau(cfg: &ExperimentConfig, n: usize) -> CliResult<f64> {
    let m = &cfg.method.anm;
    Ok(match m.solver.tau {
        Tau::Fixed(t) => t,
        Tau::Auto { sigma } => {
            let sigma = if sigma > 0.0 { sigma } else { cfg.signal.effective_sigma() };
            select_tau(sigma, n)?.max(m.tau_floor)
        }
    })
}

pub fn reconstruct(cfg: &ExperimentConfig, signal: &TimeSignal<f64>, method: Method) -> CliResult<Reconstruction> {
    if signal.domain() != Domain::Physical {
        return Err(superres::Error::WrongDomain { expected: "physical" }.into());
    }
    let map = rescale_map(cfg)?;
    let kind = green_kind(cfg);
    let (signal, alpha) = match cfg.mitigation.n_fit {
        Some(n_fit) => {
            let (s, a) = mitigate_gate_error(signal, n_fit, kind.value_at_zero())?;
            (s, Some(a))
        }
        None => (signal.clone(), None),
    };
    let n = signal.len();
    let (canonical_est, details) = match method {
        Method::Anm => {
            let y = map.to_canonical(&signal)?;
            let solver = cfg.method.anm.solver.with_tau(resolve_tau(cfg, n)?);
            let est = anm::estimate(&y, &solver)?;
            let scan = solver.grid_size(n);
            let q = dual_polynomial_grid(&est.solution, scan)?;
            let dual_samples = q
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let f = k as f64 / scan as f64;
                    (f, std::f64::consts::TAU * map.omega_max * (f + map.phi), v)
                })
                .collect();
            let max_dual = dual_polynomial_grid(&est.solution, CERTIFICATE_GRID)?.into_iter().fold(0.0, f64::max);
            let details = AnmDetails {
                tau: est.solution.tau,
                diagnostics: est.solution.diagnostics(),
                converged: est.solution.converged,
                max_dual,
                dual_samples,
            };
            (map.from_canonical(&est.spectrum)?, Some(details))
        }
        Method::Dft => {
            let y = map.to_canonical_dft(&signal)?;
            (map.from_canonical_dft(&extract_peaks_clean(&y, &cfg.method.dft)?)?, None)
        }
    };
    let mut spectrum = canonical_est.prune(cfg.method.anm.amplitude_floor.max(0.0));
    if kind == GreenKind::Symmetric {
        spectrum = spectrum.mirrored()?;
    }
    let truth = scoring_truth(cfg)?;
    let (a, b) = energy_window(cfg)?;
    let report = match_poles_within(&truth, &spectrum, (b - a) / 4.0)?;
    Ok(Reconstruction { method, n, spectrum, truth, report, alpha, anm: details })
}

/// [`simulate`] then [`reconstruct`] for each method.
pub fn run(cfg: &ExperimentConfig, methods: &[Method]) -> CliResult<Vec<Reconstruction>> {
    let signal = simulate(cfg)?;
    methods.iter().map(|&m| reconstruct(cfg, &signal, m)).collect()
}
