use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};
use superres::anm::AnmConfig;
use superres::dft::DftConfig;
use superres::qsim::{Evolver, ModelParams};

use crate::error::{CliError, CliResult};

/// Unit of the `t0` / `t_max` values in a config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    /// Evolution time divided by 2π.
    #[default]
    Cycles,
    /// Evolution time as it enters `e^{−iHt}`.
    Physical,
}

impl TimeUnit {
    /// Multiplier taking a config time to physical time.
    pub fn to_physical(self) -> f64 {
        match self {
            TimeUnit::Cycles => TAU,
            TimeUnit::Physical => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvolverKind {
    #[default]
    Exact,
    Trotter2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub evolver: EvolverKind,
    pub trotter_steps: usize,
    /// Shots per expectation term; `None` gives exact expectations.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Additive complex Gaussian noise level per sample.
    pub sigma: f64,
    pub t0: f64,
    pub t_max: Option<f64>,
    pub n: Option<usize>,
    /// `green_sym` when true, the four-term assembly otherwise.
    pub use_sym: bool,
    pub time_unit: TimeUnit,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            evolver: EvolverKind::Exact,
            trotter_steps: Evolver::DEFAULT_TROTTER_STEPS,
            shots: None,
            seed: 0,
            sigma: 0.0,
            t0: 0.0,
            t_max: Some(0.27),
            n: None,
            use_sym: true,
            time_unit: TimeUnit::Cycles,
        }
    }
}

impl SignalConfig {
    pub fn evolver(&self) -> Evolver {
        match self.evolver {
            EvolverKind::Exact => Evolver::Exact,
            EvolverKind::Trotter2 => Evolver::Trotter2 { steps: self.trotter_steps },
        }
    }

    pub fn t0_physical(&self) -> f64 {
        self.t0 * self.time_unit.to_physical()
    }

    /// Noise level per complex sample from shots and additive noise.
    ///
    /// Each expectation estimated from `N` shots has variance at most `1/N`,
    /// and a sample combines two of them (four for the general assembly,
    /// each weighted by one half).
    pub fn effective_sigma(&self) -> f64 {
        let shot_var = self.shots.map_or(0.0, |n| 2.0 / n as f64);
        (self.sigma * self.sigma + shot_var).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RescaleConfig {
    /// Energy window; `None` on either side uses the coefficient bound.
    pub omega_a: Option<f64>,
    pub omega_b: Option<f64>,
    /// Lower bound on the number of distinct peaks in the window.
    pub k_min: usize,
    pub delta_omega_override: Option<f64>,
}

impl Default for RescaleConfig {
    fn default() -> Self {
        Self { omega_a: None, omega_b: None, k_min: 4, delta_omega_override: None }
    }
}

/// Solver settings plus the pipeline's noise-to-τ policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnmMethod {
    pub solver: AnmConfig<f64>,
    /// Lower bound on τ when it is derived from the noise level.
    pub tau_floor: f64,
    /// Estimated poles with smaller amplitude magnitude are dropped.
    pub amplitude_floor: f64,
}

impl Default for AnmMethod {
    fn default() -> Self {
        Self {
            solver: AnmConfig::default().with_tol(1e-12).with_max_iters(1_000_000),
            tau_floor: 1e-4,
            amplitude_floor: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    pub anm: AnmMethod,
    pub dft: DftConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MitigationConfig {
    /// Samples used to estimate the damping; `None` disables mitigation.
    pub n_fit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into(), formats: vec!["json".into(), "csv".into()] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams<f64>,
    pub signal: SignalConfig,
    pub rescale: RescaleConfig,
    pub method: MethodConfig,
    pub mitigation: MitigationConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::new(4.0, 0.745),
            signal: SignalConfig::default(),
            rescale: RescaleConfig::default(),
            method: MethodConfig::default(),
            mitigation: MitigationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Replaces the sample-count spec with `t_max`.
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.signal.t_max = Some(t_max);
        self.signal.n = None;
        self
    }

    pub fn validate(&self) -> CliResult<()> {
        let s = &self.signal;
        match (s.t_max, s.n) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(CliError::Usage("signal needs exactly one of t_max or n".into()));
            }
            (Some(t), None) if !(t.is_finite() && t >= s.t0) => {
                return Err(CliError::Usage(format!("t_max {t} must be finite and at least t0")));
            }
            (None, Some(n)) if n < 2 => return Err(CliError::Usage("n must be at least 2".into())),
            _ => {}
        }
        if s.evolver == EvolverKind::Trotter2 && s.trotter_steps == 0 {
            return Err(CliError::Usage("trotter_steps must be at least 1".into()));
        }
        if s.shots == Some(0) {
            return Err(CliError::Usage("shots must be at least 1".into()));
        }
        if !(s.sigma >= 0.0) {
            return Err(CliError::Usage("sigma must be non-negative".into()));
        }
        if self.rescale.k_min < 2 && self.rescale.delta_omega_override.is_none() {
            return Err(CliError::Usage("k_min must be at least 2".into()));
        }
        if self.mitigation.n_fit == Some(0) {
            return Err(CliError::Usage("n_fit must be at least 1".into()));
        }
        if !(self.method.anm.tau_floor > 0.0) {
            return Err(CliError::Usage("tau_floor must be positive".into()));
        }
        Ok(())
    }
}
