use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multicast::ScaConfig;
use crate::scheme::{SystemParams, MAX_USERS};

/// Noise variance used by the harness; SNR is swept through `P_T`.
pub const NOISE: f64 = 1.0;

/// Scenario and sweep settings for one rate curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub l: usize,
    pub g: usize,
    pub t: usize,
    pub omega: usize,
    pub k_total: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub sca: ScaConfig,
}

impl ExperimentConfig {
    /// Config with `K_total = Ω` and the default SCA settings.
    pub fn new(l: usize, g: usize, t: usize, omega: usize, snr_db: Vec<f64>, trials: usize, base_seed: u64) -> Self {
        ExperimentConfig { l, g, t, omega, k_total: omega, snr_db, trials, base_seed, sca: ScaConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.snr_db.is_empty() {
            return fail("snr_db must not be empty".into());
        }
        if self.snr_db.iter().any(|v| !v.is_finite()) {
            return fail("snr_db entries must be finite".into());
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return fail("snr_db must be strictly increasing".into());
        }
        if self.trials == 0 {
            return fail("trials must be >= 1".into());
        }
        if self.k_total == 0 || self.k_total > MAX_USERS {
            return fail(format!("K_total must lie in [1, {MAX_USERS}], got {}", self.k_total));
        }
        if self.l == 0 || self.g == 0 {
            return fail("L and G must be >= 1".into());
        }
        if self.t >= self.k_total {
            return fail(format!("t must be < K_total, got t={} K_total={}", self.t, self.k_total));
        }
        let hi = self.k_total.min(self.t + self.l);
        if self.omega < self.t + 1 || self.omega > hi {
            return fail(format!("omega must lie in [{}, {hi}], got {}", self.t + 1, self.omega));
        }
        if !(self.sca.er_sca.is_finite() && self.sca.er_sca > 0.0) || self.sca.max_iter == 0 {
            return fail("er_sca must be positive and max_iter >= 1".into());
        }
        Ok(())
    }

    /// Scenario at one SNR point (`N0 = 1`, `P_T = 10^(snr/10)`).
    pub fn params_at(&self, snr_db: f64) -> Result<SystemParams> {
        SystemParams::new(self.k_total, self.l, self.g, self.t, NOISE, NOISE * 10f64.powf(snr_db / 10.0))
    }
}

fn default_trials() -> usize {
    100
}

fn default_er_sca() -> f64 {
    1e-4
}

fn default_max_iter() -> usize {
    200
}

fn default_restarts() -> usize {
    1
}

/// On-disk JSON form of an [`ExperimentConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "G")]
    pub g: usize,
    pub t: usize,
    pub omega: usize,
    /// Defaults to `omega`.
    #[serde(rename = "K_total", default)]
    pub k_total: Option<usize>,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_er_sca")]
    pub er_sca: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn into_experiment(self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            l: self.l,
            g: self.g,
            t: self.t,
            omega: self.omega,
            k_total: self.k_total.unwrap_or(self.omega),
            snr_db: self.snr_db,
            trials: self.trials,
            base_seed: self.seed,
            sca: ScaConfig {
                er_sca: self.er_sca,
                max_iter: self.max_iter,
                restarts: self.restarts.max(1),
                base_seed: self.seed,
                ..ScaConfig::default()
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
