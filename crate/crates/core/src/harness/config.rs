//! Experiment configuration: a flat key-value TOML file with fail-fast
//! rejection of unknown keys. Field semantics and units are documented in
//! `docs/config-schema.md`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{HarnessError, HarnessResult};
use crate::filter::UpdateMode;
use crate::signal::{ArModel, NoncircularGaussianSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// Zero-initialized weights (matches the learning-curve derivation).
    #[default]
    Zero,
    /// Weights drawn per trial from a circular Gaussian.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKey {
    Full,
    Sequential,
    Stochastic,
}

impl From<ModeKey> for UpdateMode {
    fn from(value: ModeKey) -> Self {
        match value {
            ModeKey::Full => UpdateMode::Full,
            ModeKey::Sequential => UpdateMode::Sequential,
            ModeKey::Stochastic => UpdateMode::Stochastic,
        }
    }
}

/// All experiment knobs. Defaults reproduce the reference setup: length-8
/// filter, sequential full-coefficient update, μ = 0.02, 100 trials, the
/// AR(0.3, 0.1) input with unit-variance innovations of complementary
/// variance 0.9, and measurement-noise variance 0.01.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Filter length N.
    pub n: usize,
    /// Coefficients updated per iteration M (must divide N).
    pub m: usize,
    /// Update scheme: full | sequential | stochastic.
    pub mode: ModeKey,
    /// Step size μ.
    pub mu: f64,
    /// Independent Monte-Carlo trials.
    pub trials: usize,
    /// Iterations per trial.
    pub horizon: usize,
    /// Master seed; all per-trial streams derive from it.
    pub seed: u64,
    /// Measurement-noise variance σ_υ².
    pub sigma_v2: f64,
    /// AR coefficient on u(n).
    pub ar_a: f64,
    /// AR coefficient on u*(n).
    pub ar_b: f64,
    /// AR innovation variance σ_q².
    pub noise_var: f64,
    /// AR innovation complementary variance σ̃_q² (real-valued in config).
    pub noise_cvar: f64,
    /// Weight initialization: zero | random.
    pub init: InitMode,
    /// Fraction of final iterations averaged for the steady-state summary.
    pub steady_frac: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 8,
            m: 8,
            mode: ModeKey::Sequential,
            mu: 0.02,
            trials: 100,
            horizon: 20_000,
            seed: 0x1CE_B00DA,
            sigma_v2: 0.01,
            ar_a: 0.3,
            ar_b: 0.1,
            noise_var: 1.0,
            noise_cvar: 0.9,
            init: InitMode::Zero,
            steady_frac: 0.1,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> HarnessResult<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config '{}': {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> HarnessResult<()> {
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        if self.horizon < 1 {
            return Err(HarnessError::Config("horizon must be >= 1".into()));
        }
        if !(self.steady_frac > 0.0 && self.steady_frac <= 0.5) {
            return Err(HarnessError::Config(
                "steady_frac must lie in (0, 0.5]".into(),
            ));
        }
        if self.mu < 0.0 {
            return Err(HarnessError::Config("mu must be nonnegative".into()));
        }
        if self.n == 0 || self.m == 0 || self.m > self.n || self.n % self.m != 0 {
            return Err(HarnessError::Config(format!(
                "selection count m={} must divide filter length n={}",
                self.m, self.n
            )));
        }
        if self.sigma_v2 < 0.0 || self.noise_var < 0.0 {
            return Err(HarnessError::Config("variances must be nonnegative".into()));
        }
        self.input_noise_spec()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn update_mode(&self) -> UpdateMode {
        self.mode.into()
    }

    pub fn input_noise_spec(&self) -> Result<NoncircularGaussianSpec, crate::signal::SignalError> {
        NoncircularGaussianSpec::new(self.noise_var, Complex64::new(self.noise_cvar, 0.0))
    }

    pub fn ar_model(&self) -> ArModel {
        ArModel {
            a: self.ar_a,
            b: self.ar_b,
            noise: self
                .input_noise_spec()
                .expect("validated config has a valid noise spec"),
        }
    }
}
