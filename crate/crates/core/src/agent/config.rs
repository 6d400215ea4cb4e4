use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Double DQN training settings. Defaults are the desk-scale values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the run over which epsilon decays linearly.
    pub epsilon_decay_fraction: f64,
    pub batch_size: usize,
    pub target_sync_every: usize,
    pub buffer_capacity: usize,
    pub brightness_iterations: usize,
    pub scale_iterations: usize,
    pub hidden_width: usize,
    pub learning_rate: f64,
    /// Episode length during training.
    pub horizon: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            epsilon_start: 1.0,
            epsilon_end: 0.1,
            epsilon_decay_fraction: 0.2,
            batch_size: 32,
            target_sync_every: 500,
            buffer_capacity: 50_000,
            brightness_iterations: 20_000,
            scale_iterations: 10_000,
            hidden_width: 128,
            learning_rate: 1e-3,
            horizon: 4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Iteration counts and width used for the full-size agents.
    pub fn full_scale() -> Self {
        Self {
            brightness_iterations: 120_000,
            scale_iterations: 40_000,
            hidden_width: 512,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(format!("train config: {m}")));
        if !(0.0..1.0).contains(&self.gamma) {
            return fail("gamma must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.epsilon_start) || !(0.0..=1.0).contains(&self.epsilon_end) {
            return fail("epsilon must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.epsilon_decay_fraction) {
            return fail("epsilon decay fraction must lie in [0, 1]");
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return fail("buffer must hold at least one batch");
        }
        if self.target_sync_every == 0 || self.hidden_width == 0 || self.horizon == 0 {
            return fail("sync period, hidden width and horizon must be positive");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return fail("learning rate must be positive");
        }
        Ok(())
    }
}

/// Linear decay from `epsilon_start` to `epsilon_end` over the first
/// `epsilon_decay_fraction` of `total` iterations, constant afterwards.
pub fn epsilon_at(cfg: &TrainConfig, iteration: usize, total: usize) -> f64 {
    let span = cfg.epsilon_decay_fraction * total as f64;
    let t = iteration as f64 / span;
    if span <= 0.0 || t >= 1.0 {
        return cfg.epsilon_end;
    }
    cfg.epsilon_start + t * (cfg.epsilon_end - cfg.epsilon_start)
}
