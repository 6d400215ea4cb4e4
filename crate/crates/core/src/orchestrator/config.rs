use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agent::TrainConfig;
use crate::environment::{detector_registry, DetectorConfig, Environment, SceneParams};
use crate::error::{Error, Result};
use crate::imaging::scale_step_rules;

/// One column of the evaluation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvalMode {
    /// Detector only.
    #[serde(rename = "FR")]
    Fr,
    /// Brightness agent, two steps.
    #[serde(rename = "B2")]
    B2,
    /// Both agents, two steps.
    #[serde(rename = "BS2")]
    Bs2,
    #[serde(rename = "B4")]
    B4,
    #[serde(rename = "BS4")]
    Bs4,
    /// Both agents, four steps, clean inputs only.
    #[serde(rename = "BS4*")]
    BsStar,
    /// Detector only on clean inputs.
    #[serde(rename = "FR*")]
    FrStar,
}

impl EvalMode {
    pub const ALL: [Self; 7] = [Self::Fr, Self::B2, Self::Bs2, Self::B4, Self::Bs4, Self::BsStar, Self::FrStar];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fr => "FR",
            Self::B2 => "B2",
            Self::Bs2 => "BS2",
            Self::B4 => "B4",
            Self::Bs4 => "BS4",
            Self::BsStar => "BS4*",
            Self::FrStar => "FR*",
        }
    }

    /// Number of agent steps; 0 for detector-only modes.
    pub fn horizon(self) -> usize {
        match self {
            Self::Fr | Self::FrStar => 0,
            Self::B2 | Self::Bs2 => 2,
            Self::B4 | Self::Bs4 | Self::BsStar => 4,
        }
    }

    pub fn uses_scale_agent(self) -> bool {
        matches!(self, Self::Bs2 | Self::Bs4 | Self::BsStar)
    }

    pub fn uses_agents(self) -> bool {
        self.horizon() > 0
    }

    pub fn clean_only(self) -> bool {
        matches!(self, Self::BsStar | Self::FrStar)
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(t))
            .or(match t.to_ascii_lowercase().as_str() {
                "bsstar" => Some(Self::BsStar),
                "frstar" => Some(Self::FrStar),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown evaluation mode '{s}'")))
    }
}

/// Parses a comma-separated mode list such as `FR,B2,BS4`.
pub fn parse_modes(list: &str) -> Result<Vec<EvalMode>> {
    let mut modes = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let m: EvalMode = part.parse()?;
        if !modes.contains(&m) {
            modes.push(m);
        }
    }
    if modes.is_empty() {
        return Err(Error::Config("no evaluation modes given".into()));
    }
    Ok(modes)
}

/// Everything a train, run or evaluate invocation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Input dataset; scenes are generated from `seed` when absent.
    pub dataset: Option<PathBuf>,
    pub weights_dir: PathBuf,
    pub reports_dir: PathBuf,
    pub detector: String,
    pub detector_config: DetectorConfig,
    pub scale_rule: String,
    /// Inference horizon for `run`.
    pub horizon: usize,
    pub modes: Vec<EvalMode>,
    pub seed: u64,
    pub scene: SceneParams,
    pub train_scenes: usize,
    pub test_scenes: usize,
    /// Share of training episodes started from a degraded image.
    pub degrade_fraction: f64,
    /// Checkpoint period in iterations; 0 saves only the final weights.
    pub checkpoint_every: usize,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            weights_dir: PathBuf::from("weights"),
            reports_dir: PathBuf::from("reports"),
            detector: "oracle".into(),
            detector_config: DetectorConfig::default(),
            scale_rule: "delta".into(),
            horizon: 4,
            modes: vec![EvalMode::Fr, EvalMode::B2, EvalMode::Bs2, EvalMode::B4, EvalMode::Bs4],
            seed: 0,
            scene: SceneParams::default(),
            train_scenes: 300,
            test_scenes: 300,
            degrade_fraction: 0.8,
            checkpoint_every: 0,
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.degrade_fraction) {
            return Err(Error::Config("degrade_fraction must lie in [0, 1]".into()));
        }
        if !scale_step_rules().contains(&self.scale_rule) {
            return Err(Error::Config(format!("unknown scale rule '{}'", self.scale_rule)));
        }
        if !detector_registry().contains(&self.detector) {
            return Err(Error::Config(format!("unknown detector '{}'", self.detector)));
        }
        self.scene.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.detector_config
            .calibration
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.train.validate()
    }

    /// Builds the environment from the configured detector and scale rule.
    pub fn environment(&self) -> Result<Environment> {
        let detector = detector_registry().create(&self.detector, &self.detector_config)?;
        let rule = scale_step_rules().create(&self.scale_rule, &())?;
        Ok(Environment::new(detector, rule))
    }
}
