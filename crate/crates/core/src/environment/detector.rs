use serde::{Deserialize, Serialize};

use crate::environment::{ExternalDetector, OracleDetector, DEFAULT_TIMEOUT_SECS};
use crate::error::{Error, Result};
use crate::imaging::RgbImage;
use crate::metrics::{Detection, GroundTruthBox};
use crate::registry::Registry;

/// What a detector sees for one image. `truths` and `image_key` are only
/// used by the oracle; an external detector receives the pixels alone.
#[derive(Debug, Clone, Copy)]
pub struct DetectRequest<'a> {
    pub image: &'a RgbImage,
    pub truths: &'a [GroundTruthBox],
    /// Stable identity of the underlying scene across degradations and steps.
    pub image_key: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutput {
    pub detections: Vec<Detection>,
    /// Context features, already reduced to 512 values.
    pub context: Vec<f64>,
}

impl DetectorOutput {
    /// Mean area of detections scoring at least `min_score`, if any.
    pub fn mean_area(&self, min_score: f64) -> Option<f64> {
        let areas: Vec<f64> = self
            .detections
            .iter()
            .filter(|d| d.score >= min_score)
            .map(|d| d.bbox.area())
            .collect();
        (!areas.is_empty()).then(|| areas.iter().sum::<f64>() / areas.len() as f64)
    }
}

/// A fixed, pre-trained object detector.
pub trait Detector: Send + Sync {
    fn name(&self) -> &str;

    fn detect(&self, request: &DetectRequest<'_>) -> Result<DetectorOutput>;
}

/// Operating bands of the oracle detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorCalibration {
    /// Brightness levels with `|L| <= bright_full_band` are detected at full quality.
    pub bright_full_band: f64,
    /// Quality reaches zero at `|L| = bright_zero_at`.
    pub bright_zero_at: f64,
    /// Box areas inside `[lo, hi]` are detected at full quality.
    pub area_full_band: [f64; 2],
    pub area_zero_below: f64,
    pub area_zero_above: f64,
    /// Corner jitter as a fraction of `sqrt(area)` at zero quality.
    pub jitter_coeff: f64,
    pub projection_seed: u64,
    /// Probability per image of one spurious low-score box. Zero by default.
    pub false_positive_rate: f64,
}

impl Default for DetectorCalibration {
    fn default() -> Self {
        Self {
            bright_full_band: 0.15,
            bright_zero_at: 0.9,
            area_full_band: [24.0 * 24.0, 128.0 * 128.0],
            area_zero_below: 6.0 * 6.0,
            area_zero_above: 640.0 * 640.0,
            jitter_coeff: 0.15,
            projection_seed: 0x005E_ED0F_C0DE,
            false_positive_rate: 0.0,
        }
    }
}

impl DetectorCalibration {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.area_full_band;
        let ok = 0.0 <= self.bright_full_band
            && self.bright_full_band < self.bright_zero_at
            && 0.0 < self.area_zero_below
            && self.area_zero_below < lo
            && lo < hi
            && hi < self.area_zero_above
            && self.jitter_coeff >= 0.0
            && (0.0..=1.0).contains(&self.false_positive_rate);
        if ok {
            Ok(())
        } else {
            Err(Error::Config("detector calibration bands must be nested and positive".into()))
        }
    }
}

/// Everything a detector factory may need.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub calibration: DetectorCalibration,
    /// `tcp://host:port`, or a command line to spawn and talk to over stdio.
    pub endpoint: Option<String>,
    /// Per-request timeout; defaults to 30 s.
    pub timeout_secs: Option<f64>,
}

pub type DetectorRegistry = Registry<dyn Detector, DetectorConfig>;

/// Registry with the built-in `oracle` and `external` detectors.
pub fn detector_registry() -> DetectorRegistry {
    let mut reg: DetectorRegistry = Registry::new("detector");
    reg.register("oracle", |cfg: &DetectorConfig| {
        Ok(Box::new(OracleDetector::new(cfg.calibration.clone())?))
    });
    reg.register("external", |cfg: &DetectorConfig| {
        let endpoint = cfg
            .endpoint
            .as_deref()
            .ok_or_else(|| Error::Config("external detector needs an endpoint".into()))?;
        let timeout = std::time::Duration::from_secs_f64(cfg.timeout_secs.unwrap_or(DEFAULT_TIMEOUT_SECS));
        Ok(Box::new(ExternalDetector::connect(endpoint, timeout)?))
    });
    reg
}
