//! Deterministic stand-in for a detector trained on clean imagery.
//!
//! Per-object quality `q = q_bright * q_area` falls off as the global
//! brightness level leaves `[-0.15, 0.15]` or the object's area leaves
//! `[24^2, 128^2]`. An object is reported when `q` reaches its hashed
//! threshold in `[0.05, 0.95]`; its box corners drift by up to
//! `(1 - q) * jitter * sqrt(area)` and its score is `q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::{DetectRequest, Detector, DetectorCalibration, DetectorOutput};
use crate::error::Result;
use crate::features::CONTEXT_DIM;
use crate::imaging::{estimate_brightness_level_rgb, RgbImage};
use crate::metrics::{Box2D, Detection};
use crate::util::{hash_words, unit_from_hash};

const THUMB_SIDE: usize = 16;
const THUMB_LEN: usize = THUMB_SIDE * THUMB_SIDE;

pub struct OracleDetector {
    calib: DetectorCalibration,
    /// `CONTEXT_DIM x THUMB_LEN`, entries `+-1/16`.
    projection: Vec<f64>,
}

impl OracleDetector {
    pub fn new(calib: DetectorCalibration) -> Result<Self> {
        calib.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(calib.projection_seed);
        let mag = 1.0 / (THUMB_LEN as f64).sqrt();
        let projection = (0..CONTEXT_DIM * THUMB_LEN)
            .map(|_| if rng.gen_bool(0.5) { mag } else { -mag })
            .collect();
        Ok(Self { calib, projection })
    }

    pub fn calibration(&self) -> &DetectorCalibration {
        &self.calib
    }

    pub fn brightness_quality(&self, level: f64) -> f64 {
        let c = &self.calib;
        let excess = (level.abs() - c.bright_full_band).max(0.0);
        (1.0 - excess / (c.bright_zero_at - c.bright_full_band)).clamp(0.0, 1.0)
    }

    /// 1 inside the full band, log-linear decay to 0 at the zero bounds.
    pub fn area_quality(&self, area: f64) -> f64 {
        let c = &self.calib;
        let [lo, hi] = c.area_full_band;
        if area <= 0.0 {
            return 0.0;
        }
        let q = if area < lo {
            (area.ln() - c.area_zero_below.ln()) / (lo.ln() - c.area_zero_below.ln())
        } else if area > hi {
            (c.area_zero_above.ln() - area.ln()) / (c.area_zero_above.ln() - hi.ln())
        } else {
            1.0
        };
        q.clamp(0.0, 1.0)
    }

    fn context(&self, img: &RgbImage) -> Vec<f64> {
        // block-average V thumbnail in [-0.5, 0.5]; centring on mid-gray keeps
        // a constant offset out of the agents' first layer
        let mut sums = [0.0f64; THUMB_LEN];
        let mut counts = [0u32; THUMB_LEN];
        let (w, h) = (img.width(), img.height());
        for y in 0..h {
            let ty = y * THUMB_SIDE / h;
            for x in 0..w {
                let tx = x * THUMB_SIDE / w;
                let [r, g, b] = img.pixel(x, y);
                sums[ty * THUMB_SIDE + tx] += f64::from(r.max(g).max(b));
                counts[ty * THUMB_SIDE + tx] += 1;
            }
        }
        let thumb: Vec<f64> = sums
            .iter()
            .zip(counts)
            .map(|(s, c)| if c > 0 { s / f64::from(c) / 255.0 - 0.5 } else { 0.0 })
            .collect();
        self.projection
            .chunks_exact(THUMB_LEN)
            .map(|row| row.iter().zip(&thumb).map(|(p, t)| p * t).sum())
            .collect()
    }

    fn spurious(&self, request: &DetectRequest<'_>) -> Option<Detection> {
        let c = &self.calib;
        let h = |tag: u64| unit_from_hash(hash_words(&[c.projection_seed, request.image_key, u64::MAX, tag]));
        if c.false_positive_rate <= 0.0 || h(0) >= c.false_positive_rate {
            return None;
        }
        let (w, ht) = (request.image.width() as f64, request.image.height() as f64);
        let side = 0.15 * w.min(ht);
        let x = h(1) * (w - side);
        let y = h(2) * (ht - side);
        let bbox = Box2D::new(x, y, x + side, y + side).ok()?;
        Some(Detection::new(bbox, 0.3 * h(3)))
    }
}

impl Detector for OracleDetector {
    fn name(&self) -> &str {
        "oracle"
    }

    fn detect(&self, request: &DetectRequest<'_>) -> Result<DetectorOutput> {
        let c = &self.calib;
        let img = request.image;
        let (w, h) = (img.width() as f64, img.height() as f64);
        let q_bright = self.brightness_quality(estimate_brightness_level_rgb(img));
        let mut detections = Vec::new();
        for (i, truth) in request.truths.iter().enumerate() {
            let area = truth.bbox.area();
            let q = q_bright * self.area_quality(area);
            let object = |tag: u64| {
                unit_from_hash(hash_words(&[c.projection_seed, request.image_key, i as u64, tag]))
            };
            let threshold = 0.05 + 0.9 * object(0);
            if q <= 0.0 || q < threshold {
                continue;
            }
            let mag = (1.0 - q) * c.jitter_coeff * area.sqrt();
            let shift = |k: u64| mag * (2.0 * object(k) - 1.0);
            let b = &truth.bbox;
            let jittered = Box2D::new(
                (b.x_min + shift(1)).clamp(0.0, w),
                (b.y_min + shift(2)).clamp(0.0, h),
                (b.x_max + shift(3)).clamp(0.0, w),
                (b.y_max + shift(4)).clamp(0.0, h),
            );
            if let Ok(bbox) = jittered {
                detections.push(Detection {
                    bbox,
                    score: q,
                    category: truth.category,
                });
            }
        }
        detections.extend(self.spurious(request));
        Ok(DetectorOutput {
            detections,
            context: self.context(img),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle() -> OracleDetector {
        OracleDetector::new(DetectorCalibration::default()).unwrap()
    }

    #[test]
    fn quality_bands() {
        let o = oracle();
        assert_eq!(o.brightness_quality(0.1), 1.0);
        assert_eq!(o.brightness_quality(-0.15), 1.0);
        assert!((o.brightness_quality(0.525) - 0.5).abs() < 1e-12);
        assert_eq!(o.brightness_quality(0.9), 0.0);
        assert_eq!(o.brightness_quality(-1.0), 0.0);
        assert_eq!(o.area_quality(50.0 * 50.0), 1.0);
        assert_eq!(o.area_quality(36.0), 0.0);
        assert_eq!(o.area_quality(640.0 * 640.0), 0.0);
        assert!((o.area_quality(12.0 * 12.0) - 0.5).abs() < 1e-12);
        assert!((o.area_quality(5.0 * 5.0)).abs() < 1e-12);
    }

    #[test]
    fn context_is_512_and_deterministic() {
        let o = oracle();
        let img = RgbImage::filled(40, 30, [90, 120, 60]);
        let a = o.context(&img);
        assert_eq!(a.len(), 512);
        assert_eq!(a, o.context(&img));
        assert!(a.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn context_is_centred_on_mid_gray() {
        let o = oracle();
        let mid = o.context(&RgbImage::filled(32, 32, [128; 3]));
        assert!(mid.iter().all(|v| v.abs() < 0.02), "{:?}", &mid[..4]);
        let dark = o.context(&RgbImage::filled(32, 32, [0; 3]));
        let bright = o.context(&RgbImage::filled(32, 32, [255; 3]));
        for (d, b) in dark.iter().zip(&bright) {
            assert!((d + b).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_calibration_rejected() {
        let calib = DetectorCalibration { bright_zero_at: 0.1, ..Default::default() };
        assert!(OracleDetector::new(calib).is_err());
    }
}
