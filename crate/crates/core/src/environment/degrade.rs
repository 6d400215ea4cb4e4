//! The four degradations used to build damaged training and test images.

use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::LabeledImage;
use crate::error::{Error, Result};
use crate::imaging::{
    estimate_brightness_level, fit_brightness_base, hsv_to_rgb, render_brightness, resize_bilinear,
    rgb_to_hsv, RgbImage,
};
use crate::metrics::GroundTruthBox;

/// Ranges magnitudes are drawn from when degrading a data set.
pub const EXPOSURE_SAMPLE_RANGE: RangeInclusive<f64> = 0.4..=0.8;
pub const ZOOM_OUT_SAMPLE_RANGE: RangeInclusive<f64> = (1.0 / 6.0)..=(1.0 / 3.0);
pub const ZOOM_IN_SAMPLE_RANGE: RangeInclusive<f64> = 2.0..=4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradeKind {
    OverExpose,
    UnderExpose,
    ZoomOutDegrade,
    ZoomInDegrade,
}

impl DegradeKind {
    pub const ALL: [Self; 4] = [
        Self::OverExpose,
        Self::UnderExpose,
        Self::ZoomOutDegrade,
        Self::ZoomInDegrade,
    ];

    pub fn is_exposure(self) -> bool {
        matches!(self, Self::OverExpose | Self::UnderExpose)
    }

    pub fn sample_range(self) -> RangeInclusive<f64> {
        match self {
            Self::OverExpose | Self::UnderExpose => EXPOSURE_SAMPLE_RANGE,
            Self::ZoomOutDegrade => ZOOM_OUT_SAMPLE_RANGE,
            Self::ZoomInDegrade => ZOOM_IN_SAMPLE_RANGE,
        }
    }

    /// Magnitudes `degrade` accepts. Wider than the sampling range so that
    /// identity and mild degradations stay expressible.
    fn accepted(self, magnitude: f64) -> bool {
        match self {
            Self::OverExpose | Self::UnderExpose => (0.0..=1.0).contains(&magnitude),
            Self::ZoomOutDegrade => magnitude > 0.0 && magnitude <= 1.0,
            Self::ZoomInDegrade => (1.0..=8.0).contains(&magnitude),
        }
    }
}

impl fmt::Display for DegradeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OverExpose => "over_expose",
            Self::UnderExpose => "under_expose",
            Self::ZoomOutDegrade => "zoom_out",
            Self::ZoomInDegrade => "zoom_in",
        })
    }
}

impl std::str::FromStr for DegradeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "over_expose" | "over" => Ok(Self::OverExpose),
            "under_expose" | "under" => Ok(Self::UnderExpose),
            "zoom_out" => Ok(Self::ZoomOutDegrade),
            "zoom_in" => Ok(Self::ZoomInDegrade),
            other => Err(Error::Config(format!("unknown degradation '{other}'"))),
        }
    }
}

/// Exposure magnitudes shift the brightness level by `+-magnitude`; zoom
/// magnitudes are linear resize factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradeOp {
    pub kind: DegradeKind,
    pub magnitude: f64,
}

impl DegradeOp {
    pub fn new(kind: DegradeKind, magnitude: f64) -> Result<Self> {
        if !magnitude.is_finite() || !kind.accepted(magnitude) {
            return Err(Error::input(format!("magnitude {magnitude} out of range for {kind}")));
        }
        Ok(Self { kind, magnitude })
    }
}

/// Draws a degradation of `kind` with a magnitude from its sampling range.
pub fn sample_degradation(kind: DegradeKind, rng: &mut impl Rng) -> DegradeOp {
    DegradeOp {
        kind,
        magnitude: rng.gen_range(kind.sample_range()),
    }
}

/// Applies `op` to an image and its truths.
pub fn degrade(image: &RgbImage, truths: &[GroundTruthBox], op: DegradeOp) -> Result<(RgbImage, Vec<GroundTruthBox>)> {
    let op = DegradeOp::new(op.kind, op.magnitude)?;
    match op.kind {
        DegradeKind::OverExpose | DegradeKind::UnderExpose => {
            let hsv = rgb_to_hsv(image);
            let level = estimate_brightness_level(&hsv.value);
            let model = fit_brightness_base(&hsv.value, level);
            let sign = if op.kind == DegradeKind::OverExpose { 1.0 } else { -1.0 };
            let target = (level + sign * op.magnitude).clamp(-1.0, 1.0);
            let rendered = hsv.with_value(render_brightness(&model, target))?;
            Ok((hsv_to_rgb(&rendered), truths.to_vec()))
        }
        DegradeKind::ZoomOutDegrade | DegradeKind::ZoomInDegrade => {
            let out = resize_bilinear(image, op.magnitude);
            let sx = out.width() as f64 / image.width() as f64;
            let sy = out.height() as f64 / image.height() as f64;
            let mapped = truths
                .iter()
                .map(|t| GroundTruthBox {
                    bbox: t.bbox.scaled(sx, sy),
                    category: t.category,
                })
                .collect();
            Ok((out, mapped))
        }
    }
}

pub fn degrade_labeled(input: &LabeledImage, op: DegradeOp) -> Result<LabeledImage> {
    let (image, truths) = degrade(&input.image, &input.truths, op)?;
    Ok(LabeledImage {
        key: input.key,
        image,
        truths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Box2D;

    #[test]
    fn magnitude_validation() {
        assert!(DegradeOp::new(DegradeKind::OverExpose, 1.5).is_err());
        assert!(DegradeOp::new(DegradeKind::ZoomInDegrade, 0.5).is_err());
        assert!(DegradeOp::new(DegradeKind::ZoomOutDegrade, 0.0).is_err());
        assert!(DegradeOp::new(DegradeKind::UnderExpose, f64::NAN).is_err());
        assert!(DegradeOp::new(DegradeKind::UnderExpose, 0.8).is_ok());
        let img = RgbImage::filled(8, 8, [100; 3]);
        let bad = DegradeOp { kind: DegradeKind::ZoomInDegrade, magnitude: 20.0 };
        assert!(degrade(&img, &[], bad).is_err());
    }

    #[test]
    fn zoom_scales_boxes() {
        let img = RgbImage::filled(64, 64, [100; 3]);
        let truths = [GroundTruthBox::new(Box2D::new(8.0, 8.0, 40.0, 24.0).unwrap())];
        let op = DegradeOp::new(DegradeKind::ZoomOutDegrade, 0.25).unwrap();
        let (out, mapped) = degrade(&img, &truths, op).unwrap();
        assert_eq!((out.width(), out.height()), (16, 16));
        assert!((mapped[0].bbox.area() - truths[0].bbox.area() / 16.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_magnitudes_in_range() {
        let mut rng = rand::rngs::mock::StepRng::new(0, u64::MAX / 7);
        for kind in DegradeKind::ALL {
            for _ in 0..20 {
                let op = sample_degradation(kind, &mut rng);
                assert!(kind.sample_range().contains(&op.magnitude));
            }
        }
    }

    #[test]
    fn names_parse() {
        for kind in DegradeKind::ALL {
            assert_eq!(kind.to_string().parse::<DegradeKind>().unwrap(), kind);
        }
    }
}
