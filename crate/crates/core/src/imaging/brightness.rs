//! Brightness level `L^b` and the per-image base component `V_base`.
//!
//! `V` is decomposed as `(1 + L) * base` for `L < 0` and
//! `(1 - L) * base + 255 * L` for `L >= 0`. The level of an unseen image is
//! estimated from eleven quantiles of its V channel, then the base is
//! recovered by inverting the decomposition at that level.

use crate::error::{Error, Result};
use crate::imaging::{ActionFamily, AttributeAction, Plane, RgbImage};

/// Quantile pairs `(p_q, p_{1-q})` each sum to roughly `d`, and the median is
/// roughly `d / 2`, so the eleven quantiles sum to about `5.5 * d`.
pub const QUANTILE_SUM_DIVISOR: f64 = 5.5;

/// Levels are clamped to this magnitude before the decomposition is inverted.
pub const FIT_LEVEL_LIMIT: f64 = 0.98;

const QUANTILE_COUNT: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessModel {
    pub level: f64,
    pub base: Plane,
}

fn quantile_probs() -> impl Iterator<Item = f64> {
    (0..QUANTILE_COUNT).map(|i| i as f64 / 10.0)
}

/// The quantiles `p_0, p_0.1, ..., p_1` with linear interpolation between
/// order statistics.
pub fn brightness_quantiles(values: &[f64]) -> [f64; QUANTILE_COUNT] {
    assert!(!values.is_empty(), "quantiles of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out = [0.0; QUANTILE_COUNT];
    for (slot, q) in out.iter_mut().zip(quantile_probs()) {
        let pos = q * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        *slot = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }
    out
}

/// Same quantiles as [`brightness_quantiles`], computed from a histogram of
/// integer values `0..=255` without sorting.
pub fn quantiles_from_counts(counts: &[u64; 256]) -> [f64; QUANTILE_COUNT] {
    let n: u64 = counts.iter().sum();
    assert!(n > 0, "quantiles of an empty histogram");
    // value of the k-th order statistic (0-based)
    let order_stat = |k: u64| -> f64 {
        let mut seen = 0;
        for (value, &c) in counts.iter().enumerate() {
            seen += c;
            if seen > k {
                return value as f64;
            }
        }
        255.0
    };
    let mut out = [0.0; QUANTILE_COUNT];
    for (slot, q) in out.iter_mut().zip(quantile_probs()) {
        let pos = q * (n - 1) as f64;
        let lo = pos.floor() as u64;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        let (a, b) = (order_stat(lo), order_stat(hi));
        *slot = a + frac * (b - a);
    }
    out
}

fn level_from_quantiles(q: &[f64; QUANTILE_COUNT]) -> f64 {
    let d = q.iter().sum::<f64>() / QUANTILE_SUM_DIVISOR;
    (d / 255.0 - 1.0).clamp(-1.0, 1.0)
}

pub fn estimate_brightness_level(v: &Plane) -> f64 {
    level_from_quantiles(&brightness_quantiles(v.values()))
}

/// Level estimate straight from an 8-bit image (its V channel is integral).
pub fn estimate_brightness_level_rgb(img: &RgbImage) -> f64 {
    let mut counts = [0u64; 256];
    for [r, g, b] in img.pixels() {
        counts[usize::from(r.max(g).max(b))] += 1;
    }
    level_from_quantiles(&quantiles_from_counts(&counts))
}

/// Inverts the decomposition at `level` to recover the base component.
pub fn fit_brightness_base(v: &Plane, level: f64) -> BrightnessModel {
    let level = level.clamp(-FIT_LEVEL_LIMIT, FIT_LEVEL_LIMIT);
    let base = if level < 0.0 {
        v.map(|x| (x / (1.0 + level)).clamp(0.0, 255.0))
    } else {
        v.map(|x| ((x - 255.0 * level) / (1.0 - level)).clamp(0.0, 255.0))
    };
    BrightnessModel { level, base }
}

pub fn render_brightness(model: &BrightnessModel, level: f64) -> Plane {
    let level = level.clamp(-1.0, 1.0);
    if level < 0.0 {
        model.base.map(|b| ((1.0 + level) * b).clamp(0.0, 255.0))
    } else {
        model.base.map(|b| ((1.0 - level) * b + 255.0 * level).clamp(0.0, 255.0))
    }
}

/// One brightness action: a contraction by 0.9 towards +1 or -1.
pub fn update_brightness_level(level: f64, action: AttributeAction) -> Result<f64> {
    if action.family() != ActionFamily::Brightness {
        return Err(Error::contract(format!("{action} is not a brightness action")));
    }
    Ok((0.9 * level + 0.1 * action.target()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::AttributeAction::*;

    fn uniform_plane() -> Plane {
        // every integer 0..=255 four times
        Plane::new(32, 32, (0..1024).map(|i| f64::from(i % 256)).collect()).unwrap()
    }

    #[test]
    fn uniform_is_level_zero() {
        assert!(estimate_brightness_level(&uniform_plane()).abs() <= 0.02);
    }

    #[test]
    fn all_zero_is_minus_one() {
        assert_eq!(estimate_brightness_level(&Plane::filled(4, 4, 0.0)), -1.0);
    }

    #[test]
    fn half_scaled_uniform_is_minus_half() {
        let v = uniform_plane().map(|x| 0.5 * x);
        let q = brightness_quantiles(v.values());
        // brute-force: sum of quantiles of the halved sample
        let oracle: f64 = q.iter().sum::<f64>() / 5.5 / 255.0 - 1.0;
        let est = estimate_brightness_level(&v);
        assert_eq!(est, oracle);
        assert!((est + 0.5).abs() <= 0.02, "{est}");
    }

    #[test]
    fn quantiles_match_hand_values() {
        let q = brightness_quantiles(&[4.0, 0.0, 2.0, 1.0, 3.0]);
        // positions 0.0, 0.4, 0.8, ... over sorted [0,1,2,3,4]
        let expected = [0.0, 0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.8, 3.2, 3.6, 4.0];
        for (a, b) in q.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_quantiles_equal_sorting() {
        let values: Vec<u8> = (0..997u32).map(|i| ((i * 7919) % 251) as u8).collect();
        let mut counts = [0u64; 256];
        values.iter().for_each(|&v| counts[usize::from(v)] += 1);
        let as_f: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        assert_eq!(quantiles_from_counts(&counts), brightness_quantiles(&as_f));
    }

    #[test]
    fn fit_examples() {
        let v = Plane::filled(2, 2, 77.0);
        assert_eq!(fit_brightness_base(&v, 0.0).base, v);
        let dark = fit_brightness_base(&Plane::filled(2, 2, 50.0), -0.5);
        assert!(dark.base.values().iter().all(|&b| (b - 100.0).abs() < 1e-12));
        let bright = fit_brightness_base(&Plane::filled(2, 2, 177.5), 0.5);
        assert!(bright.base.values().iter().all(|&b| (b - 100.0).abs() < 1e-12));
    }

    #[test]
    fn fit_clamps_extreme_level() {
        let model = fit_brightness_base(&Plane::filled(1, 1, 10.0), -1.0);
        assert_eq!(model.level, -FIT_LEVEL_LIMIT);
        assert!(model.base.values()[0].is_finite());
    }

    #[test]
    fn render_examples() {
        let model = BrightnessModel {
            level: 0.0,
            base: Plane::filled(2, 2, 100.0),
        };
        assert!(render_brightness(&model, -0.5).values().iter().all(|&v| v == 50.0));
        assert_eq!(render_brightness(&model, 0.0), model.base);
        assert!(render_brightness(&model, 0.5).values().iter().all(|&v| v == 177.5));
    }

    #[test]
    fn update_examples() {
        assert!((update_brightness_level(0.0, Brighten).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(update_brightness_level(1.0, Brighten).unwrap(), 1.0);
        assert!((update_brightness_level(-0.8, Darken).unwrap() + 0.82).abs() < 1e-15);
        assert!(matches!(
            update_brightness_level(0.0, ZoomIn),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn brighten_then_darken() {
        for l in [-1.0, -0.3, 0.0, 0.42, 1.0] {
            let up = update_brightness_level(l, Brighten).unwrap();
            let back = update_brightness_level(up, Darken).unwrap();
            assert!((back - (0.81 * l - 0.01)).abs() < 1e-15);
        }
    }
}
