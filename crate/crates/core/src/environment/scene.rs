//! Synthetic scenes: a value-noise ground texture around mid-gray with
//! bright, cross-shaped "aircraft" blobs and tight ground-truth boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::environment::LabeledImage;
use crate::error::{Error, Result};
use crate::imaging::{estimate_brightness_level_rgb, RgbImage};
use crate::metrics::{Box2D, GroundTruthBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub min_objects: usize,
    pub max_objects: usize,
    /// Object box area range in pixels^2.
    pub min_area: f64,
    pub max_area: f64,
    /// Probability of a scene with no objects at all.
    pub empty_fraction: f64,
    pub background_mean: f64,
    pub background_amplitude: f64,
    pub pixel_noise: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 192,
            height: 192,
            min_objects: 0,
            max_objects: 8,
            min_area: 36.0 * 36.0,
            max_area: 72.0 * 72.0,
            empty_fraction: 0.1,
            background_mean: 116.0,
            background_amplitude: 36.0,
            pixel_noise: 10.0,
        }
    }
}

impl SceneParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(format!("scene params: {m}")));
        if self.width < 16 || self.height < 16 {
            return fail("image must be at least 16x16");
        }
        if self.min_objects > self.max_objects || self.max_objects > 8 {
            return fail("object count range must lie within [0, 8]");
        }
        if !(12.0 * 12.0 <= self.min_area && self.min_area <= self.max_area && self.max_area <= 200.0 * 200.0) {
            return fail("area range must lie within [12^2, 200^2]");
        }
        if !(0.0..=1.0).contains(&self.empty_fraction) {
            return fail("empty fraction must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: RgbImage,
    pub truths: Vec<GroundTruthBox>,
    pub seed: u64,
    /// Estimated brightness level of the clean image.
    pub nominal_level_b: f64,
    /// Mean ground-truth box area, or 0 for an empty scene.
    pub nominal_mean_area: f64,
}

impl Scene {
    pub fn labeled(&self) -> LabeledImage {
        LabeledImage {
            key: self.seed,
            image: self.image.clone(),
            truths: self.truths.clone(),
        }
    }
}

const NOISE_CELL: usize = 32;

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn background(params: &SceneParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gw = params.width / NOISE_CELL + 2;
    let gh = params.height / NOISE_CELL + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut gray = Vec::with_capacity(params.width * params.height);
    for y in 0..params.height {
        let fy = y as f64 / NOISE_CELL as f64;
        let (cy, ty) = (fy.floor() as usize, smoothstep(fy.fract()));
        for x in 0..params.width {
            let fx = x as f64 / NOISE_CELL as f64;
            let (cx, tx) = (fx.floor() as usize, smoothstep(fx.fract()));
            let at = |i: usize, j: usize| grid[j * gw + i];
            let top = at(cx, cy) + tx * (at(cx + 1, cy) - at(cx, cy));
            let bottom = at(cx, cy + 1) + tx * (at(cx + 1, cy + 1) - at(cx, cy + 1));
            let n = top + ty * (bottom - top);
            let jitter = rng.gen_range(-params.pixel_noise..=params.pixel_noise);
            gray.push(params.background_mean + params.background_amplitude * n + jitter);
        }
    }
    gray
}

/// A cross of two filled ellipses (fuselage and wings) inside `w x h` at
/// `(x0, y0)`. Returns the tight pixel box, or `None` if nothing was drawn.
fn draw_aircraft(
    img: &mut RgbImage,
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Box2D> {
    let vertical = rng.gen_bool(0.5);
    let (cx, cy) = (x0 as f64 + w as f64 / 2.0, y0 as f64 + h as f64 / 2.0);
    // (semi-axis x, semi-axis y, centre offset along the body)
    let (fuselage, wings) = if vertical {
        ((w as f64 * 0.12, h as f64 / 2.0), (w as f64 / 2.0, h as f64 * 0.14))
    } else {
        ((w as f64 / 2.0, h as f64 * 0.12), (w as f64 * 0.14, h as f64 / 2.0))
    };
    let wing_shift = if vertical { (0.0, -0.08 * h as f64) } else { (-0.08 * w as f64, 0.0) };
    let shade = rng.gen_range(215.0..240.0);
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (usize::MAX, usize::MAX, 0, 0);
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let inside = |(rx, ry): (f64, f64), (ox, oy): (f64, f64)| {
                let dx = (px - cx - ox) / rx;
                let dy = (py - cy - oy) / ry;
                dx * dx + dy * dy <= 1.0
            };
            if inside(fuselage, (0.0, 0.0)) || inside(wings, wing_shift) {
                let v: f64 = shade + rng.gen_range(-6.0..6.0);
                let tint = |d: f64| crate::util::quantize_u8(v - d);
                img.set_pixel(x, y, [tint(4.0), tint(2.0), tint(0.0)]);
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if min_x == usize::MAX {
        return None;
    }
    Box2D::new(min_x as f64, min_y as f64, (max_x + 1) as f64, (max_y + 1) as f64).ok()
}

fn overlaps(a: (usize, usize, usize, usize), b: &(usize, usize, usize, usize), margin: usize) -> bool {
    let (ax, ay, aw, ah) = a;
    let (bx, by, bw, bh) = *b;
    ax < bx + bw + margin && bx < ax + aw + margin && ay < by + bh + margin && by < ay + ah + margin
}

const PLACEMENT_RETRIES: usize = 60;

/// Deterministic scene for `seed`. Objects that cannot be placed without
/// overlap after bounded retries are dropped.
pub fn generate_scene(seed: u64, params: &SceneParams) -> Result<Scene> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gray = background(params, &mut rng);
    let data = gray
        .iter()
        .flat_map(|&g| [crate::util::quantize_u8(g - 6.0), crate::util::quantize_u8(g), crate::util::quantize_u8(g - 10.0)])
        .collect();
    let mut image = RgbImage::new(params.width, params.height, data)?;

    let count = if params.max_objects == 0 || rng.gen_bool(params.empty_fraction) {
        params.min_objects
    } else {
        rng.gen_range(params.min_objects.max(1)..=params.max_objects)
    };
    let mut placed: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut truths = Vec::new();
    for _ in 0..count {
        let area = rng.gen_range(params.min_area..=params.max_area);
        let aspect: f64 = rng.gen_range(0.8..1.25);
        let w = ((area * aspect).sqrt().round() as usize).clamp(4, params.width - 2);
        let h = ((area / aspect).sqrt().round() as usize).clamp(4, params.height - 2);
        for _ in 0..PLACEMENT_RETRIES {
            let x = rng.gen_range(1..params.width - w);
            let y = rng.gen_range(1..params.height - h);
            let candidate = (x, y, w, h);
            if placed.iter().any(|p| overlaps(candidate, p, 3)) {
                continue;
            }
            if let Some(bbox) = draw_aircraft(&mut image, x, y, w, h, &mut rng) {
                placed.push(candidate);
                truths.push(GroundTruthBox::new(bbox));
            }
            break;
        }
    }
    let nominal_mean_area = if truths.is_empty() {
        0.0
    } else {
        truths.iter().map(|t| t.bbox.area()).sum::<f64>() / truths.len() as f64
    };
    Ok(Scene {
        nominal_level_b: estimate_brightness_level_rgb(&image),
        image,
        truths,
        seed,
        nominal_mean_area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let p = SceneParams::default();
        assert_eq!(generate_scene(11, &p).unwrap(), generate_scene(11, &p).unwrap());
        assert_ne!(generate_scene(11, &p).unwrap().image, generate_scene(12, &p).unwrap().image);
    }

    #[test]
    fn empty_count_range() {
        let p = SceneParams { min_objects: 0, max_objects: 0, ..Default::default() };
        for seed in 0..5 {
            assert!(generate_scene(seed, &p).unwrap().truths.is_empty());
        }
    }

    #[test]
    fn truths_inside_image_and_disjoint() {
        let p = SceneParams::default();
        for seed in 0..40 {
            let s = generate_scene(seed, &p).unwrap();
            for (i, t) in s.truths.iter().enumerate() {
                assert!(t.bbox.x_min >= 0.0 && t.bbox.y_min >= 0.0);
                assert!(t.bbox.x_max <= p.width as f64 && t.bbox.y_max <= p.height as f64);
                for u in &s.truths[i + 1..] {
                    assert_eq!(crate::metrics::iou(&t.bbox, &u.bbox), 0.0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        let p = SceneParams { max_objects: 9, ..Default::default() };
        assert!(generate_scene(0, &p).is_err());
        let p = SceneParams { min_area: 10.0, ..Default::default() };
        assert!(generate_scene(0, &p).is_err());
    }
}
