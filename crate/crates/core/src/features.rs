//! Agent state vectors: 512 context values from the detector followed by a
//! 64-bin attribute histogram (brightness or object area).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{Plane, RgbImage};
use crate::metrics::Detection;

pub const CONTEXT_DIM: usize = 512;
pub const RAW_CONTEXT_DIMS: [usize; 2] = [512, 1024];
pub const HIST_BINS: usize = 64;
pub const STATE_DIM: usize = CONTEXT_DIM + HIST_BINS;

/// Detections below this score are left out of the area histogram.
pub const AREA_SCORE_THRESHOLD: f64 = 0.5;

pub const DEFAULT_SMOOTH_SIGMA: f64 = 1.0;
pub const SMOOTH_RADIUS: usize = 3;

/// Bin edges for object areas: `0, 9^2, 10^2..=24^2, 27^2..=75^2 (step 3),
/// 80^2..=175^2 (step 5), 182^2..=245^2 (step 7), +inf`.
pub fn area_bin_edges() -> [f64; HIST_BINS + 1] {
    let sides = std::iter::once(9)
        .chain(10..=24)
        .chain((27..=75).step_by(3))
        .chain((80..=175).step_by(5))
        .chain((182..=245).step_by(7));
    let mut edges = [0.0; HIST_BINS + 1];
    let mut n = 1;
    for side in sides {
        edges[n] = f64::from(side * side);
        n += 1;
    }
    assert_eq!(n, HIST_BINS, "area edge table must hold 65 edges");
    edges[HIST_BINS] = f64::INFINITY;
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    Brightness,
    Scale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    kind: StateKind,
}

impl StateVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn context(&self) -> &[f64] {
        &self.values[..CONTEXT_DIM]
    }

    pub fn attribute(&self) -> &[f64] {
        &self.values[CONTEXT_DIM..]
    }
}

fn normalise(counts: [u64; HIST_BINS], total: u64) -> Vec<f64> {
    let denom = total.max(1) as f64;
    counts.iter().map(|&c| c as f64 / denom).collect()
}

/// Brightness histogram of a V channel: bin width 4 over `[0, 256)`.
pub fn brightness_histogram(v: &Plane) -> Vec<f64> {
    let mut counts = [0u64; HIST_BINS];
    for &x in v.values() {
        let bin = ((x.clamp(0.0, 255.0) / 4.0).floor() as usize).min(HIST_BINS - 1);
        counts[bin] += 1;
    }
    normalise(counts, v.values().len() as u64)
}

/// Brightness histogram straight from an 8-bit image.
pub fn brightness_histogram_rgb(img: &RgbImage) -> Vec<f64> {
    let mut counts = [0u64; HIST_BINS];
    for [r, g, b] in img.pixels() {
        counts[usize::from(r.max(g).max(b) / 4)] += 1;
    }
    normalise(counts, (img.width() * img.height()) as u64)
}

fn area_bin(edges: &[f64; HIST_BINS + 1], area: f64) -> usize {
    // index of the last edge <= area; bins are left-closed
    edges.partition_point(|&e| e <= area).saturating_sub(1).min(HIST_BINS - 1)
}

/// Histogram of detection box areas, normalised by the number of boxes counted.
pub fn area_histogram(detections: &[Detection]) -> Vec<f64> {
    let edges = area_bin_edges();
    let mut counts = [0u64; HIST_BINS];
    let mut total = 0;
    for det in detections.iter().filter(|d| d.score >= AREA_SCORE_THRESHOLD) {
        counts[area_bin(&edges, det.bbox.area())] += 1;
        total += 1;
    }
    normalise(counts, total)
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = SMOOTH_RADIUS as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

// Half-sample mirror: -1 -> 0, -2 -> 1, n -> n-1.
fn mirror(i: i64, n: i64) -> usize {
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Discrete Gaussian smoothing (radius 3) with mirrored boundaries.
///
/// The mirrored operator is symmetric with unit row sums, so total mass and
/// constant vectors are both preserved.
pub fn gaussian_smooth(hist: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::input(format!("sigma must be positive, got {sigma}")));
    }
    let kernel = gaussian_kernel(sigma);
    let n = hist.len() as i64;
    let r = SMOOTH_RADIUS as i64;
    Ok((0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * hist[mirror(i + k as i64 - r, n)])
                .sum()
        })
        .collect())
}

/// Brings a 512- or 1024-long context vector down to 512 values by max
/// pooling adjacent pairs.
pub fn reduce_context(ctx: &[f64]) -> Result<Vec<f64>> {
    match ctx.len() {
        CONTEXT_DIM => Ok(ctx.to_vec()),
        1024 => Ok(ctx.chunks_exact(2).map(|p| p[0].max(p[1])).collect()),
        n => Err(Error::input(format!(
            "context length must be 512 or 1024, got {n}"
        ))),
    }
}

pub fn assemble_state(ctx: &[f64], attr_hist: &[f64], kind: StateKind) -> Result<StateVector> {
    if ctx.len() != CONTEXT_DIM || attr_hist.len() != HIST_BINS {
        return Err(Error::input(format!(
            "state segments must be {CONTEXT_DIM} + {HIST_BINS}, got {} + {}",
            ctx.len(),
            attr_hist.len()
        )));
    }
    if ctx.iter().chain(attr_hist).any(|v| !v.is_finite()) {
        return Err(Error::input("state contains non-finite values"));
    }
    let mut values = Vec::with_capacity(STATE_DIM);
    values.extend_from_slice(ctx);
    values.extend_from_slice(attr_hist);
    Ok(StateVector { values, kind })
}

/// Brightness agent state: context plus the V-channel histogram.
pub fn brightness_state(ctx: &[f64], img: &RgbImage) -> Result<StateVector> {
    assemble_state(ctx, &brightness_histogram_rgb(img), StateKind::Brightness)
}

/// Scale agent state: context plus the smoothed area histogram.
pub fn scale_state(ctx: &[f64], detections: &[Detection]) -> Result<StateVector> {
    let hist = gaussian_smooth(&area_histogram(detections), DEFAULT_SMOOTH_SIGMA)?;
    assemble_state(ctx, &hist, StateKind::Scale)
}
