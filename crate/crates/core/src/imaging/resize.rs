use crate::imaging::RgbImage;
use crate::util::quantize_u8;

pub const MIN_SIDE: usize = 8;
pub const MAX_SIDE: usize = 4096;

/// Output side lengths for a resize by `factor`. Sides are bounded to
/// `[MIN_SIDE, MAX_SIDE]`; images already narrower than `MIN_SIDE` are never
/// forced larger than they would otherwise become.
pub fn resized_dims(width: usize, height: usize, factor: f64) -> (usize, usize) {
    assert!(factor > 0.0 && factor.is_finite(), "resize factor must be positive");
    let side = |d: usize| {
        let target = (d as f64 * factor).round() as usize;
        target.clamp(MIN_SIDE.min(d), MAX_SIDE).max(1)
    };
    (side(width), side(height))
}

pub fn resize_bilinear(img: &RgbImage, factor: f64) -> RgbImage {
    let (w, h) = resized_dims(img.width(), img.height(), factor);
    resize_to(img, w, h)
}

struct Tap {
    lo: usize,
    hi: usize,
    frac: f64,
}

// Corner-aligned sampling: output pixel 0 and the last output pixel sit on
// the first and last source pixel centres.
fn taps(src: usize, dst: usize) -> Vec<Tap> {
    let ratio = if dst > 1 {
        (src - 1) as f64 / (dst - 1) as f64
    } else {
        0.0
    };
    (0..dst)
        .map(|i| {
            let pos = i as f64 * ratio;
            let lo = (pos.floor() as usize).min(src - 1);
            Tap {
                lo,
                hi: (lo + 1).min(src - 1),
                frac: pos - lo as f64,
            }
        })
        .collect()
}

/// Bilinear resample to an explicit size.
pub fn resize_to(img: &RgbImage, width: usize, height: usize) -> RgbImage {
    assert!(width > 0 && height > 0, "target size must be positive");
    if width == img.width() && height == img.height() {
        return img.clone();
    }
    let xs = taps(img.width(), width);
    let ys = taps(img.height(), height);
    let src = img.data();
    let stride = img.width() * 3;
    let mut out = Vec::with_capacity(width * height * 3);
    for ty in &ys {
        let row0 = &src[ty.lo * stride..(ty.lo + 1) * stride];
        let row1 = &src[ty.hi * stride..(ty.hi + 1) * stride];
        for tx in &xs {
            for c in 0..3 {
                let a = f64::from(row0[tx.lo * 3 + c]);
                let b = f64::from(row0[tx.hi * 3 + c]);
                let d = f64::from(row1[tx.lo * 3 + c]);
                let e = f64::from(row1[tx.hi * 3 + c]);
                let top = a + tx.frac * (b - a);
                let bottom = d + tx.frac * (e - d);
                out.push(quantize_u8(top + ty.frac * (bottom - top)));
            }
        }
    }
    RgbImage::new(width, height, out).expect("sized by construction")
}
