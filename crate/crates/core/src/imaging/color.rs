use crate::error::{Error, Result};
use crate::imaging::Plane;
use crate::util::quantize_u8;

/// An 8-bit, 3-channel image stored row-major as `[r, g, b, r, g, b, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input("image must have at least one pixel"));
        }
        if data.len() != width * height * 3 {
            return Err(Error::input(format!(
                "image data length {} does not match {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image must have at least one pixel");
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// HSV representation with real-valued channels: hue in degrees `[0, 360)`,
/// saturation in `[0, 1]`, value in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    pub hue: Plane,
    pub saturation: Plane,
    pub value: Plane,
}

impl HsvImage {
    pub fn width(&self) -> usize {
        self.value.width()
    }

    pub fn height(&self) -> usize {
        self.value.height()
    }

    /// Replaces the V channel, keeping hue and saturation.
    pub fn with_value(&self, value: Plane) -> Result<Self> {
        if value.width() != self.width() || value.height() != self.height() {
            return Err(Error::input("value channel dimensions differ from image"));
        }
        Ok(Self {
            hue: self.hue.clone(),
            saturation: self.saturation.clone(),
            value,
        })
    }
}

fn pixel_to_hsv([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (if h >= 360.0 { h - 360.0 } else { h }, s, max)
}

fn hsv_to_pixel(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [quantize_u8(r + m), quantize_u8(g + m), quantize_u8(b + m)]
}

pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let n = img.width() * img.height();
    let (mut h, mut s, mut v) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for px in img.pixels() {
        let (ph, ps, pv) = pixel_to_hsv(px);
        h.push(ph);
        s.push(ps);
        v.push(pv);
    }
    let plane = |d| Plane::new(img.width(), img.height(), d).expect("dimensions from a valid image");
    HsvImage {
        hue: plane(h),
        saturation: plane(s),
        value: plane(v),
    }
}

pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    let h = img.hue.values();
    let s = img.saturation.values();
    let v = img.value.values();
    let mut data = Vec::with_capacity(v.len() * 3);
    for i in 0..v.len() {
        data.extend_from_slice(&hsv_to_pixel(h[i], s[i], v[i].clamp(0.0, 255.0)));
    }
    RgbImage::new(img.width(), img.height(), data).expect("dimensions from a valid image")
}

/// The V channel (per-pixel `max(r, g, b)`) without computing hue and saturation.
pub fn value_channel(img: &RgbImage) -> Plane {
    let data = img.pixels().map(|[r, g, b]| f64::from(r.max(g).max(b))).collect();
    Plane::new(img.width(), img.height(), data).expect("dimensions from a valid image")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(rgb: [u8; 3]) -> HsvImage {
        rgb_to_hsv(&RgbImage::filled(1, 1, rgb))
    }

    #[test]
    fn black_white_and_red() {
        let black = single([0, 0, 0]);
        assert_eq!((black.value.get(0, 0), black.saturation.get(0, 0)), (0.0, 0.0));
        let white = single([255, 255, 255]);
        assert_eq!((white.value.get(0, 0), white.saturation.get(0, 0)), (255.0, 0.0));
        let red = single([255, 0, 0]);
        assert_eq!(red.hue.get(0, 0), 0.0);
        assert_eq!(red.saturation.get(0, 0), 1.0);
        assert_eq!(red.value.get(0, 0), 255.0);
    }

    #[test]
    fn green_from_hsv_and_zero_value() {
        assert_eq!(hsv_to_pixel(120.0, 1.0, 255.0), [0, 255, 0]);
        assert_eq!(hsv_to_pixel(37.0, 0.8, 0.0), [0, 0, 0]);
    }

    #[test]
    fn round_trip_random_pixels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data: Vec<u8> = (0..3000).map(|_| rng.gen()).collect();
        let img = RgbImage::new(1000, 1, data).unwrap();
        assert_eq!(hsv_to_rgb(&rgb_to_hsv(&img)), img);
    }

    #[test]
    fn channels_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data: Vec<u8> = (0..30_000).map(|_| rng.gen()).collect();
        let hsv = rgb_to_hsv(&RgbImage::new(100, 100, data).unwrap());
        assert!(hsv.hue.values().iter().all(|&h| (0.0..360.0).contains(&h)));
        assert!(hsv.saturation.values().iter().all(|&s| (0.0..=1.0).contains(&s)));
        assert!(hsv.value.values().iter().all(|&v| (0.0..=255.0).contains(&v)));
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(RgbImage::new(2, 2, vec![0; 11]).is_err());
        assert!(RgbImage::new(0, 2, vec![]).is_err());
    }
}
