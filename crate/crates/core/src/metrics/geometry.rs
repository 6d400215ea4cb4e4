use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in pixel coordinates, `x_max > x_min`, `y_max > y_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2D {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Box2D {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let b = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        if [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite())
            && x_max > x_min
            && y_max > y_min
        {
            Ok(b)
        } else {
            Err(Error::input(format!("degenerate box {b:?}")))
        }
    }

    /// From the `[x, y, w, h]` layout used in dataset manifests.
    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        Self::new(x, y, x + w, y + h)
    }

    pub fn to_xywh(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.width(), self.height()]
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// The box after resizing its image by `sx` horizontally and `sy` vertically.
    pub fn scaled(&self, sx: f64, sy: f64) -> Self {
        Self {
            x_min: self.x_min * sx,
            y_min: self.y_min * sy,
            x_max: self.x_max * sx,
            y_max: self.y_max * sy,
        }
    }
}

pub fn iou(a: &Box2D, b: &Box2D) -> f64 {
    let w = a.x_max.min(b.x_max) - a.x_min.max(b.x_min);
    let h = a.y_max.min(b.y_max) - a.y_min.max(b.y_min);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    (inter / (a.area() + b.area() - inter)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: Box2D,
    pub score: f64,
    #[serde(default)]
    pub category: u32,
}

impl Detection {
    pub fn new(bbox: Box2D, score: f64) -> Self {
        Self {
            bbox,
            score: score.clamp(0.0, 1.0),
            category: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthBox {
    pub bbox: Box2D,
    #[serde(default)]
    pub category: u32,
}

impl GroundTruthBox {
    pub fn new(bbox: Box2D) -> Self {
        Self { bbox, category: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x0: f64, y0: f64, x1: f64, y1: f64) -> Box2D {
        Box2D::new(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = b(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &b(20.0, 20.0, 30.0, 30.0)), 0.0);
        assert_eq!(iou(&a, &b(10.0, 0.0, 20.0, 10.0)), 0.0);
        assert!((iou(&a, &b(5.0, 0.0, 15.0, 10.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Box2D::new(1.0, 1.0, 1.0, 2.0).is_err());
        assert!(Box2D::new(0.0, 0.0, f64::NAN, 2.0).is_err());
        assert_eq!(b(1.0, 2.0, 4.0, 8.0).to_xywh(), [1.0, 2.0, 3.0, 6.0]);
    }

    fn arb_box() -> impl Strategy<Value = Box2D> {
        (0.0f64..50.0, 0.0f64..50.0, 0.5f64..40.0, 0.5f64..40.0)
            .prop_map(|(x, y, w, h)| Box2D::new(x, y, x + w, y + h).unwrap())
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(), c in arb_box()) {
            let (x, y) = (iou(&a, &c), iou(&c, &a));
            prop_assert_eq!(x, y);
            prop_assert!((0.0..=1.0).contains(&x));
            if x == 1.0 { prop_assert!((a.area() - c.area()).abs() < 1e-9); }
        }
    }
}
