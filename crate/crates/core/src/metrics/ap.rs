//! COCO-style average precision: ten IoU thresholds `0.50:0.05:0.95`,
//! 101-point interpolated precision, and small/medium/large strata by
//! ground-truth area.

use serde::{Deserialize, Serialize};

use crate::metrics::matching::score_order;
use crate::metrics::{iou, Detection, GroundTruthBox};

pub const SMALL_MAX_AREA: f64 = 32.0 * 32.0;
pub const LARGE_MIN_AREA: f64 = 96.0 * 96.0;
pub const RECALL_POINTS: usize = 101;

/// The ten thresholds as exact `k / 100` values.
pub fn iou_thresholds() -> [f64; 10] {
    std::array::from_fn(|i| (50 + 5 * i) as f64 / 100.0)
}

/// Detections and ground truth for one image.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImageEval {
    pub detections: Vec<Detection>,
    pub truths: Vec<GroundTruthBox>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaRange {
    pub min: f64,
    pub max: f64,
}

impl AreaRange {
    pub const ALL: Self = Self { min: 0.0, max: f64::INFINITY };
    pub const SMALL: Self = Self { min: 0.0, max: SMALL_MAX_AREA };
    pub const MEDIUM: Self = Self { min: SMALL_MAX_AREA, max: LARGE_MIN_AREA };
    pub const LARGE: Self = Self { min: LARGE_MIN_AREA, max: f64::INFINITY };

    pub fn contains(&self, area: f64) -> bool {
        area >= self.min && area < self.max
    }
}

/// Undefined strata (no ground truth in range) are `None` and serialise as `null`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub ap: Option<f64>,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    #[serde(rename = "ap_s")]
    pub ap_small: Option<f64>,
    #[serde(rename = "ap_m")]
    pub ap_medium: Option<f64>,
    #[serde(rename = "ap_l")]
    pub ap_large: Option<f64>,
}

impl ApReport {
    /// `(name, value)` in report order.
    pub fn fields(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("ap", self.ap),
            ("ap50", self.ap50),
            ("ap75", self.ap75),
            ("ap_s", self.ap_small),
            ("ap_m", self.ap_medium),
            ("ap_l", self.ap_large),
        ]
    }
}

/// Per-detection outcome at one threshold within one stratum.
struct ScoredOutcome {
    score: f64,
    true_positive: bool,
    ignored: bool,
}

fn match_image(
    image: &ImageEval,
    threshold: f64,
    range: AreaRange,
    out: &mut Vec<ScoredOutcome>,
) -> usize {
    // truths outside the stratum are ignored and tried last
    let truth_ignored: Vec<bool> = image.truths.iter().map(|t| !range.contains(t.bbox.area())).collect();
    let mut truth_order: Vec<usize> = (0..image.truths.len()).collect();
    truth_order.sort_by_key(|&g| truth_ignored[g]);

    let mut taken = vec![false; image.truths.len()];
    for d in score_order(image.detections.iter().map(|d| d.score)) {
        let det = &image.detections[d];
        let mut best: Option<(usize, f64)> = None;
        for &g in &truth_order {
            if taken[g] || image.truths[g].category != det.category {
                continue;
            }
            // once a regular truth is matched, ignored ones cannot replace it
            if let Some((m, _)) = best {
                if !truth_ignored[m] && truth_ignored[g] {
                    break;
                }
            }
            let v = iou(&det.bbox, &image.truths[g].bbox);
            if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        let (true_positive, ignored) = match best {
            Some((g, _)) => {
                taken[g] = true;
                (true, truth_ignored[g])
            }
            None => (false, !range.contains(det.bbox.area())),
        };
        out.push(ScoredOutcome {
            score: det.score,
            true_positive,
            ignored,
        });
    }
    truth_ignored.iter().filter(|&&ig| !ig).count()
}

/// AP at one threshold and stratum; `None` when the stratum has no truths.
fn average_precision(images: &[ImageEval], threshold: f64, range: AreaRange) -> Option<f64> {
    let mut outcomes = Vec::new();
    let mut positives = 0;
    for image in images {
        positives += match_image(image, threshold, range, &mut outcomes);
    }
    if positives == 0 {
        return None;
    }
    // stable: equal scores keep image order
    outcomes.sort_by(|a, b| b.score.total_cmp(&a.score));

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut recall = Vec::new();
    let mut precision = Vec::new();
    for o in outcomes.iter().filter(|o| !o.ignored) {
        if o.true_positive {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / positives as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    for i in (1..precision.len()).rev() {
        precision[i - 1] = precision[i - 1].max(precision[i]);
    }
    let sum: f64 = (0..RECALL_POINTS)
        .map(|k| {
            let r = k as f64 / 100.0;
            let idx = recall.partition_point(|&x| x < r);
            precision.get(idx).copied().unwrap_or(0.0)
        })
        .sum();
    Some(sum / RECALL_POINTS as f64)
}

fn mean_over_thresholds(images: &[ImageEval], range: AreaRange) -> Option<f64> {
    let per: Option<Vec<f64>> = iou_thresholds()
        .iter()
        .map(|&t| average_precision(images, t, range))
        .collect();
    per.map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn evaluate_ap(images: &[ImageEval]) -> ApReport {
    ApReport {
        ap: mean_over_thresholds(images, AreaRange::ALL),
        ap50: average_precision(images, 0.5, AreaRange::ALL),
        ap75: average_precision(images, 0.75, AreaRange::ALL),
        ap_small: mean_over_thresholds(images, AreaRange::SMALL),
        ap_medium: mean_over_thresholds(images, AreaRange::MEDIUM),
        ap_large: mean_over_thresholds(images, AreaRange::LARGE),
    }
}
