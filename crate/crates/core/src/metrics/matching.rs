use serde::{Deserialize, Serialize};

use crate::metrics::{iou, Detection, GroundTruthBox};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub detection: usize,
    pub truth: usize,
    pub iou: f64,
}

/// One-to-one assignment of detections to ground truths.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_truths: Vec<usize>,
}

impl MatchResult {
    pub fn detection_count(&self) -> usize {
        self.pairs.len() + self.unmatched_detections.len()
    }

    pub fn truth_count(&self) -> usize {
        self.pairs.len() + self.unmatched_truths.len()
    }
}

/// Indices of `scores` ordered by descending score, ties by lower index.
pub(crate) fn score_order(scores: impl Iterator<Item = f64>) -> Vec<usize> {
    let scores: Vec<f64> = scores.collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Greedy matching in descending score order: each detection takes the
/// unmatched same-category truth with the highest IoU (ties to the lower
/// index), provided that IoU reaches `iou_threshold`.
pub fn match_greedy(
    detections: &[Detection],
    truths: &[GroundTruthBox],
    iou_threshold: f64,
) -> MatchResult {
    let mut taken = vec![false; truths.len()];
    let mut result = MatchResult::default();
    for d in score_order(detections.iter().map(|d| d.score)) {
        let det = &detections[d];
        let mut best: Option<(usize, f64)> = None;
        for (g, truth) in truths.iter().enumerate() {
            if taken[g] || truth.category != det.category {
                continue;
            }
            let v = iou(&det.bbox, &truth.bbox);
            if v >= iou_threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        match best {
            Some((g, v)) => {
                taken[g] = true;
                result.pairs.push(MatchedPair {
                    detection: d,
                    truth: g,
                    iou: v,
                });
            }
            None => result.unmatched_detections.push(d),
        }
    }
    result.unmatched_detections.sort_unstable();
    result.unmatched_truths = (0..truths.len()).filter(|&g| !taken[g]).collect();
    result
}
