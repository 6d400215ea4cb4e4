use crate::metrics::{match_greedy, Detection, GroundTruthBox, MatchResult};

/// Detections count as correct at IoU of at least one half.
pub const MATCH_IOU_THRESHOLD: f64 = 0.5;

/// Harmonic mean of precision and recall. An image with neither detections
/// nor truths scores 1.
pub fn f_measure(matches: &MatchResult, n_detections: usize, n_truths: usize) -> f64 {
    if n_detections == 0 && n_truths == 0 {
        return 1.0;
    }
    let tp = matches.pairs.len() as f64;
    let precision = if n_detections > 0 { tp / n_detections as f64 } else { 0.0 };
    let recall = if n_truths > 0 { tp / n_truths as f64 } else { 0.0 };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Mean IoU over matched pairs; 1 for an empty image with no detections.
pub fn mean_iou(matches: &MatchResult) -> f64 {
    if matches.pairs.is_empty() {
        return if matches.detection_count() == 0 && matches.truth_count() == 0 {
            1.0
        } else {
            0.0
        };
    }
    matches.pairs.iter().map(|p| p.iou).sum::<f64>() / matches.pairs.len() as f64
}

/// `p = (F + mIoU) / 2` with matching at IoU 0.5.
pub fn performance_score(detections: &[Detection], truths: &[GroundTruthBox]) -> f64 {
    let m = match_greedy(detections, truths, MATCH_IOU_THRESHOLD);
    0.5 * (f_measure(&m, detections.len(), truths.len()) + mean_iou(&m))
}

/// `sign(p_next - p_prev)`, with an exact tie giving 0.
pub fn reward(p_next: f64, p_prev: f64) -> i8 {
    match p_next.partial_cmp(&p_prev) {
        Some(std::cmp::Ordering::Greater) => 1,
        Some(std::cmp::Ordering::Less) => -1,
        _ => 0,
    }
}
