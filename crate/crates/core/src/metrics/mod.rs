//! Detection geometry and scoring: IoU, greedy matching, the performance
//! score `p = (F + mIoU) / 2`, the sign reward, and COCO-style AP.

mod ap;
mod geometry;
mod matching;
mod score;

pub use ap::{
    evaluate_ap, iou_thresholds, ApReport, AreaRange, ImageEval, LARGE_MIN_AREA, RECALL_POINTS,
    SMALL_MAX_AREA,
};
pub use geometry::{iou, Box2D, Detection, GroundTruthBox};
pub use matching::{match_greedy, MatchResult, MatchedPair};
pub use score::{f_measure, mean_iou, performance_score, reward, MATCH_IOU_THRESHOLD};
