//! The environment the agents act in: synthetic scenes with ground truth, the
//! detector (a deterministic oracle or an external process), degradations,
//! and episode transitions.

mod dataset;
mod degrade;
mod detector;
mod episode;
mod external;
mod oracle;
mod scene;

pub use dataset::{load_dataset, write_dataset, Annotation, LabeledImage, Manifest, ManifestImage};
pub use degrade::{
    degrade, degrade_labeled, sample_degradation, DegradeKind, DegradeOp, EXPOSURE_SAMPLE_RANGE,
    ZOOM_IN_SAMPLE_RANGE, ZOOM_OUT_SAMPLE_RANGE,
};
pub use detector::{
    detector_registry, DetectRequest, Detector, DetectorCalibration, DetectorConfig,
    DetectorOutput, DetectorRegistry,
};
pub use episode::{Environment, EpisodeState, StepOutcome};
pub use external::{ExternalDetector, DEFAULT_TIMEOUT_SECS};
pub use oracle::OracleDetector;
pub use scene::{generate_scene, Scene, SceneParams};
