use serde::{Deserialize, Serialize};

use crate::agent::{greedy_action, MlpParams};
use crate::environment::{Environment, EpisodeState, LabeledImage};
use crate::error::{Error, Result};
use crate::imaging::{ActionFamily, AttributeAction, RgbImage};
use crate::metrics::Detection;
use crate::orchestrator::AgentBundle;

/// Levels and score after one joint step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step: usize,
    pub brightness_action: Option<AttributeAction>,
    pub scale_action: Option<AttributeAction>,
    pub brightness_level: f64,
    pub scale_level: f64,
    pub width: usize,
    pub height: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub image_id: u64,
    pub initial_brightness_level: f64,
    pub initial_scale_level: f64,
    pub initial_p: f64,
    pub steps: Vec<TrajectoryStep>,
}

/// Detections and score at one point of an episode. Boxes are in the
/// coordinates of the episode's input image.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub p: f64,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone)]
pub struct Rollout {
    pub trajectory: Trajectory,
    /// Index `t` holds the state after `t` steps.
    pub snapshots: Vec<Snapshot>,
    pub final_state: EpisodeState,
}

fn snapshot(st: &EpisodeState) -> Snapshot {
    let (sx, sy) = st.axis_factors();
    Snapshot {
        p: st.last_p,
        detections: st
            .last_output
            .detections
            .iter()
            .map(|d| Detection {
                bbox: d.bbox.scaled(1.0 / sx, 1.0 / sy),
                ..*d
            })
            .collect(),
    }
}

fn greedy(params: &MlpParams, st: &EpisodeState, family: ActionFamily) -> Result<AttributeAction> {
    let q = params.forward(st.state(family)?.values())?;
    AttributeAction::from_index(family, greedy_action(&q))
}

/// Runs the greedy agents for `horizon` steps. Without a scale agent the
/// scale level stays at its initial value.
pub fn rollout(
    env: &Environment,
    brightness: &MlpParams,
    scale: Option<&MlpParams>,
    input: &LabeledImage,
    horizon: usize,
) -> Result<Rollout> {
    let mut st = env.reset(input, horizon.max(1))?;
    let mut trajectory = Trajectory {
        image_id: input.key,
        initial_brightness_level: st.brightness_level(),
        initial_scale_level: st.scale_level(),
        initial_p: st.last_p,
        steps: Vec::with_capacity(horizon),
    };
    let mut snapshots = vec![snapshot(&st)];
    for _ in 0..horizon {
        // both agents observe the same state before either action is applied
        let b = greedy(brightness, &st, ActionFamily::Brightness)?;
        let s = scale.map(|p| greedy(p, &st, ActionFamily::Scale)).transpose()?;
        env.step(&mut st, Some(b), s)?;
        trajectory.steps.push(TrajectoryStep {
            step: st.step,
            brightness_action: Some(b),
            scale_action: s,
            brightness_level: st.brightness_level(),
            scale_level: st.scale_level(),
            width: st.current_image.width(),
            height: st.current_image.height(),
            p: st.last_p,
        });
        snapshots.push(snapshot(&st));
    }
    Ok(Rollout {
        trajectory,
        snapshots,
        final_state: st,
    })
}

/// Output of the full loop for one image.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub image: RgbImage,
    pub detections: Vec<Detection>,
}

/// Adjusts every image with both agents for `horizon` steps.
pub fn run_rl_aod(env: &Environment, bundle: &AgentBundle, images: &[LabeledImage], horizon: usize) -> Result<Vec<RunOutput>> {
    if horizon == 0 {
        return Err(Error::contract("horizon must be at least 1"));
    }
    images
        .iter()
        .map(|img| {
            let r = rollout(env, &bundle.brightness, Some(&bundle.scale), img, horizon)?;
            Ok(RunOutput {
                trajectory: r.trajectory,
                image: r.final_state.current_image,
                detections: r.final_state.last_output.detections,
            })
        })
        .collect()
}
