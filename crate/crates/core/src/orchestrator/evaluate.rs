use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environment::{Environment, LabeledImage};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_ap, ApReport, ImageEval};
use crate::orchestrator::run::{rollout, Snapshot};
use crate::orchestrator::{degraded_set, AgentBundle, EvalMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: EvalMode,
    pub images: usize,
    pub mean_p: Option<f64>,
    #[serde(flatten)]
    pub ap: ApReport,
}

impl ModeResult {
    /// `(name, value)` pairs in report order.
    pub fn metrics(&self) -> Vec<(&'static str, Option<f64>)> {
        let mut m = self.ap.fields().to_vec();
        m.push(("mean_p", self.mean_p));
        m
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub modes: Vec<ModeResult>,
}

impl EvalReport {
    pub fn get(&self, mode: EvalMode) -> Option<&ModeResult> {
        self.modes.iter().find(|r| r.mode == mode)
    }
}

/// Snapshots needed per image: detector-only, brightness-agent and
/// both-agent rollouts. Shorter horizons are prefixes of the longest one.
struct ImageRuns {
    truths: Vec<crate::metrics::GroundTruthBox>,
    fr: Snapshot,
    b: Vec<Snapshot>,
    bs: Vec<Snapshot>,
}

fn run_set(
    env: &Environment,
    bundle: Option<&AgentBundle>,
    images: &[LabeledImage],
    b_horizon: usize,
    bs_horizon: usize,
) -> Result<Vec<ImageRuns>> {
    images
        .par_iter()
        .map(|img| {
            let b = match (bundle, b_horizon) {
                (Some(bd), h) if h > 0 => rollout(env, &bd.brightness, None, img, h)?.snapshots,
                _ => Vec::new(),
            };
            let bs = match (bundle, bs_horizon) {
                (Some(bd), h) if h > 0 => rollout(env, &bd.brightness, Some(&bd.scale), img, h)?.snapshots,
                _ => Vec::new(),
            };
            let fr = match (b.first(), bs.first()) {
                (Some(s), _) | (None, Some(s)) => s.clone(),
                (None, None) => {
                    let st = env.reset(img, 1)?;
                    Snapshot {
                        p: st.last_p,
                        detections: st.last_output.detections,
                    }
                }
            };
            Ok(ImageRuns {
                truths: img.truths.clone(),
                fr,
                b,
                bs,
            })
        })
        .collect()
}

fn summarise(mode: EvalMode, runs: &[ImageRuns]) -> ModeResult {
    let h = mode.horizon();
    let pick = |r: &ImageRuns| -> Snapshot {
        match mode {
            EvalMode::Fr | EvalMode::FrStar => r.fr.clone(),
            EvalMode::B2 | EvalMode::B4 => r.b[h].clone(),
            EvalMode::Bs2 | EvalMode::Bs4 | EvalMode::BsStar => r.bs[h].clone(),
        }
    };
    let snaps: Vec<Snapshot> = runs.iter().map(pick).collect();
    let evals: Vec<ImageEval> = snaps
        .iter()
        .zip(runs)
        .map(|(s, r)| ImageEval {
            detections: s.detections.clone(),
            truths: r.truths.clone(),
        })
        .collect();
    ModeResult {
        mode,
        images: runs.len(),
        mean_p: (!snaps.is_empty()).then(|| snaps.iter().map(|s| s.p).sum::<f64>() / snaps.len() as f64),
        ap: evaluate_ap(&evals),
    }
}

fn horizons(modes: &[EvalMode]) -> (usize, usize) {
    let b = modes.iter().filter(|m| m.uses_agents() && !m.uses_scale_agent()).map(|m| m.horizon()).max();
    let bs = modes.iter().filter(|m| m.uses_scale_agent()).map(|m| m.horizon()).max();
    (b.unwrap_or(0), bs.unwrap_or(0))
}

/// Evaluates each mode. Ordinary modes run on the degraded set built from
/// `scenes` (five images per scene); starred modes run on `scenes` as given.
/// Final detections are mapped back to each input image before scoring.
pub fn evaluate_modes(
    env: &Environment,
    bundle: Option<&AgentBundle>,
    scenes: &[LabeledImage],
    modes: &[EvalMode],
    seed: u64,
) -> Result<EvalReport> {
    if bundle.is_none() {
        if let Some(m) = modes.iter().find(|m| m.uses_agents()) {
            return Err(Error::Config(format!("mode {m} needs trained agent weights")));
        }
    }
    let (degraded_modes, clean_modes): (Vec<EvalMode>, Vec<EvalMode>) = modes.iter().partition(|m| !m.clean_only());
    let mut results = Vec::with_capacity(modes.len());
    if !degraded_modes.is_empty() {
        let set = degraded_set(scenes, seed)?;
        let (hb, hbs) = horizons(&degraded_modes);
        let runs = run_set(env, bundle, &set, hb, hbs)?;
        results.extend(degraded_modes.iter().map(|&m| summarise(m, &runs)));
    }
    if !clean_modes.is_empty() {
        let (hb, hbs) = horizons(&clean_modes);
        let runs = run_set(env, bundle, scenes, hb, hbs)?;
        results.extend(clean_modes.iter().map(|&m| summarise(m, &runs)));
    }
    // report in the order the modes were requested
    results.sort_by_key(|r| modes.iter().position(|&m| m == r.mode));
    Ok(EvalReport { modes: results })
}
