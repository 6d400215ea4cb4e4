//! Episode state and transitions: detect, build states, apply the chosen
//! brightness and scale actions, re-render from the episode's input image,
//! detect again and reward the change in `p`.

use serde::Serialize;

use crate::environment::{DetectRequest, Detector, DetectorOutput, LabeledImage};
use crate::error::{Error, Result};
use crate::features::{brightness_state, scale_state, StateVector, AREA_SCORE_THRESHOLD};
use crate::imaging::{
    estimate_brightness_level, estimate_scale_level, fit_brightness_base, hsv_to_rgb,
    render_brightness, resize_to, resized_dims, rgb_to_hsv, update_brightness_level,
    update_scale_level, ActionFamily, AttributeAction, BrightnessModel, DeltaLevelRule, HsvImage,
    RgbImage, ScaleModel, ScaleStepRule,
};
use crate::metrics::{performance_score, reward, GroundTruthBox};

/// A detector plus the rule turning scale levels into resize factors.
pub struct Environment {
    detector: Box<dyn Detector>,
    scale_rule: Box<dyn ScaleStepRule>,
    scale_model: ScaleModel,
}

#[derive(Debug, Clone)]
pub struct EpisodeState {
    pub original: LabeledImage,
    original_hsv: HsvImage,
    pub brightness: BrightnessModel,
    pub scale: ScaleModel,
    pub initial_scale_level: f64,
    pub cumulative_scale_factor: f64,
    pub step: usize,
    pub horizon: usize,
    /// Input image at the current brightness level, before any resize.
    brightness_image: RgbImage,
    pub current_image: RgbImage,
    pub current_truths: Vec<GroundTruthBox>,
    pub last_output: DetectorOutput,
    pub last_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub reward_brightness: Option<i8>,
    pub reward_scale: Option<i8>,
    pub terminal: bool,
}

impl EpisodeState {
    pub fn brightness_level(&self) -> f64 {
        self.brightness.level
    }

    pub fn scale_level(&self) -> f64 {
        self.scale.level
    }

    pub fn is_terminal(&self) -> bool {
        self.step >= self.horizon
    }

    /// Horizontal and vertical factors between the input and current image.
    pub fn axis_factors(&self) -> (f64, f64) {
        (
            self.current_image.width() as f64 / self.original.image.width() as f64,
            self.current_image.height() as f64 / self.original.image.height() as f64,
        )
    }

    pub fn brightness_state(&self) -> Result<StateVector> {
        brightness_state(&self.last_output.context, &self.current_image)
    }

    pub fn scale_state(&self) -> Result<StateVector> {
        scale_state(&self.last_output.context, &self.last_output.detections)
    }

    pub fn state(&self, family: ActionFamily) -> Result<StateVector> {
        match family {
            ActionFamily::Brightness => self.brightness_state(),
            ActionFamily::Scale => self.scale_state(),
        }
    }
}

impl Environment {
    pub fn new(detector: Box<dyn Detector>, scale_rule: Box<dyn ScaleStepRule>) -> Self {
        Self {
            detector,
            scale_rule,
            scale_model: ScaleModel::default(),
        }
    }

    /// Environment with the default (delta) scale rule.
    pub fn with_detector(detector: Box<dyn Detector>) -> Self {
        Self::new(detector, Box::new(DeltaLevelRule))
    }

    pub fn detector(&self) -> &dyn Detector {
        self.detector.as_ref()
    }

    pub fn scale_rule(&self) -> &dyn ScaleStepRule {
        self.scale_rule.as_ref()
    }

    fn detect(&self, image: &RgbImage, truths: &[GroundTruthBox], key: u64) -> Result<DetectorOutput> {
        self.detector.detect(&DetectRequest {
            image,
            truths,
            image_key: key,
        })
    }

    /// Starts an episode on `input` with horizon `horizon`.
    pub fn reset(&self, input: &LabeledImage, horizon: usize) -> Result<EpisodeState> {
        if horizon == 0 {
            return Err(Error::contract("episode horizon must be at least 1"));
        }
        let output = self.detect(&input.image, &input.truths, input.key)?;
        let hsv = rgb_to_hsv(&input.image);
        let brightness = fit_brightness_base(&hsv.value, estimate_brightness_level(&hsv.value));
        let scale_level = estimate_scale_level(output.mean_area(AREA_SCORE_THRESHOLD), &self.scale_model)?;
        let last_p = performance_score(&output.detections, &input.truths);
        Ok(EpisodeState {
            original: input.clone(),
            original_hsv: hsv,
            brightness,
            scale: self.scale_model.with_level(scale_level),
            initial_scale_level: scale_level,
            cumulative_scale_factor: 1.0,
            step: 0,
            horizon,
            brightness_image: input.image.clone(),
            current_image: input.image.clone(),
            current_truths: input.truths.clone(),
            last_output: output,
            last_p,
        })
    }

    /// Applies one step. Brightness is applied before scale; the image is
    /// always rebuilt from the episode input so resampling never compounds.
    pub fn step(
        &self,
        st: &mut EpisodeState,
        brightness_action: Option<AttributeAction>,
        scale_action: Option<AttributeAction>,
    ) -> Result<StepOutcome> {
        if st.step >= st.horizon {
            return Err(Error::contract(format!("step {} at horizon {}", st.step, st.horizon)));
        }
        if brightness_action.is_none() && scale_action.is_none() {
            return Err(Error::contract("a step needs at least one action"));
        }
        let new_b = brightness_action
            .map(|a| update_brightness_level(st.brightness.level, a))
            .transpose()?;
        let new_s = scale_action
            .map(|a| update_scale_level(st.scale.level, a))
            .transpose()?;

        if let Some(level) = new_b {
            let value = render_brightness(&st.brightness, level);
            st.brightness_image = hsv_to_rgb(&st.original_hsv.with_value(value)?);
            st.brightness.level = level;
        }
        if let Some(level) = new_s {
            st.cumulative_scale_factor *= self.scale_rule.step_factor(st.scale.level, level, st.scale.theta);
            st.scale.level = level;
        }

        let (w0, h0) = (st.original.image.width(), st.original.image.height());
        let (w, h) = resized_dims(w0, h0, st.cumulative_scale_factor);
        st.current_image = resize_to(&st.brightness_image, w, h);
        let (sx, sy) = (w as f64 / w0 as f64, h as f64 / h0 as f64);
        st.current_truths = st
            .original
            .truths
            .iter()
            .map(|t| GroundTruthBox {
                bbox: t.bbox.scaled(sx, sy),
                category: t.category,
            })
            .collect();

        st.last_output = self.detect(&st.current_image, &st.current_truths, st.original.key)?;
        let p = performance_score(&st.last_output.detections, &st.current_truths);
        let r = reward(p, st.last_p);
        st.last_p = p;
        st.step += 1;
        Ok(StepOutcome {
            reward_brightness: brightness_action.map(|_| r),
            reward_scale: scale_action.map(|_| r),
            terminal: st.step == st.horizon,
        })
    }
}
