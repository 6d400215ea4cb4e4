//! Scale level `L^s`: half the base-`theta` logarithm of the mean object
//! area relative to a prior area `alpha0`.

use crate::error::{Error, Result};
use crate::imaging::{ActionFamily, AttributeAction};
use crate::registry::Registry;

pub const DEFAULT_THETA: f64 = 8.0;
pub const DEFAULT_ALPHA0: f64 = 96.0 * 96.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleModel {
    pub level: f64,
    pub theta: f64,
    pub alpha0: f64,
}

impl Default for ScaleModel {
    fn default() -> Self {
        Self {
            level: 0.0,
            theta: DEFAULT_THETA,
            alpha0: DEFAULT_ALPHA0,
        }
    }
}

impl ScaleModel {
    pub fn with_level(self, level: f64) -> Self {
        Self { level, ..self }
    }
}

/// Level for a mean object area. `None` means nothing was detected and maps
/// to level 0.
pub fn estimate_scale_level(mean_area: Option<f64>, model: &ScaleModel) -> Result<f64> {
    let Some(area) = mean_area else {
        return Ok(0.0);
    };
    if !area.is_finite() || area <= 0.0 {
        return Err(Error::input(format!("mean area must be positive, got {area}")));
    }
    let level = 0.5 * (area / model.alpha0).ln() / model.theta.ln();
    Ok(level.clamp(-1.0, 1.0))
}

/// One scale action: a contraction by 0.95 towards +1 or -1.
pub fn update_scale_level(level: f64, action: AttributeAction) -> Result<f64> {
    if action.family() != ActionFamily::Scale {
        return Err(Error::contract(format!("{action} is not a scale action")));
    }
    Ok((0.95 * level + 0.05 * action.target()).clamp(-1.0, 1.0))
}

/// Linear resize factor that moves the area-derived level from
/// `level_before` to `level_after`: areas scale by `f^2`, so the level moves
/// by `log_theta f`.
pub fn scale_factor_for_step(level_before: f64, level_after: f64, theta: f64) -> f64 {
    theta.powf(level_after - level_before)
}

/// How a single scale step turns level bookkeeping into a resize factor.
pub trait ScaleStepRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Linear resize factor applied on top of the previous cumulative factor.
    fn step_factor(&self, level_before: f64, level_after: f64, theta: f64) -> f64;
}

/// Resize by `theta^(L(t+1) - L(t))`; keeps the area-derived level equal to
/// the tracked level.
#[derive(Debug, Default, Clone, Copy)]
pub struct DeltaLevelRule;

impl ScaleStepRule for DeltaLevelRule {
    fn name(&self) -> &'static str {
        "delta"
    }

    fn step_factor(&self, level_before: f64, level_after: f64, theta: f64) -> f64 {
        scale_factor_for_step(level_before, level_after, theta)
    }
}

/// Resize by `theta^L(t)` every step, reading the level as an absolute
/// per-step exponent. Kept for comparison runs only.
#[derive(Debug, Default, Clone, Copy)]
pub struct LiteralLevelRule;

impl ScaleStepRule for LiteralLevelRule {
    fn name(&self) -> &'static str {
        "literal"
    }

    fn step_factor(&self, level_before: f64, _level_after: f64, theta: f64) -> f64 {
        theta.powf(level_before)
    }
}

/// Registry with the built-in `delta` (default) and `literal` rules.
pub fn scale_step_rules() -> Registry<dyn ScaleStepRule, ()> {
    let mut reg: Registry<dyn ScaleStepRule, ()> = Registry::new("scale step rule");
    reg.register("delta", |_| Ok(Box::new(DeltaLevelRule)));
    reg.register("literal", |_| Ok(Box::new(LiteralLevelRule)));
    reg
}
