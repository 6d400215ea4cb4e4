//! Pixel containers, colour conversion, bilinear resize and the
//! brightness/scale level algebra the agents act on.

mod action;
mod brightness;
mod color;
mod plane;
mod ppm;
mod resize;
mod scale;

pub use action::{ActionFamily, AttributeAction};
pub use brightness::{
    brightness_quantiles, estimate_brightness_level, estimate_brightness_level_rgb,
    fit_brightness_base, quantiles_from_counts, render_brightness, update_brightness_level,
    BrightnessModel, FIT_LEVEL_LIMIT, QUANTILE_SUM_DIVISOR,
};
pub use color::{hsv_to_rgb, rgb_to_hsv, value_channel, HsvImage, RgbImage};
pub use plane::Plane;
pub use ppm::{read_ppm, write_ppm};
pub use resize::{resize_bilinear, resize_to, resized_dims, MAX_SIDE, MIN_SIDE};
pub use scale::{
    estimate_scale_level, scale_factor_for_step, scale_step_rules, update_scale_level,
    DeltaLevelRule, LiteralLevelRule, ScaleModel, ScaleStepRule, DEFAULT_ALPHA0, DEFAULT_THETA,
};
