//! Active object detection: two Double DQN agents adjust an image's
//! brightness and scale, step by step, so that a fixed detector performs
//! better on it.
//!
//! The crate is organised bottom-up:
//!
//! * [`imaging`]: colour conversion, bilinear resize and the brightness/scale
//!   level algebra.
//! * [`features`]: agent state vectors built from detector context and
//!   attribute histograms.
//! * [`metrics`]: IoU, matching, the performance score `p`, the sign reward
//!   and COCO-style AP.
//! * [`environment`]: synthetic scenes, detectors, degradations and episodes.
//! * [`agent`]: the Q-network, Adam, replay buffer and Double DQN updates.
//! * [`orchestrator`]: training, inference, mode evaluation and reports.

pub mod agent;
pub mod environment;
pub mod error;
pub mod features;
pub mod imaging;
pub mod metrics;
pub mod orchestrator;
pub mod registry;
pub(crate) mod util;

pub use error::{Error, Result};
