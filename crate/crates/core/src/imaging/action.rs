use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four attribute adjustments the agents can choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeAction {
    Brighten,
    Darken,
    ZoomIn,
    ZoomOut,
}

/// Which attribute an action (or an agent) adjusts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionFamily {
    Brightness,
    Scale,
}

impl AttributeAction {
    pub fn family(self) -> ActionFamily {
        match self {
            Self::Brighten | Self::Darken => ActionFamily::Brightness,
            Self::ZoomIn | Self::ZoomOut => ActionFamily::Scale,
        }
    }

    /// Index of the action in its agent's two-way output head.
    pub fn index(self) -> usize {
        match self {
            Self::Brighten | Self::ZoomIn => 0,
            Self::Darken | Self::ZoomOut => 1,
        }
    }

    pub fn from_index(family: ActionFamily, index: usize) -> Result<Self> {
        match (family, index) {
            (ActionFamily::Brightness, 0) => Ok(Self::Brighten),
            (ActionFamily::Brightness, 1) => Ok(Self::Darken),
            (ActionFamily::Scale, 0) => Ok(Self::ZoomIn),
            (ActionFamily::Scale, 1) => Ok(Self::ZoomOut),
            _ => Err(Error::contract(format!("action index {index} out of range"))),
        }
    }

    /// Direction of the level change: +1 towards the upper bound, -1 towards the lower.
    pub(crate) fn target(self) -> f64 {
        match self {
            Self::Brighten | Self::ZoomIn => 1.0,
            Self::Darken | Self::ZoomOut => -1.0,
        }
    }
}

impl fmt::Display for AttributeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Brighten => "brighten",
            Self::Darken => "darken",
            Self::ZoomIn => "zoom_in",
            Self::ZoomOut => "zoom_out",
        };
        f.write_str(name)
    }
}

impl fmt::Display for ActionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Brightness => f.write_str("brightness"),
            Self::Scale => f.write_str("scale"),
        }
    }
}

impl std::str::FromStr for ActionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brightness" => Ok(Self::Brightness),
            "scale" => Ok(Self::Scale),
            other => Err(Error::Config(format!("unknown agent '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for family in [ActionFamily::Brightness, ActionFamily::Scale] {
            for idx in 0..2 {
                let action = AttributeAction::from_index(family, idx).unwrap();
                assert_eq!(action.index(), idx);
                assert_eq!(action.family(), family);
            }
            assert!(AttributeAction::from_index(family, 2).is_err());
        }
    }
}
