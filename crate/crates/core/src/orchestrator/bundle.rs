use std::path::{Path, PathBuf};

use crate::agent::{load_params, save_params, MlpParams};
use crate::error::{Error, Result};
use crate::features::STATE_DIM;
use crate::imaging::ActionFamily;

/// The two independently trained agent networks.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentBundle {
    pub brightness: MlpParams,
    pub scale: MlpParams,
}

pub fn weights_file(dir: &Path, family: ActionFamily) -> PathBuf {
    dir.join(format!("{family}.weights"))
}

fn check_shape(params: &MlpParams, family: ActionFamily) -> Result<()> {
    if params.input_dim() != STATE_DIM || params.output_dim() != 2 {
        return Err(Error::contract(format!(
            "{family} agent maps {} inputs to {} outputs, expected {STATE_DIM} -> 2",
            params.input_dim(),
            params.output_dim()
        )));
    }
    Ok(())
}

/// Loads one agent's weights, checking the agent input and output widths.
pub fn load_agent(dir: &Path, family: ActionFamily) -> Result<MlpParams> {
    let path = weights_file(dir, family);
    if !path.exists() {
        return Err(Error::WeightFile {
            path,
            reason: format!("missing {family} weights; run `train --agent {family}` first"),
        });
    }
    let params = load_params(&path)?;
    check_shape(&params, family).map_err(|e| Error::WeightFile {
        path,
        reason: e.to_string(),
    })?;
    Ok(params)
}

impl AgentBundle {
    pub fn new(brightness: MlpParams, scale: MlpParams) -> Result<Self> {
        check_shape(&brightness, ActionFamily::Brightness)?;
        check_shape(&scale, ActionFamily::Scale)?;
        Ok(Self { brightness, scale })
    }

    pub fn agent(&self, family: ActionFamily) -> &MlpParams {
        match family {
            ActionFamily::Brightness => &self.brightness,
            ActionFamily::Scale => &self.scale,
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        save_params(&weights_file(dir, ActionFamily::Brightness), &self.brightness)?;
        save_params(&weights_file(dir, ActionFamily::Scale), &self.scale)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Ok(Self {
            brightness: load_agent(dir, ActionFamily::Brightness)?,
            scale: load_agent(dir, ActionFamily::Scale)?,
        })
    }
}
