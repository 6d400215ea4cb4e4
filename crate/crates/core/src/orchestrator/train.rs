use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{agent_layer_sizes, epsilon_at, init_params, save_params, DqnAgent, MlpParams};
use crate::environment::{degrade_labeled, sample_degradation, DegradeKind, Environment, LabeledImage};
use crate::error::{Error, Result};
use crate::imaging::{ActionFamily, AttributeAction};
use crate::orchestrator::bundle::weights_file;
use crate::orchestrator::{train_scenes, AgentBundle, RunConfig};
use crate::util::hash_words;

/// Episodes averaged in the logged mean episode reward.
const REWARD_WINDOW: usize = 100;

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRow {
    pub iteration: usize,
    pub loss: Option<f64>,
    pub epsilon: f64,
    pub mean_episode_reward: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainedAgent {
    pub family: ActionFamily,
    pub params: MlpParams,
    pub log: Vec<TrainLogRow>,
}

fn degradations(family: ActionFamily) -> [DegradeKind; 2] {
    match family {
        ActionFamily::Brightness => [DegradeKind::OverExpose, DegradeKind::UnderExpose],
        ActionFamily::Scale => [DegradeKind::ZoomOutDegrade, DegradeKind::ZoomInDegrade],
    }
}

fn family_tag(family: ActionFamily) -> u64 {
    match family {
        ActionFamily::Brightness => 1,
        ActionFamily::Scale => 2,
    }
}

pub fn write_train_log(path: &Path, rows: &[TrainLogRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Trains one agent on episodes that adjust only its own attribute. A
/// `degrade_fraction` share of episodes starts from an image degraded along
/// that attribute, the rest from a clean scene. One iteration is one
/// environment step followed by one minibatch update.
pub fn train_agent(
    family: ActionFamily,
    cfg: &RunConfig,
    env: &Environment,
    scenes: &[LabeledImage],
    checkpoint_dir: Option<&Path>,
) -> Result<TrainedAgent> {
    if scenes.is_empty() {
        return Err(Error::Config("training needs at least one scene".into()));
    }
    let tc = &cfg.train;
    let total = match family {
        ActionFamily::Brightness => tc.brightness_iterations,
        ActionFamily::Scale => tc.scale_iterations,
    };
    let seed = hash_words(&[cfg.seed, tc.seed, family_tag(family)]);
    let params = init_params(&agent_layer_sizes(tc.hidden_width), seed)?;
    let mut agent = DqnAgent::with_params(params, tc.clone(), seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE915_0DE5);
    let kinds = degradations(family);

    let mut log = Vec::with_capacity(total);
    let mut returns: VecDeque<f64> = VecDeque::with_capacity(REWARD_WINDOW);
    let mut episode = None;
    let mut episode_return = 0.0;
    for it in 0..total {
        let (st, state) = match episode.take() {
            Some(e) => e,
            None => {
                let scene = &scenes[rng.gen_range(0..scenes.len())];
                let start = if rng.gen::<f64>() < cfg.degrade_fraction {
                    let kind = kinds[rng.gen_range(0..kinds.len())];
                    degrade_labeled(scene, sample_degradation(kind, &mut rng))?
                } else {
                    scene.clone()
                };
                let st = env.reset(&start, tc.horizon)?;
                let s = Arc::new(st.state(family)?);
                episode_return = 0.0;
                (st, s)
            }
        };
        let mut st = st;
        let epsilon = epsilon_at(tc, it, total);
        let a = agent.act(&state, epsilon)?;
        let action = AttributeAction::from_index(family, a)?;
        let outcome = match family {
            ActionFamily::Brightness => env.step(&mut st, Some(action), None)?,
            ActionFamily::Scale => env.step(&mut st, None, Some(action))?,
        };
        let r = match family {
            ActionFamily::Brightness => outcome.reward_brightness,
            ActionFamily::Scale => outcome.reward_scale,
        }
        .expect("reward for the applied action");
        let next = Arc::new(st.state(family)?);
        agent.remember(state, a, r, next.clone(), outcome.terminal);
        episode_return += f64::from(r);
        if outcome.terminal {
            if returns.len() == REWARD_WINDOW {
                returns.pop_front();
            }
            returns.push_back(episode_return);
        } else {
            episode = Some((st, next));
        }
        let loss = agent.learn()?;
        log.push(TrainLogRow {
            iteration: it + 1,
            loss,
            epsilon,
            mean_episode_reward: (!returns.is_empty()).then(|| returns.iter().sum::<f64>() / returns.len() as f64),
        });
        if let Some(dir) = checkpoint_dir {
            if cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0 {
                save_params(&dir.join(format!("{family}_{:07}.weights", it + 1)), &agent.online)?;
            }
        }
    }
    Ok(TrainedAgent {
        family,
        params: agent.online,
        log,
    })
}

/// Trains and saves one agent's weights and log into `cfg.weights_dir`.
pub fn train_and_save(family: ActionFamily, cfg: &RunConfig, env: &Environment, scenes: &[LabeledImage]) -> Result<TrainedAgent> {
    std::fs::create_dir_all(&cfg.weights_dir)?;
    let trained = train_agent(family, cfg, env, scenes, Some(&cfg.weights_dir))?;
    save_params(&weights_file(&cfg.weights_dir, family), &trained.params)?;
    write_train_log(&cfg.weights_dir.join(format!("{family}_train_log.csv")), &trained.log)?;
    Ok(trained)
}

/// Trains the brightness agent and then the scale agent, saving both.
pub fn train_agents(cfg: &RunConfig, env: &Environment) -> Result<AgentBundle> {
    let scenes = train_scenes(cfg)?;
    let b = train_and_save(ActionFamily::Brightness, cfg, env, &scenes)?;
    let s = train_and_save(ActionFamily::Scale, cfg, env, &scenes)?;
    AgentBundle::new(b.params, s.params)
}
