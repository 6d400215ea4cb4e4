use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::{agent_layer_sizes, init_params, AdamState, MlpParams, ReplayBuffer, TrainConfig, Transition};
use crate::error::{Error, Result};
use crate::features::StateVector;

pub const HUBER_DELTA: f64 = 1.0;

pub fn huber(x: f64) -> f64 {
    if x.abs() <= HUBER_DELTA {
        0.5 * x * x
    } else {
        HUBER_DELTA * (x.abs() - 0.5 * HUBER_DELTA)
    }
}

fn huber_grad(x: f64) -> f64 {
    x.clamp(-HUBER_DELTA, HUBER_DELTA)
}

/// Index of the larger of two q-values; ties go to 0.
pub fn greedy_action(q: &[f64]) -> usize {
    usize::from(q[1] > q[0])
}

/// Epsilon-greedy over two actions; greedy ties go to index 0.
pub fn select_action(q: &[f64], epsilon: f64, rng: &mut impl Rng) -> usize {
    debug_assert_eq!(q.len(), 2);
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        rng.gen_range(0..2)
    } else {
        greedy_action(q)
    }
}

/// Bootstrap target: the online network picks the next action, the target
/// network values it.
pub fn double_dqn_target(tr: &Transition, online: &MlpParams, target: &MlpParams, gamma: f64) -> Result<f64> {
    let r = f64::from(tr.reward);
    if tr.terminal || gamma == 0.0 {
        return Ok(r);
    }
    let next = tr.next_state.values();
    let a = greedy_action(&online.forward(next)?);
    Ok(r + gamma * target.forward(next)?[a])
}

fn stack(states: &[&StateVector]) -> Result<Array2<f64>> {
    let width = states[0].values().len();
    let flat: Vec<f64> = states.iter().flat_map(|s| s.values().iter().copied()).collect();
    Array2::from_shape_vec((states.len(), width), flat).map_err(|e| Error::contract(e.to_string()))
}

/// One minibatch update of `online`. Returns the mean Huber loss, or `None`
/// when the buffer holds fewer than `batch_size` transitions.
pub fn train_step(
    buffer: &ReplayBuffer,
    online: &mut MlpParams,
    target: &MlpParams,
    opt: &mut AdamState,
    cfg: &TrainConfig,
    rng: &mut impl Rng,
) -> Result<Option<f64>> {
    if buffer.len() < cfg.batch_size {
        return Ok(None);
    }
    let batch: Vec<&Transition> = buffer
        .sample_indices(cfg.batch_size, rng)
        .into_iter()
        .map(|i| buffer.get(i))
        .collect();
    let n = batch.len();
    let states = stack(&batch.iter().map(|t| t.state.as_ref()).collect::<Vec<_>>())?;
    let nexts = stack(&batch.iter().map(|t| t.next_state.as_ref()).collect::<Vec<_>>())?;
    let (q_next_online, _) = online.forward_batch(nexts.view())?;
    let (q_next_target, _) = target.forward_batch(nexts.view())?;
    let (q, cache) = online.forward_batch(states.view())?;

    let mut grad_q = Array2::zeros((n, 2));
    let mut loss = 0.0;
    for (i, tr) in batch.iter().enumerate() {
        if tr.action > 1 {
            return Err(Error::contract(format!("action index {} out of range", tr.action)));
        }
        let mut y = f64::from(tr.reward);
        if !tr.terminal && cfg.gamma != 0.0 {
            let a = greedy_action(&[q_next_online[[i, 0]], q_next_online[[i, 1]]]);
            y += cfg.gamma * q_next_target[[i, a]];
        }
        let err = q[[i, tr.action]] - y;
        loss += huber(err);
        grad_q[[i, tr.action]] = huber_grad(err) / n as f64;
    }
    let grads = online.backward(&cache, grad_q.view())?;
    opt.step(online, &grads)?;
    let loss = loss / n as f64;
    if !loss.is_finite() {
        return Err(Error::Training(format!("non-finite loss at Adam step {}", opt.timestep)));
    }
    Ok(Some(loss))
}

pub fn sync_target(online: &MlpParams, target: &mut MlpParams) {
    *target = online.clone();
}

/// Online and target networks with their optimizer, replay buffer and RNG.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub online: MlpParams,
    pub target: MlpParams,
    pub opt: AdamState,
    pub buffer: ReplayBuffer,
    pub config: TrainConfig,
    updates: usize,
    rng: ChaCha8Rng,
}

impl DqnAgent {
    /// Agent-shaped network of width `config.hidden_width`.
    pub fn new(config: TrainConfig, seed: u64) -> Result<Self> {
        let params = init_params(&agent_layer_sizes(config.hidden_width), seed)?;
        Self::with_params(params, config, seed)
    }

    pub fn with_params(params: MlpParams, config: TrainConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            target: params.clone(),
            opt: AdamState::new(&params, config.learning_rate),
            online: params,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            config,
            updates: 0,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0xD00D_5EED),
        })
    }

    pub fn act(&mut self, state: &StateVector, epsilon: f64) -> Result<usize> {
        let q = self.online.forward(state.values())?;
        Ok(select_action(&q, epsilon, &mut self.rng))
    }

    pub fn remember(&mut self, state: Arc<StateVector>, action: usize, reward: i8, next_state: Arc<StateVector>, terminal: bool) {
        self.buffer.push(Transition {
            state,
            action,
            reward,
            next_state,
            terminal,
        });
    }

    /// One training step, syncing the target network every
    /// `target_sync_every` updates.
    pub fn learn(&mut self) -> Result<Option<f64>> {
        let loss = train_step(&self.buffer, &mut self.online, &self.target, &mut self.opt, &self.config, &mut self.rng)?;
        if loss.is_some() {
            self.updates += 1;
            if self.updates.is_multiple_of(self.config.target_sync_every) {
                sync_target(&self.online, &mut self.target);
            }
        }
        Ok(loss)
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
