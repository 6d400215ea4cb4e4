#![allow(dead_code)]

use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlaod_core::agent::{AdamState, MlpParams, ReplayBuffer, TrainConfig, Transition, train_step};
use rlaod_core::features::{assemble_state, StateKind, StateVector, CONTEXT_DIM, HIST_BINS};

/// Largest relative error between backprop and central differences over
/// `coords` (layer, is_bias, row, col) for the loss `sum(q * grad_q)`.
/// Relative errors use a floor of 1e-6 on the magnitude.
pub fn gradient_check(params: &MlpParams, x: &Array2<f64>, grad_q: &Array2<f64>, coords: &[(usize, bool, usize, usize)]) -> f64 {
    let loss = |p: &MlpParams| (&p.forward_batch(x.view()).unwrap().0 * grad_q).sum();
    let (_, cache) = params.forward_batch(x.view()).unwrap();
    let grads = params.backward(&cache, grad_q.view()).unwrap();
    let h = 1e-5;
    let mut worst = 0.0f64;
    for &(l, bias, r, c) in coords {
        let analytic = if bias { grads.layers[l].biases[r] } else { grads.layers[l].weights[[r, c]] };
        let bump = |delta: f64| {
            let mut p = params.clone();
            let layer = &mut p.layers_mut()[l];
            if bias {
                layer.biases[r] += delta;
            } else {
                layer.weights[[r, c]] += delta;
            }
            loss(&p)
        };
        let numeric = (bump(h) - bump(-h)) / (2.0 * h);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

/// He-initialised network with small random biases. Zero biases put dead
/// units exactly on the rectifier's kink, where differences are one-sided.
pub fn checkable_params(sizes: &[usize], seed: u64) -> MlpParams {
    let mut p = rlaod_core::agent::init_params(sizes, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB1A5);
    for layer in p.layers_mut() {
        layer.biases.mapv_inplace(|_| rng.gen_range(-0.1..0.1));
    }
    p
}

/// Every parameter coordinate of a network.
pub fn all_coords(params: &MlpParams) -> Vec<(usize, bool, usize, usize)> {
    let mut out = Vec::new();
    for (l, layer) in params.layers().iter().enumerate() {
        for r in 0..layer.outputs() {
            out.push((l, true, r, 0));
            for c in 0..layer.inputs() {
                out.push((l, false, r, c));
            }
        }
    }
    out
}

pub fn random_batch(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-1.0..1.0))
}

/// A 576-wide state with a single one at `index`.
pub fn one_hot_state(index: usize) -> Arc<StateVector> {
    let mut ctx = vec![0.0; CONTEXT_DIM];
    ctx[index] = 1.0;
    Arc::new(assemble_state(&ctx, &[0.0; HIST_BINS], StateKind::Brightness).unwrap())
}

/// Two-state, two-action deterministic MDP. Action 0 stays, action 1 moves
/// to the other state. Staying in state 1 pays +1, moving from 0 to 1 costs
/// 1, everything else pays nothing.
pub fn mdp_step(state: usize, action: usize) -> (usize, i8) {
    match (state, action) {
        (0, 0) => (0, 0),
        (0, 1) => (1, -1),
        (1, 0) => (1, 1),
        (1, 1) => (0, 0),
        _ => unreachable!(),
    }
}

/// Optimal Q by value iteration to 1e-12.
pub fn mdp_optimal_q(gamma: f64) -> [[f64; 2]; 2] {
    let mut q = [[0.0f64; 2]; 2];
    loop {
        let mut next = q;
        let mut change = 0.0f64;
        for s in 0..2 {
            for a in 0..2 {
                let (s2, r) = mdp_step(s, a);
                next[s][a] = f64::from(r) + gamma * q[s2][0].max(q[s2][1]);
                change = change.max((next[s][a] - q[s][a]).abs());
            }
        }
        q = next;
        if change < 1e-12 {
            return q;
        }
    }
}

/// Trains a small Double DQN on the MDP with uniformly random behaviour and
/// returns the largest deviation from the optimal Q after `steps` updates.
pub fn mdp_train(seed: u64, steps: usize) -> f64 {
    use rlaod_core::agent::{init_params, sync_target};
    let cfg = TrainConfig {
        gamma: 0.9,
        batch_size: 32,
        buffer_capacity: 2_000,
        target_sync_every: 50,
        learning_rate: 3e-3,
        ..Default::default()
    };
    let states = [one_hot_state(0), one_hot_state(1)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut online = init_params(&[rlaod_core::features::STATE_DIM, 16, 16, 2], seed).unwrap();
    let mut target = online.clone();
    let mut opt = AdamState::new(&online, cfg.learning_rate);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut s = 0usize;
    let mut updates = 0;
    while updates < steps {
        let a = rng.gen_range(0..2);
        let (s2, r) = mdp_step(s, a);
        buffer.push(Transition {
            state: states[s].clone(),
            action: a,
            reward: r,
            next_state: states[s2].clone(),
            terminal: false,
        });
        s = s2;
        if train_step(&buffer, &mut online, &target, &mut opt, &cfg, &mut rng).unwrap().is_some() {
            updates += 1;
            if updates % cfg.target_sync_every == 0 {
                sync_target(&online, &mut target);
            }
        }
    }
    let optimal = mdp_optimal_q(cfg.gamma);
    let mut worst = 0.0f64;
    for (st, q_star) in states.iter().zip(optimal) {
        let q = online.forward(st.values()).unwrap();
        worst = worst.max((q[0] - q_star[0]).abs()).max((q[1] - q_star[1]).abs());
    }
    worst
}
