//! Double DQN agents: a fully connected Q-network with hand-written
//! backpropagation, Adam, a FIFO replay buffer and target-network
//! bootstrapping.

mod adam;
mod config;
mod dqn;
mod mlp;
mod replay;
mod weights;

pub use adam::AdamState;
pub use config::{epsilon_at, TrainConfig};
pub use dqn::{
    double_dqn_target, greedy_action, huber, select_action, sync_target, train_step, DqnAgent, HUBER_DELTA,
};
pub use mlp::{agent_layer_sizes, init_params, ForwardCache, Gradients, Layer, MlpParams};
pub use replay::{ReplayBuffer, Transition};
pub use weights::{decode_params, encode_params, encoded_len, load_params, save_params, WEIGHT_MAGIC};
