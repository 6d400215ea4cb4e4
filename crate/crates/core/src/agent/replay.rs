use std::sync::Arc;

use rand::Rng;

use crate::features::StateVector;

/// One `(s, a, r, s', terminal)` experience. States are shared so that
/// consecutive transitions of an episode store each state once.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Arc<StateVector>,
    pub action: usize,
    pub reward: i8,
    pub next_state: Arc<StateVector>,
    pub terminal: bool,
}

/// Fixed-capacity ring; the oldest transition is evicted first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, tr: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(tr);
        } else {
            self.items[self.cursor] = tr;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Transitions from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.items.len() < self.capacity { 0 } else { self.cursor };
        self.items[split..].iter().chain(&self.items[..split])
    }

    /// Uniform sample with replacement.
    pub fn sample_indices(&self, n: usize, rng: &mut impl Rng) -> Vec<usize> {
        assert!(!self.items.is_empty(), "sampling an empty replay buffer");
        (0..n).map(|_| rng.gen_range(0..self.items.len())).collect()
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.items[index]
    }
}
