use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::STATE_DIM;

static GENERATION: AtomicU64 = AtomicU64::new(1);

fn next_generation() -> u64 {
    GENERATION.fetch_add(1, Ordering::Relaxed)
}

/// Affine layer; `weights` is `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((outputs, inputs)),
            biases: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

/// Parameters of a rectified-linear MLP with an affine output layer.
#[derive(Debug, Clone)]
pub struct MlpParams {
    layers: Vec<Layer>,
    /// Changes whenever the values change; guards against stale caches.
    generation: u64,
}

impl PartialEq for MlpParams {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

/// Layer sizes of an agent network: 576 inputs, five hidden layers of
/// `hidden` units, two outputs.
pub fn agent_layer_sizes(hidden: usize) -> Vec<usize> {
    let mut sizes = vec![STATE_DIM];
    sizes.extend(std::iter::repeat_n(hidden, 5));
    sizes.push(2);
    sizes
}

/// He-uniform weights (bound `sqrt(6 / fan_in)`), zero biases.
pub fn init_params(layer_sizes: &[usize], seed: u64) -> Result<MlpParams> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(Error::input(format!("invalid layer sizes {layer_sizes:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layer_sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / fan_in as f64).sqrt();
            Layer {
                weights: Array2::from_shape_simple_fn((fan_out, fan_in), || rng.gen_range(-bound..bound)),
                biases: Array1::zeros(fan_out),
            }
        })
        .collect();
    MlpParams::from_layers(layers)
}

/// Activations recorded by a forward pass, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer, one row per sample.
    inputs: Vec<Array2<f64>>,
    generation: u64,
}

/// Gradients with the same shapes as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.biases.iter()).all(|v| v.is_finite()))
    }
}

impl MlpParams {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::input("network needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::input("consecutive layer shapes do not chain"));
            }
        }
        if layers.iter().any(|l| l.biases.len() != l.outputs()) {
            return Err(Error::input("bias length does not match layer outputs"));
        }
        Ok(Self {
            layers,
            generation: next_generation(),
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.layers[0].inputs()];
        sizes.extend(self.layers.iter().map(Layer::outputs));
        sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs()
    }

    /// Mutable access to the raw values; invalidates outstanding caches.
    pub fn layers_mut(&mut self) -> &mut [Layer] {
        self.generation = next_generation();
        &mut self.layers
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.biases.iter()).all(|v| v.is_finite()))
    }

    /// Rounds every parameter to the nearest `f32`, the precision of weight files.
    pub fn round_to_f32(&mut self) {
        for layer in self.layers_mut() {
            layer.weights.mapv_inplace(|v| f64::from(v as f32));
            layer.biases.mapv_inplace(|v| f64::from(v as f32));
        }
    }

    /// Forward pass over a batch (one sample per row).
    pub fn forward_batch(&self, x: ArrayView2<'_, f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if x.ncols() != self.input_dim() {
            return Err(Error::contract(format!(
                "input width {} does not match network input {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut a = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = a.dot(&layer.weights.t());
            z += &layer.biases;
            if i < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            inputs.push(a);
            a = z;
        }
        Ok((
            a,
            ForwardCache {
                inputs,
                generation: self.generation,
            },
        ))
    }

    /// Q-values for one state, without keeping a cache.
    pub fn forward(&self, state: &[f64]) -> Result<Vec<f64>> {
        let x = ArrayView2::from_shape((1, state.len()), state)
            .map_err(|e| Error::contract(e.to_string()))?;
        Ok(self.forward_batch(x)?.0.row(0).to_vec())
    }

    /// Reverse-mode gradients of `sum(q * grad_q)` with respect to every parameter.
    pub fn backward(&self, cache: &ForwardCache, grad_q: ArrayView2<'_, f64>) -> Result<Gradients> {
        if cache.generation != self.generation || cache.inputs.len() != self.layers.len() {
            return Err(Error::contract("forward cache does not belong to these parameters"));
        }
        let batch = cache.inputs[0].nrows();
        if grad_q.dim() != (batch, self.output_dim()) {
            return Err(Error::contract(format!(
                "output gradient shape {:?} does not match ({batch}, {})",
                grad_q.dim(),
                self.output_dim()
            )));
        }
        let mut grads: Vec<Layer> = Vec::with_capacity(self.layers.len());
        let mut delta = grad_q.to_owned();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.inputs[i];
            grads.push(Layer {
                weights: delta.t().dot(input),
                biases: delta.sum_axis(Axis(0)),
            });
            if i > 0 {
                let mut back = delta.dot(&layer.weights);
                // relu'(z) is 1 exactly where the stored activation is positive
                ndarray::Zip::from(&mut back).and(input).for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
        }
        grads.reverse();
        Ok(Gradients { layers: grads })
    }
}
