use crate::agent::{Gradients, Layer, MlpParams};
use crate::error::{Error, Result};

/// Bias-corrected Adam moments for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<Layer>,
    pub second_moment: Vec<Layer>,
    pub timestep: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &MlpParams, lr: f64) -> Self {
        let zeros: Vec<Layer> = params
            .layers()
            .iter()
            .map(|l| Layer::zeros(l.inputs(), l.outputs()))
            .collect();
        Self {
            first_moment: zeros.clone(),
            second_moment: zeros,
            timestep: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// One update of `params` in place.
    pub fn step(&mut self, params: &mut MlpParams, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != params.layers().len()
            || grads.layers.iter().zip(params.layers()).any(|(g, p)| g.weights.dim() != p.weights.dim())
        {
            return Err(Error::contract("gradient shapes do not match parameters"));
        }
        if !grads.is_finite() {
            return Err(Error::Training(format!(
                "non-finite gradient at Adam step {}",
                self.timestep + 1
            )));
        }
        self.timestep += 1;
        let t = self.timestep as i32;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        let lr = self.lr;
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        let layers = params.layers_mut();
        for (i, layer) in layers.iter_mut().enumerate() {
            let (m, v, g) = (&mut self.first_moment[i], &mut self.second_moment[i], &grads.layers[i]);
            ndarray::Zip::from(&mut layer.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .and(&g.weights)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            ndarray::Zip::from(&mut layer.biases)
                .and(&mut m.biases)
                .and(&mut v.biases)
                .and(&g.biases)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
        Ok(())
    }
}
