use ndarray::Zip;

use super::mlp::{Gradients, Mlp};
use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Bias-corrected Adam moments.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first: Gradients,
    pub second: Gradients,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(net: &Mlp) -> Self {
        Self {
            first: Gradients::zeros_like(net),
            second: Gradients::zeros_like(net),
            step: 0,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            epsilon: ADAM_EPSILON,
        }
    }

    /// One descent step on `net` along `grads`.
    pub fn update(&mut self, net: &mut Mlp, grads: &Gradients, lr: f64) -> Result<()> {
        if grads.weights.len() != self.first.weights.len()
            || grads
                .weights
                .iter()
                .zip(&self.first.weights)
                .any(|(g, m)| g.dim() != m.dim())
        {
            return Err(Error::InvalidArgument("gradient shape does not match the network".into()));
        }
        self.step += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        let c1 = 1.0 - b1.powf(self.step as f64);
        let c2 = 1.0 - b2.powf(self.step as f64);
        let (weights, biases) = net.parts_mut();
        let apply = |p: &mut f64, m: &mut f64, v: &mut f64, &g: &f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        };
        for l in 0..weights.len() {
            Zip::from(&mut weights[l])
                .and(&mut self.first.weights[l])
                .and(&mut self.second.weights[l])
                .and(&grads.weights[l])
                .for_each(apply);
            Zip::from(&mut biases[l])
                .and(&mut self.first.biases[l])
                .and(&mut self.second.biases[l])
                .and(&grads.biases[l])
                .for_each(apply);
        }
        Ok(())
    }
}
