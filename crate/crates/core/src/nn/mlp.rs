use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::distributions::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::SimRng;

/// Network shapes used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Two hidden layers of 200 units, learning rate `1e-4`.
    Wide2,
    /// Three hidden layers of 50 units, learning rate `1e-5`.
    Deep3,
}

impl Preset {
    pub fn hidden(self) -> Vec<usize> {
        match self {
            Preset::Wide2 => vec![200, 200],
            Preset::Deep3 => vec![50, 50, 50],
        }
    }

    pub fn learning_rate(self) -> f64 {
        match self {
            Preset::Wide2 => 1e-4,
            Preset::Deep3 => 1e-5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Wide2 => "wide2",
            Preset::Deep3 => "deep3",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide2" => Ok(Preset::Wide2),
            "deep3" => Ok(Preset::Deep3),
            other => Err(Error::Config(format!("unknown network preset `{other}`"))),
        }
    }
}

/// Fully connected network: rectified hidden layers, linear output.
/// Weight matrix `l` is `sizes[l] x sizes[l + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

/// Parameter-shaped gradient (or moment) buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            weights: net.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            biases: net.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        }
    }

    /// All entries, layer by layer, weights before biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid layer sizes {sizes:?}")));
    }
    Ok(())
}

fn check_finite(a: &Array2<f64>, layer: usize) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite activation in layer {layer}")))
    }
}

impl Mlp {
    /// Weights uniform in `+-sqrt(6 / (fan_in + fan_out))`, biases zero.
    pub fn new(sizes: &[usize], rng: &mut SimRng) -> Result<Self> {
        check_sizes(sizes)?;
        let weights = sizes
            .windows(2)
            .map(|w| {
                let bound = (6.0 / (w[0] + w[1]) as f64).sqrt();
                let dist = Uniform::new_inclusive(-bound, bound);
                Array2::from_shape_simple_fn((w[0], w[1]), || dist.sample(rng))
            })
            .collect();
        let biases = sizes[1..].iter().map(|&n| Array1::zeros(n)).collect();
        Ok(Self {
            sizes: sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        check_sizes(sizes)?;
        Ok(Self {
            sizes: sizes.to_vec(),
            weights: sizes.windows(2).map(|w| Array2::zeros((w[0], w[1]))).collect(),
            biases: sizes[1..].iter().map(|&n| Array1::zeros(n)).collect(),
        })
    }

    pub fn from_parts(weights: Vec<Array2<f64>>, biases: Vec<Array1<f64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::InvalidArgument("weights and biases must pair up".into()));
        }
        let mut sizes = vec![weights[0].nrows()];
        for (w, b) in weights.iter().zip(&biases) {
            if w.nrows() != *sizes.last().unwrap() || w.ncols() != b.len() {
                return Err(Error::Dimension {
                    expected: *sizes.last().unwrap(),
                    found: w.nrows(),
                });
            }
            sizes.push(w.ncols());
        }
        check_sizes(&sizes)?;
        Ok(Self {
            sizes,
            weights,
            biases,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_inputs(&self) -> usize {
        self.sizes[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Same layout as [`Gradients::flatten`].
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Dimension {
                expected: self.n_params(),
                found: flat.len(),
            });
        }
        let mut it = flat.iter();
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            w.iter_mut().chain(b.iter_mut()).for_each(|x| *x = *it.next().unwrap());
        }
        Ok(())
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [Array2<f64>], &mut [Array1<f64>]) {
        (&mut self.weights, &mut self.biases)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.n_inputs() {
            return Err(Error::Dimension {
                expected: self.n_inputs(),
                found: input.len(),
            });
        }
        // History inputs are mostly zero, so the first layer sums only the
        // rows of active inputs.
        let last = self.weights.len() - 1;
        let mut a = self.biases[0].clone();
        for (i, &x) in input.iter().enumerate() {
            if x != 0.0 {
                a.scaled_add(x, &self.weights[0].row(i));
            }
        }
        for l in 0..=last {
            if l > 0 {
                a = a.dot(&self.weights[l]) + &self.biases[l];
            }
            if l < last {
                a.mapv_inplace(|x| x.max(0.0));
            }
            if !a.iter().all(|x| x.is_finite()) {
                return Err(Error::Numeric(format!("non-finite activation in layer {l}")));
            }
        }
        Ok(a.to_vec())
    }

    /// One output row per input row.
    pub fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(self.activations(inputs)?.pop().unwrap())
    }

    /// Inputs of every layer followed by the output; hidden entries are
    /// post-rectification.
    fn activations(&self, inputs: ArrayView2<f64>) -> Result<Vec<Array2<f64>>> {
        if inputs.ncols() != self.n_inputs() {
            return Err(Error::Dimension {
                expected: self.n_inputs(),
                found: inputs.ncols(),
            });
        }
        let last = self.weights.len() - 1;
        let mut acts = Vec::with_capacity(self.weights.len() + 1);
        acts.push(inputs.to_owned());
        for l in 0..=last {
            let mut a = acts[l].dot(&self.weights[l]) + &self.biases[l];
            if l < last {
                a.mapv_inplace(|x| x.max(0.0));
            }
            check_finite(&a, l)?;
            acts.push(a);
        }
        Ok(acts)
    }

    /// Mean squared error over the taken actions only:
    /// `(1/B) sum_b (targets[b] - Q(inputs[b], actions[b]))^2`.
    pub fn loss(&self, inputs: ArrayView2<f64>, actions: &[usize], targets: &[f64]) -> Result<f64> {
        self.check_batch(inputs, actions, targets)?;
        let out = self.forward_batch(inputs)?;
        Ok(batch_loss(&out, actions, targets))
    }

    /// Loss and its gradient with respect to every parameter.
    pub fn gradients(
        &self,
        inputs: ArrayView2<f64>,
        actions: &[usize],
        targets: &[f64],
    ) -> Result<(f64, Gradients)> {
        self.check_batch(inputs, actions, targets)?;
        let acts = self.activations(inputs)?;
        let out = acts.last().unwrap();
        let loss = batch_loss(out, actions, targets);
        let batch = actions.len() as f64;
        let mut delta = Array2::<f64>::zeros(out.raw_dim());
        for (b, (&a, &y)) in actions.iter().zip(targets).enumerate() {
            delta[[b, a]] = 2.0 * (out[[b, a]] - y) / batch;
        }
        let n_layers = self.weights.len();
        let mut gw = Vec::with_capacity(n_layers);
        let mut gb = Vec::with_capacity(n_layers);
        for l in (0..n_layers).rev() {
            let input = &acts[l];
            gw.push(input.t().dot(&delta));
            gb.push(delta.sum_axis(Axis(0)));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l].t());
                Zip::from(&mut back).and(input).for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
        }
        gw.reverse();
        gb.reverse();
        Ok((
            loss,
            Gradients {
                weights: gw,
                biases: gb,
            },
        ))
    }

    fn check_batch(&self, inputs: ArrayView2<f64>, actions: &[usize], targets: &[f64]) -> Result<()> {
        if actions.is_empty() || actions.len() != targets.len() || actions.len() != inputs.nrows() {
            return Err(Error::InvalidArgument(format!(
                "batch of {} inputs, {} actions, {} targets",
                inputs.nrows(),
                actions.len(),
                targets.len()
            )));
        }
        if let Some(&a) = actions.iter().find(|&&a| a >= self.n_outputs()) {
            return Err(Error::InvalidArgument(format!(
                "action {a} outside outputs 0..{}",
                self.n_outputs()
            )));
        }
        Ok(())
    }
}

fn batch_loss(out: &Array2<f64>, actions: &[usize], targets: &[f64]) -> f64 {
    let sum: f64 = actions
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(b, (&a, &y))| (y - out[[b, a]]).powi(2))
        .sum();
    sum / actions.len() as f64
}
