use ndarray::Array2;
use rand::Rng;

use super::adam::AdamState;
use super::mlp::{Mlp, Preset};
use super::replay::ReplayBuffer;
use crate::error::{Error, Result};
use crate::policy::argmax_lowest;
use crate::SimRng;

pub const DEFAULT_MINIBATCH: usize = 32;
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Learning hyperparameters of a [`DqnAgent`].
#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub gamma: f64,
    pub batch_size: usize,
    /// Period, in training steps, of a separately held target network.
    /// `None` bootstraps from the parameters as they were at the start of
    /// each step.
    pub target_sync: Option<u64>,
    /// Largest tolerated `|Q|` before training is declared divergent.
    pub divergence_bound: f64,
}

impl DqnConfig {
    pub fn from_preset(preset: Preset, gamma: f64) -> Self {
        Self {
            hidden: preset.hidden(),
            learning_rate: preset.learning_rate(),
            gamma,
            batch_size: DEFAULT_MINIBATCH,
            target_sync: None,
            divergence_bound: 2.0 / (1.0 - gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("discount {} outside [0, 1)", self.gamma)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 || self.target_sync == Some(0) {
            return Err(Error::InvalidArgument(
                "minibatch size and target period must be positive".into(),
            ));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::InvalidArgument("divergence bound must be positive".into()));
        }
        Ok(())
    }
}

/// Q-network over history states with Adam and epsilon-greedy control.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    online: Mlp,
    target: Option<Mlp>,
    adam: AdamState,
    config: DqnConfig,
}

fn to_input(state: &[i8]) -> Vec<f64> {
    state.iter().map(|&x| f64::from(x)).collect()
}

impl DqnAgent {
    pub fn new(n_inputs: usize, n_actions: usize, config: DqnConfig, rng: &mut SimRng) -> Result<Self> {
        config.validate()?;
        let mut sizes = vec![n_inputs];
        sizes.extend(&config.hidden);
        sizes.push(n_actions);
        let online = Mlp::new(&sizes, rng)?;
        Self::from_parts(online, None, None, config)
    }

    /// Reassembles an agent; a missing Adam state starts fresh.
    pub fn from_parts(
        online: Mlp,
        target: Option<Mlp>,
        adam: Option<AdamState>,
        config: DqnConfig,
    ) -> Result<Self> {
        config.validate()?;
        let target = match (config.target_sync, target) {
            (Some(_), Some(t)) => Some(t),
            (Some(_), None) => Some(online.clone()),
            (None, _) => None,
        };
        let adam = adam.unwrap_or_else(|| AdamState::new(&online));
        Ok(Self {
            online,
            target,
            adam,
            config,
        })
    }

    pub fn network(&self) -> &Mlp {
        &self.online
    }

    pub fn target_network(&self) -> Option<&Mlp> {
        self.target.as_ref()
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn config(&self) -> &DqnConfig {
        &self.config
    }

    pub fn n_actions(&self) -> usize {
        self.online.n_outputs()
    }

    pub fn n_inputs(&self) -> usize {
        self.online.n_inputs()
    }

    /// Number of gradient updates applied so far.
    pub fn train_steps(&self) -> u64 {
        self.adam.step
    }

    fn watchdog(&self, values: impl IntoIterator<Item = f64>) -> Result<()> {
        let bound = self.config.divergence_bound;
        match values.into_iter().find(|v| v.abs() > bound) {
            Some(value) => Err(Error::Divergence { value, bound }),
            None => Ok(()),
        }
    }

    pub fn q_values(&self, state: &[i8]) -> Result<Vec<f64>> {
        let q = self.online.forward(&to_input(state))?;
        self.watchdog(q.iter().copied())?;
        Ok(q)
    }

    pub fn max_q(&self, state: &[i8]) -> Result<f64> {
        Ok(self.q_values(state)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Largest Q-value, lowest action on ties.
    pub fn greedy_action(&self, state: &[i8]) -> Result<usize> {
        Ok(argmax_lowest(&self.q_values(state)?, 0.0))
    }

    /// Uniform action with probability `epsilon`, greedy otherwise.
    pub fn act(&self, state: &[i8], epsilon: f64, rng: &mut SimRng) -> Result<usize> {
        if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
            Ok(rng.gen_range(0..self.n_actions()))
        } else {
            self.greedy_action(state)
        }
    }

    /// One Adam step on a uniformly drawn minibatch. Targets
    /// `r + gamma * max_a' Q(x', a')` use the parameters held before the
    /// step (or the target network when one is configured). Returns the
    /// minibatch loss.
    pub fn train_step(&mut self, replay: &ReplayBuffer, rng: &mut SimRng) -> Result<f64> {
        if replay.state_width() != self.n_inputs() {
            return Err(Error::Dimension {
                expected: self.n_inputs(),
                found: replay.state_width(),
            });
        }
        let b = self.config.batch_size;
        let slots = replay.sample_slots(b, rng)?;
        let w = self.n_inputs();
        let mut x = Array2::<f64>::zeros((b, w));
        let mut xn = Array2::<f64>::zeros((b, w));
        let mut actions = Vec::with_capacity(b);
        for (row, &s) in slots.iter().enumerate() {
            for (dst, &v) in x.row_mut(row).iter_mut().zip(replay.state(s)) {
                *dst = f64::from(v);
            }
            for (dst, &v) in xn.row_mut(row).iter_mut().zip(replay.next_state(s)) {
                *dst = f64::from(v);
            }
            actions.push(replay.action(s));
        }
        let bootstrap = self.target.as_ref().unwrap_or(&self.online);
        let qn = bootstrap.forward_batch(xn.view())?;
        self.watchdog(qn.iter().copied())?;
        let gamma = self.config.gamma;
        let targets: Vec<f64> = slots
            .iter()
            .enumerate()
            .map(|(row, &s)| {
                let best = qn.row(row).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                replay.reward(s) + gamma * best
            })
            .collect();
        let (loss, grads) = self.online.gradients(x.view(), &actions, &targets)?;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("non-finite loss {loss}")));
        }
        self.adam.update(&mut self.online, &grads, self.config.learning_rate)?;
        if let (Some(period), Some(t)) = (self.config.target_sync, self.target.as_mut()) {
            if self.adam.step % period == 0 {
                *t = self.online.clone();
            }
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn small_config(gamma: f64) -> DqnConfig {
        DqnConfig {
            hidden: vec![16, 16],
            learning_rate: 1e-3,
            ..DqnConfig::from_preset(Preset::Wide2, gamma)
        }
    }

    #[test]
    fn epsilon_extremes() {
        let mut rng = SimRng::seed_from_u64(4);
        let agent = DqnAgent::new(6, 3, small_config(0.9), &mut rng).unwrap();
        let s = [1, 0, 0, 0, -1, 0];
        let g = agent.greedy_action(&s).unwrap();
        assert!((0..100).all(|_| agent.act(&s, 0.0, &mut rng).unwrap() == g));
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            counts[agent.act(&s, 1.0, &mut rng).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| (800..1200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn repeated_transition_loss_decreases() {
        let mut rng = SimRng::seed_from_u64(9);
        let mut agent = DqnAgent::new(4, 2, small_config(0.0), &mut rng).unwrap();
        let mut replay = ReplayBuffer::new(100, 4).unwrap();
        for _ in 0..40 {
            replay.push(&[1, 0, -1, 0], 1, 1.0, &[0, 1, 0, -1]).unwrap();
        }
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let loss = agent.train_step(&replay, &mut rng).unwrap();
            assert!(loss < last, "{loss} >= {last}");
            last = loss;
        }
    }

    #[test]
    fn not_ready_until_minibatch_available() {
        let mut rng = SimRng::seed_from_u64(1);
        let mut agent = DqnAgent::new(2, 2, small_config(0.9), &mut rng).unwrap();
        let mut replay = ReplayBuffer::new(100, 2).unwrap();
        replay.push(&[1, 0], 0, 1.0, &[0, 1]).unwrap();
        assert!(matches!(agent.train_step(&replay, &mut rng), Err(Error::NotReady { .. })));
    }

    #[test]
    fn watchdog_flags_large_values() {
        let mut rng = SimRng::seed_from_u64(1);
        let mut cfg = small_config(0.9);
        cfg.hidden = vec![];
        let agent = DqnAgent::new(1, 1, cfg.clone(), &mut rng).unwrap();
        let mut net = agent.network().clone();
        net.set_params(&[30.0, 0.0]).unwrap();
        let agent = DqnAgent::from_parts(net, None, None, cfg).unwrap();
        assert!(matches!(agent.q_values(&[1]), Err(Error::Divergence { .. })));
        assert!(agent.q_values(&[0]).is_ok());
    }
}
