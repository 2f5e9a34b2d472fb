//! Belief filtering over the joint channel state and the Bellman machinery
//! built on it.
//!
//! A [`BeliefVector`] is a distribution over the `2^N` packed system states.
//! Sensing channel `k` and seeing `obs` conditions the belief on
//! `s_k = obs` ([`BeliefVector::observation_update`]); one slot of dynamics
//! maps the posterior through the transition matrix
//! ([`BeliefVector::transition_update`]).

mod fixed_pattern_q;
mod solver;

pub use fixed_pattern_q::{fixed_pattern_q, ActionClass, FixedPatternQTable};
pub use solver::{
    bellman_backup, exact_finite_horizon_solve, ExpectimaxSolver, ValueFunction, ZeroValue,
    MAX_EXACT_CHANNELS, MAX_EXACT_HORIZON,
};

use crate::channel::{channel_mask, stationary_distribution, JointMarkovModel, TwoStateMatrix};
use crate::error::{Error, Result};

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector {
    n_channels: usize,
    probs: Vec<f64>,
}

impl BeliefVector {
    pub fn new(n_channels: usize, probs: Vec<f64>) -> Result<Self> {
        let b = Self::checked_shape(n_channels, probs)?;
        let sum: f64 = b.probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidArgument(format!("belief sums to {sum}")));
        }
        Ok(b)
    }

    /// Normalizes a nonnegative mass vector.
    pub fn from_unnormalized(n_channels: usize, probs: Vec<f64>) -> Result<Self> {
        let mut b = Self::checked_shape(n_channels, probs)?;
        let sum: f64 = b.probs.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Numeric(format!("cannot normalize belief mass {sum}")));
        }
        b.probs.iter_mut().for_each(|p| *p /= sum);
        Ok(b)
    }

    fn checked_shape(n_channels: usize, probs: Vec<f64>) -> Result<Self> {
        let expected = 1usize << n_channels;
        if probs.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidArgument(format!("belief entry {p} is negative or NaN")));
        }
        Ok(Self { n_channels, probs })
    }

    pub fn uniform(n_channels: usize) -> Self {
        let s = 1usize << n_channels;
        Self {
            n_channels,
            probs: vec![1.0 / s as f64; s],
        }
    }

    /// All mass on one packed state.
    pub fn point(n_channels: usize, state: usize) -> Self {
        let mut probs = vec![0.0; 1 << n_channels];
        probs[state] = 1.0;
        Self { n_channels, probs }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that `channel` is good.
    pub fn marginal_good(&self, channel: usize) -> f64 {
        let mask = channel_mask(self.n_channels, channel);
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n_channels).map(|k| self.marginal_good(k)).collect()
    }

    /// Posterior after sensing `channel` and observing `observation`.
    pub fn observation_update(&self, channel: usize, observation: bool) -> Result<Self> {
        if channel >= self.n_channels {
            return Err(Error::InvalidArgument(format!(
                "channel {channel} outside 0..{}",
                self.n_channels
            )));
        }
        let mask = channel_mask(self.n_channels, channel);
        let consistent = |i: usize| (i & mask != 0) == observation;
        let likelihood: f64 = self
            .probs
            .iter()
            .enumerate()
            .filter(|(i, _)| consistent(*i))
            .map(|(_, p)| p)
            .sum();
        if !(likelihood > 0.0) {
            return Err(Error::ImpossibleObservation {
                channel,
                observation,
            });
        }
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| if consistent(i) { p / likelihood } else { 0.0 })
            .collect();
        Ok(Self {
            n_channels: self.n_channels,
            probs,
        })
    }

    /// One slot of dynamics, `belief * P`, renormalized against drift.
    pub fn transition_update(&self, model: &JointMarkovModel) -> Result<Self> {
        if model.n_channels() != self.n_channels {
            return Err(Error::Dimension {
                expected: self.n_channels,
                found: model.n_channels(),
            });
        }
        Self::from_unnormalized(self.n_channels, model.propagate(&self.probs))
    }

    /// Observation update followed by a transition update.
    pub fn sense_and_advance(
        &self,
        model: &JointMarkovModel,
        channel: usize,
        observation: bool,
    ) -> Result<Self> {
        self.observation_update(channel, observation)?
            .transition_update(model)
    }
}

/// Two-state chain seen by one channel of a joint model, obtained by
/// conditioning on the channel's current state under the stationary
/// distribution. Rows are indexed by the current state (0 = bad, 1 = good).
pub fn marginal_channel_chain(model: &JointMarkovModel, channel: usize) -> Result<TwoStateMatrix> {
    let n = model.n_channels();
    if channel >= n {
        return Err(Error::InvalidArgument(format!("channel {channel} outside 0..{n}")));
    }
    let pi = stationary_distribution(model)?;
    let mask = channel_mask(n, channel);
    let mut joint = [[0.0f64; 2]; 2];
    let mut mass = [0.0f64; 2];
    for (i, &w) in pi.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let from = (i & mask != 0) as usize;
        mass[from] += w;
        for (j, p) in model.row(i) {
            joint[from][(j & mask != 0) as usize] += w * p;
        }
    }
    let mut chain = [[0.0; 2]; 2];
    for from in 0..2 {
        if mass[from] <= 0.0 {
            return Err(Error::Numeric(format!(
                "channel {channel} is never {} under the stationary distribution; \
                 its transition row is undefined",
                if from == 1 { "good" } else { "bad" }
            )));
        }
        for to in 0..2 {
            chain[from][to] = joint[from][to] / mass[from];
        }
    }
    Ok(chain)
}

/// `sum_t gamma^(t-1) r_t` with the first reward undiscounted.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    rewards
        .iter()
        .rev()
        .fold(0.0, |acc, &r| r + gamma * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_joint_from_marginals, FixedPatternModel};

    #[test]
    fn uniform_observation_update() {
        let b = BeliefVector::uniform(2).observation_update(0, true).unwrap();
        assert_eq!(b.probs(), &[0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn concentrated_consistent_belief_unchanged() {
        let b = BeliefVector::point(2, 2);
        assert_eq!(b.observation_update(0, true).unwrap(), b);
    }

    #[test]
    fn bayes_collapses_onto_consistent_state() {
        // 0.3 on "10" (index 2) and 0.7 on "01" (index 1).
        let b = BeliefVector::new(2, vec![0.0, 0.7, 0.3, 0.0]).unwrap();
        let post = b.observation_update(0, true).unwrap();
        assert_eq!(post.probs(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn impossible_observation_is_an_error() {
        let b = BeliefVector::point(2, 2);
        assert!(matches!(
            b.observation_update(0, false),
            Err(Error::ImpossibleObservation { channel: 0, observation: false })
        ));
    }

    #[test]
    fn transition_update_single_channel() {
        let p = build_joint_from_marginals(&[[[0.2, 0.8], [0.1, 0.9]]]).unwrap();
        let b = BeliefVector::point(1, 0).transition_update(&p).unwrap();
        assert!((b.probs()[0] - 0.2).abs() < 1e-15);
        assert!((b.probs()[1] - 0.8).abs() < 1e-15);
        let id = JointMarkovModel::identity(2).unwrap();
        let u = BeliefVector::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(u.transition_update(&id).unwrap(), u);
        assert!(u.transition_update(&p).is_err());
    }

    #[test]
    fn marginal_chain_of_round_robin() {
        let p = 0.9;
        let joint = FixedPatternModel::round_robin(16, p).unwrap().to_joint().unwrap();
        let chain = marginal_channel_chain(&joint, 5).unwrap();
        assert!((chain[1][1] - (1.0 - p)).abs() < 1e-9);
        assert!((chain[0][1] - p / 15.0).abs() < 1e-9);
    }

    #[test]
    fn marginal_chain_of_identity() {
        let joint = JointMarkovModel::identity(3).unwrap();
        for k in 0..3 {
            let c = marginal_channel_chain(&joint, k).unwrap();
            assert_eq!(c, [[1.0, 0.0], [0.0, 1.0]]);
        }
    }

    #[test]
    fn marginal_chain_undefined_row() {
        // Channel 0 is always bad under this 1-channel model.
        let joint = JointMarkovModel::from_dense(1, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(marginal_channel_chain(&joint, 0).is_err());
    }

    #[test]
    fn discounted_returns() {
        assert_eq!(discounted_return(&[], 0.9), 0.0);
        assert!((discounted_return(&[1.0, -1.0], 0.9) - 0.1).abs() < 1e-15);
        let ones = vec![1.0; 400];
        assert!((discounted_return(&ones, 0.9) - 10.0).abs() < 0.9f64.powi(400) * 10.0 + 1e-12);
    }
}
