//! Channel-selection policies that do not learn a neural model: uniform
//! random, the genie myopic policy, the Whittle-index heuristic and the
//! optimal fixed-pattern genie.

mod genie;
mod mle;
mod myopic;
mod whittle;

pub use genie::{GeniePolicy, SwitchRegime};
pub use mle::{mle_estimate_chain, MleEstimate};
pub use myopic::{
    myopic_action, myopic_action_from_marginals, CorrelatedMyopicPolicy, MyopicPolicy,
};
pub use whittle::{
    per_channel_belief_step, whittle_index, whittle_policy_action, GilbertElliotChain,
    PerChannelBelief, WhittleIndexer, WhittlePolicy,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::SimRng;

/// A policy driven slot by slot: `act` picks the channel to sense, `observe`
/// reports what was seen on it.
pub trait AccessPolicy {
    fn name(&self) -> &str;

    fn n_channels(&self) -> usize;

    /// Prepares for a fresh episode.
    fn reset(&mut self) -> Result<()>;

    fn act(&mut self, rng: &mut SimRng) -> Result<usize>;

    fn observe(&mut self, action: usize, observation: bool) -> Result<()>;
}

/// Uniform channel choice.
pub fn random_action(n_channels: usize, rng: &mut SimRng) -> usize {
    rng.gen_range(0..n_channels)
}

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    n_channels: usize,
}

impl RandomPolicy {
    pub fn new(n_channels: usize) -> Result<Self> {
        if n_channels == 0 {
            return Err(Error::InvalidArgument("random policy needs at least one channel".into()));
        }
        Ok(Self { n_channels })
    }
}

impl AccessPolicy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn n_channels(&self) -> usize {
        self.n_channels
    }

    fn reset(&mut self) -> Result<()> {
        Ok(())
    }

    fn act(&mut self, rng: &mut SimRng) -> Result<usize> {
        Ok(random_action(self.n_channels, rng))
    }

    fn observe(&mut self, _action: usize, _observation: bool) -> Result<()> {
        Ok(())
    }
}

/// Index of the largest value; values within `tolerance` of the maximum tie
/// and the lowest index wins.
pub fn argmax_lowest(values: &[f64], tolerance: f64) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .position(|&v| v >= max - tolerance)
        .unwrap_or(0)
}
