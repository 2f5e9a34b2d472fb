//! Generative models of an `N`-channel system.
//!
//! Every channel is either good (`true`) or bad (`false`) in a slot. A
//! system state is packed into an index in `0..2^N` with channel 0 in the
//! most significant bit, so for `N = 2` the state "channel 0 good, channel 1
//! bad" (written `10`) has index 2.
//!
//! Structured models ([`FixedPatternModel`], [`CorrelatedChannelModel`],
//! [`SlidingWindowModel`], [`TraceModel`]) are sampled directly and only
//! materialize a [`JointMarkovModel`] on request through [`expand_to_joint`].

mod correlated;
mod env;
mod fixed_pattern;
mod joint;
mod trace;
mod window;

pub use correlated::{CorrelatedChannelModel, Correlation, DependentChannel};
pub use env::{ChannelEnv, ChannelModel, NonstationaryModel, StepOutcome};
pub use fixed_pattern::FixedPatternModel;
pub use joint::{build_joint_from_marginals, stationary_distribution, JointMarkovModel, TwoStateMatrix};
pub use trace::{load_trace, parse_trace, write_trace, TraceModel};
pub use window::SlidingWindowModel;

use crate::error::{Error, Result};

/// Largest channel count for which a joint `2^N`-state model may be built.
pub const MAX_JOINT_CHANNELS: usize = 20;

/// Good/bad state of every channel in one slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelState {
    bits: Vec<bool>,
}

impl ChannelState {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidModel("channel state must cover at least one channel".into()));
        }
        Ok(Self { bits })
    }

    pub fn all_bad(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    /// Decodes a packed state index.
    pub fn from_index(n: usize, index: usize) -> Self {
        let bits = (0..n).map(|k| state_bit(n, index, k)).collect();
        Self { bits }
    }

    pub fn to_index(&self) -> usize {
        let n = self.bits.len();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0, |acc, (k, _)| acc | (1 << (n - 1 - k)))
    }

    pub fn n_channels(&self) -> usize {
        self.bits.len()
    }

    pub fn is_good(&self, channel: usize) -> bool {
        self.bits[channel]
    }

    pub fn set(&mut self, channel: usize, good: bool) {
        self.bits[channel] = good;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn good_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// State of `channel` inside packed state `index` of an `n`-channel system.
#[inline]
pub fn state_bit(n: usize, index: usize, channel: usize) -> bool {
    (index >> (n - 1 - channel)) & 1 == 1
}

/// Bit mask selecting `channel` in a packed state index.
#[inline]
pub fn channel_mask(n: usize, channel: usize) -> usize {
    1 << (n - 1 - channel)
}

/// Materializes the `2^N`-state transition matrix of a structured model.
pub fn expand_to_joint(model: &ChannelModel) -> Result<JointMarkovModel> {
    match model {
        ChannelModel::FixedPattern(m) => m.to_joint(),
        ChannelModel::Correlated(m) => m.to_joint(),
        ChannelModel::Window(m) => m.to_joint(),
        ChannelModel::Joint(m) => Ok(m.clone()),
        ChannelModel::Trace(_) => Err(Error::InvalidModel(
            "a replayed trace has no transition matrix".into(),
        )),
        ChannelModel::Nonstationary(_) => Err(Error::InvalidModel(
            "a nonstationary model has no single transition matrix".into(),
        )),
    }
}

pub(crate) fn check_joint_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModel("model needs at least one channel".into()));
    }
    if n > MAX_JOINT_CHANNELS {
        return Err(Error::Capacity(format!(
            "{n} channels give 2^{n} joint states; the limit is {MAX_JOINT_CHANNELS} channels"
        )));
    }
    Ok(())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidModel(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}
