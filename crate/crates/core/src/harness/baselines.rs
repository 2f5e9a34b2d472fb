use super::learn::make_env;
use crate::belief::BeliefVector;
use crate::channel::{expand_to_joint, stationary_distribution, ChannelModel};
use crate::error::{Error, Result};
use crate::policy::{
    mle_estimate_chain, AccessPolicy, CorrelatedMyopicPolicy, GeniePolicy, GilbertElliotChain,
    MyopicPolicy, RandomPolicy, WhittlePolicy,
};

/// Largest system for which the myopic genie filters the dense joint belief.
pub const MAX_DENSE_MYOPIC_CHANNELS: usize = 12;

/// Per-channel two-state chains fitted by maximum likelihood. A trace is fit
/// on each channel's full series; otherwise channel `k` is watched during
/// slots `[k T, (k + 1) T)` of one simulated run with `T = slots_per_channel`.
pub fn estimate_chains(
    model: &ChannelModel,
    slots_per_channel: usize,
    seed: u64,
) -> Result<Vec<GilbertElliotChain>> {
    if let ChannelModel::Trace(t) = model {
        return (0..t.n_channels())
            .map(|c| Ok(mle_estimate_chain(&t.channel_series(c))?.chain))
            .collect();
    }
    if slots_per_channel < 2 {
        return Err(Error::InvalidArgument("chain estimation needs at least 2 slots".into()));
    }
    let mut env = make_env(model, seed, 0)?;
    let mut chains = Vec::with_capacity(model.n_channels());
    for c in 0..model.n_channels() {
        let mut series = Vec::with_capacity(slots_per_channel);
        for _ in 0..slots_per_channel {
            series.push(env.full_state().is_good(c));
            env.advance()?;
        }
        chains.push(mle_estimate_chain(&series)?.chain);
    }
    Ok(chains)
}

/// Whittle-index heuristic that treats channels as independent chains
/// estimated with [`estimate_chains`].
pub fn whittle_heuristic(
    model: &ChannelModel,
    slots_per_channel: usize,
    gamma: f64,
    seed: u64,
) -> Result<WhittlePolicy> {
    WhittlePolicy::new(&estimate_chains(model, slots_per_channel, seed)?, gamma)
}

/// Myopic policy with full knowledge of the dynamics.
pub fn myopic_genie(model: &ChannelModel) -> Result<Box<dyn AccessPolicy>> {
    match model {
        ChannelModel::Correlated(m) => Ok(Box::new(CorrelatedMyopicPolicy::new(m.clone()))),
        m if m.n_channels() <= MAX_DENSE_MYOPIC_CHANNELS => {
            let joint = expand_to_joint(m)?;
            let initial: BeliefVector = stationary_distribution(&joint)?;
            Ok(Box::new(MyopicPolicy::new(joint, initial)))
        }
        m => Err(Error::Capacity(format!(
            "myopic genie on {} channels needs a correlated model or at most {} channels",
            m.n_channels(),
            MAX_DENSE_MYOPIC_CHANNELS
        ))),
    }
}

/// Non-learning policies by name: `genie`, `myopic`, `whittle`, `random`.
pub fn build_baseline(
    name: &str,
    model: &ChannelModel,
    gamma: f64,
    slots_per_channel: usize,
    seed: u64,
) -> Result<Box<dyn AccessPolicy>> {
    match name {
        "genie" => match model {
            ChannelModel::FixedPattern(m) => Ok(Box::new(GeniePolicy::new(m.clone()))),
            _ => Err(Error::Config("the genie policy needs a fixed-pattern model".into())),
        },
        "myopic" => myopic_genie(model),
        "whittle" => Ok(Box::new(whittle_heuristic(model, slots_per_channel, gamma, seed)?)),
        "random" => Ok(Box::new(RandomPolicy::new(model.n_channels())?)),
        other => Err(Error::Config(format!("unknown policy `{other}`"))),
    }
}
