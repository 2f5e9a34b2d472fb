use rand::SeedableRng;

use super::derive_seed;
use super::eval::{evaluate_agent, EvalSpec};
use super::multi_user::MultiUserTask;
use crate::channel::{ChannelEnv, ChannelModel};
use crate::error::Result;
use crate::nn::{
    dqn_train, sample_probe_states, AccessTask, CurvePoint, DqnAgent, DqnConfig, DqnTrainer,
    SingleUserTask, TrainSchedule,
};
use crate::SimRng;

/// Everything needed to train one Q-network.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSetup {
    pub dqn: DqnConfig,
    /// History length `M`; `None` uses one slot per channel.
    pub window: Option<usize>,
    pub schedule: TrainSchedule,
    pub iterations: usize,
    /// Protocol for the per-iteration learning-curve evaluation.
    pub curve_eval: EvalSpec,
    pub probe_count: usize,
    pub probe_rollout: usize,
}

#[derive(Debug, Clone)]
pub struct TrainedAgent {
    pub agent: DqnAgent,
    pub window: usize,
    pub curve: Vec<CurvePoint>,
}

pub(crate) mod streams {
    pub const INIT: u64 = 1;
    pub const TRAIN_ENV: u64 = 2;
    pub const TRAINER: u64 = 3;
    pub const PROBES: u64 = 4;
    pub const CURVE_EVAL: u64 = 5;
    pub const FINAL_EVAL: u64 = 6;
    pub const ESTIMATE: u64 = 7;
}

pub(crate) fn make_env(model: &ChannelModel, seed: u64, episode_len: usize) -> Result<ChannelEnv> {
    let mut env = ChannelEnv::new(model.clone(), seed)?;
    if matches!(model, ChannelModel::Trace(_)) {
        env.randomize_trace_start(episode_len);
    }
    Ok(env)
}

/// Trains on `train_task`, evaluating greedily on `eval_task` after every
/// iteration.
pub fn train_dqn_on_task<T: AccessTask>(
    train_task: T,
    eval_task: &mut T,
    probe_task: &mut T,
    setup: &LearnerSetup,
    seed: u64,
) -> Result<TrainedAgent> {
    let window = setup.window.unwrap_or(train_task.n_channels());
    let n_inputs = window * train_task.n_channels();
    let mut init_rng = SimRng::seed_from_u64(derive_seed(seed, streams::INIT));
    let mut agent = DqnAgent::new(n_inputs, train_task.n_actions(), setup.dqn.clone(), &mut init_rng)?;
    let probes = if setup.probe_count > 0 {
        sample_probe_states(
            probe_task,
            window,
            setup.probe_count,
            setup.probe_rollout,
            derive_seed(seed, streams::PROBES),
        )?
    } else {
        Vec::new()
    };
    let mut trainer = DqnTrainer::new(
        train_task,
        window,
        setup.schedule.clone(),
        derive_seed(seed, streams::TRAINER),
    )?;
    let eval_seed = derive_seed(seed, streams::CURVE_EVAL);
    let spec = setup.curve_eval;
    let curve = dqn_train(&mut agent, &mut trainer, setup.iterations, &probes, &mut |a| {
        Ok(evaluate_agent(a, eval_task, window, &spec, eval_seed)?.mean_return)
    })?;
    Ok(TrainedAgent {
        agent,
        window,
        curve,
    })
}

/// Single-user DQN training on `model`.
pub fn train_dqn(model: &ChannelModel, setup: &LearnerSetup, seed: u64) -> Result<TrainedAgent> {
    let len = setup.curve_eval.length;
    let ep = setup.schedule.episode_length.unwrap_or(len);
    let task = |stream: u64, l: usize| -> Result<SingleUserTask> {
        Ok(SingleUserTask::new(make_env(model, derive_seed(seed, stream), l)?))
    };
    train_dqn_on_task(
        task(streams::TRAIN_ENV, ep)?,
        &mut task(streams::CURVE_EVAL, len)?,
        &mut task(streams::PROBES, setup.probe_rollout + ep)?,
        setup,
        seed,
    )
}

/// Centralized DQN over `C(N, users)` channel subsets.
pub fn multi_user_train(
    model: &ChannelModel,
    users: usize,
    setup: &LearnerSetup,
    seed: u64,
) -> Result<TrainedAgent> {
    let len = setup.curve_eval.length;
    let ep = setup.schedule.episode_length.unwrap_or(len);
    let task = |stream: u64, l: usize| -> Result<MultiUserTask> {
        MultiUserTask::new(make_env(model, derive_seed(seed, stream), l)?, users)
    };
    train_dqn_on_task(
        task(streams::TRAIN_ENV, ep)?,
        &mut task(streams::CURVE_EVAL, len)?,
        &mut task(streams::PROBES, setup.probe_rollout + ep)?,
        setup,
        seed,
    )
}
