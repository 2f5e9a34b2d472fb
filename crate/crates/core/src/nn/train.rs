use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

use super::dqn::{DqnAgent, DEFAULT_EPSILON};
use super::history::HistoryState;
use super::replay::{ReplayBuffer, DEFAULT_REPLAY_CAPACITY};
use super::tabular::TabularQ;
use crate::channel::ChannelEnv;
use crate::error::{Error, Result};
use crate::policy::AccessPolicy;
use crate::SimRng;

pub const STEPS_PER_ITERATION: usize = 1_000;
pub const DEFAULT_EPISODE_LENGTH: usize = 100;

/// Result of one slot of a learning task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskStep {
    pub reward: f64,
    /// `(channel, good)` for every sensed channel.
    pub sensed: Vec<(usize, bool)>,
}

/// Environment seen by a learner: discrete actions, each sensing one or more
/// channels.
pub trait AccessTask {
    fn n_channels(&self) -> usize;

    fn n_actions(&self) -> usize;

    fn reset(&mut self) -> Result<()>;

    fn step(&mut self, action: usize) -> Result<TaskStep>;
}

/// One user, one action per channel.
#[derive(Debug, Clone)]
pub struct SingleUserTask {
    env: ChannelEnv,
}

impl SingleUserTask {
    pub fn new(env: ChannelEnv) -> Self {
        Self { env }
    }

    pub fn env(&self) -> &ChannelEnv {
        &self.env
    }

    pub fn env_mut(&mut self) -> &mut ChannelEnv {
        &mut self.env
    }

    pub fn into_env(self) -> ChannelEnv {
        self.env
    }
}

impl AccessTask for SingleUserTask {
    fn n_channels(&self) -> usize {
        self.env.n_channels()
    }

    fn n_actions(&self) -> usize {
        self.env.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.env.reset()
    }

    fn step(&mut self, action: usize) -> Result<TaskStep> {
        let o = self.env.step(action)?;
        Ok(TaskStep {
            reward: o.reward,
            sensed: vec![(action, o.observation)],
        })
    }
}

/// Interaction schedule of [`DqnTrainer`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSchedule {
    pub steps_per_iteration: usize,
    /// Replay size at which gradient steps begin.
    pub learning_starts: usize,
    /// Environment and history are reset after this many slots.
    pub episode_length: Option<usize>,
    pub epsilon: f64,
    pub replay_capacity: usize,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self {
            steps_per_iteration: STEPS_PER_ITERATION,
            learning_starts: STEPS_PER_ITERATION,
            episode_length: Some(DEFAULT_EPISODE_LENGTH),
            epsilon: DEFAULT_EPSILON,
            replay_capacity: DEFAULT_REPLAY_CAPACITY,
        }
    }
}

/// One learning-curve point, taken after `iteration` training iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    pub env_steps: u64,
    pub mean_return: f64,
    pub avg_max_q: f64,
}

/// Drives an agent through a task: epsilon-greedy interaction, replay
/// storage and one gradient step per environment step once the replay is
/// warm.
#[derive(Debug, Clone)]
pub struct DqnTrainer<T: AccessTask> {
    task: T,
    replay: ReplayBuffer,
    history: HistoryState,
    schedule: TrainSchedule,
    rng: SimRng,
    env_steps: u64,
    episode_step: usize,
}

impl<T: AccessTask> DqnTrainer<T> {
    pub fn new(mut task: T, window: usize, schedule: TrainSchedule, seed: u64) -> Result<Self> {
        if schedule.steps_per_iteration == 0 || schedule.episode_length == Some(0) {
            return Err(Error::InvalidArgument(
                "iteration and episode lengths must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&schedule.epsilon) {
            return Err(Error::InvalidArgument(format!(
                "exploration rate {} outside [0, 1]",
                schedule.epsilon
            )));
        }
        let history = HistoryState::new(task.n_channels(), window)?;
        let replay = ReplayBuffer::new(schedule.replay_capacity, history.width())?;
        task.reset()?;
        Ok(Self {
            task,
            replay,
            history,
            schedule,
            rng: SimRng::seed_from_u64(seed),
            env_steps: 0,
            episode_step: 0,
        })
    }

    pub fn task(&self) -> &T {
        &self.task
    }

    pub fn task_mut(&mut self) -> &mut T {
        &mut self.task
    }

    pub fn replay(&self) -> &ReplayBuffer {
        &self.replay
    }

    pub fn schedule(&self) -> &TrainSchedule {
        &self.schedule
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn clear_replay(&mut self) {
        self.replay.clear();
    }

    pub fn reset_episode(&mut self) -> Result<()> {
        self.task.reset()?;
        self.history.clear();
        self.episode_step = 0;
        Ok(())
    }

    fn check_agent(&self, agent: &DqnAgent) -> Result<()> {
        if agent.n_inputs() != self.history.width() || agent.n_actions() != self.task.n_actions() {
            return Err(Error::Dimension {
                expected: self.history.width(),
                found: agent.n_inputs(),
            });
        }
        Ok(())
    }

    pub fn run_steps(&mut self, agent: &mut DqnAgent, steps: usize) -> Result<()> {
        self.check_agent(agent)?;
        let warm = self.schedule.learning_starts.max(agent.config().batch_size);
        for _ in 0..steps {
            let state = self.history.as_slice().to_vec();
            let action = agent.act(&state, self.schedule.epsilon, &mut self.rng)?;
            let outcome = self.task.step(action)?;
            self.history.push_multi(&outcome.sensed)?;
            self.replay
                .push(&state, action, outcome.reward, self.history.as_slice())?;
            self.env_steps += 1;
            self.episode_step += 1;
            if self.replay.len() >= warm {
                agent.train_step(&self.replay, &mut self.rng)?;
            }
            if Some(self.episode_step) == self.schedule.episode_length {
                self.reset_episode()?;
            }
        }
        Ok(())
    }

    pub fn run_iteration(&mut self, agent: &mut DqnAgent) -> Result<()> {
        self.run_steps(agent, self.schedule.steps_per_iteration)
    }
}

/// Mean over probe histories of the largest Q-value; 0 for no probes.
pub fn track_max_q(agent: &DqnAgent, probes: &[HistoryState]) -> Result<f64> {
    if probes.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for p in probes {
        total += agent.max_q(p.as_slice())?;
    }
    Ok(total / probes.len() as f64)
}

/// Trains for `iterations` iterations, evaluating before the first and after
/// every iteration. `evaluate` maps the current agent to an evaluated return.
pub fn dqn_train<T: AccessTask>(
    agent: &mut DqnAgent,
    trainer: &mut DqnTrainer<T>,
    iterations: usize,
    probes: &[HistoryState],
    evaluate: &mut dyn FnMut(&DqnAgent) -> Result<f64>,
) -> Result<Vec<CurvePoint>> {
    let mut curve = Vec::with_capacity(iterations + 1);
    let start = curve_len_offset(trainer);
    for it in 0..=iterations {
        if it > 0 {
            trainer.run_iteration(agent)?;
        }
        curve.push(CurvePoint {
            iteration: start + it,
            env_steps: trainer.env_steps(),
            mean_return: evaluate(agent)?,
            avg_max_q: track_max_q(agent, probes)?,
        });
    }
    Ok(curve)
}

fn curve_len_offset<T: AccessTask>(trainer: &DqnTrainer<T>) -> usize {
    (trainer.env_steps() / trainer.schedule.steps_per_iteration as u64) as usize
}

/// Histories visited by a uniformly random rollout of `rollout` slots,
/// `count` of them drawn without replacement after the warm-up window.
pub fn sample_probe_states<T: AccessTask>(
    task: &mut T,
    window: usize,
    count: usize,
    rollout: usize,
    seed: u64,
) -> Result<Vec<HistoryState>> {
    if rollout < count {
        return Err(Error::InvalidArgument(format!(
            "rollout of {rollout} slots cannot supply {count} probes"
        )));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let mut history = HistoryState::new(task.n_channels(), window)?;
    task.reset()?;
    for _ in 0..window {
        let a = rng.gen_range(0..task.n_actions());
        history.push_multi(&task.step(a)?.sensed)?;
    }
    let mut visited = Vec::with_capacity(rollout);
    for _ in 0..rollout {
        visited.push(history.clone());
        let a = rng.gen_range(0..task.n_actions());
        history.push_multi(&task.step(a)?.sensed)?;
    }
    let mut picks = sample(&mut rng, rollout, count).into_vec();
    picks.sort_unstable();
    Ok(picks.into_iter().map(|i| visited[i].clone()).collect())
}

/// Online tabular Q-learning over history states.
#[allow(clippy::too_many_arguments)]
pub fn tabular_train<T: AccessTask>(
    table: &mut TabularQ,
    task: &mut T,
    window: usize,
    steps: usize,
    epsilon: f64,
    gamma: f64,
    episode_length: Option<usize>,
    seed: u64,
) -> Result<()> {
    if table.n_actions() != task.n_actions() {
        return Err(Error::Dimension {
            expected: task.n_actions(),
            found: table.n_actions(),
        });
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let mut history = HistoryState::new(task.n_channels(), window)?;
    task.reset()?;
    let mut episode_step = 0;
    for _ in 0..steps {
        let state = history.as_slice().to_vec();
        let action = table.act(&state, epsilon, &mut rng);
        let outcome = task.step(action)?;
        history.push_multi(&outcome.sensed)?;
        table.update(&state, action, outcome.reward, history.as_slice(), gamma)?;
        episode_step += 1;
        if Some(episode_step) == episode_length {
            task.reset()?;
            history.clear();
            episode_step = 0;
        }
    }
    Ok(())
}

/// Greedy (or epsilon-greedy) single-user controller backed by a Q-network.
#[derive(Debug, Clone)]
pub struct DqnPolicy<'a> {
    agent: &'a DqnAgent,
    history: HistoryState,
    epsilon: f64,
}

impl<'a> DqnPolicy<'a> {
    pub fn new(agent: &'a DqnAgent, n_channels: usize, window: usize, epsilon: f64) -> Result<Self> {
        let history = HistoryState::new(n_channels, window)?;
        if history.width() != agent.n_inputs() || agent.n_actions() != n_channels {
            return Err(Error::Dimension {
                expected: agent.n_inputs(),
                found: history.width(),
            });
        }
        Ok(Self {
            agent,
            history,
            epsilon,
        })
    }

    pub fn greedy(agent: &'a DqnAgent, n_channels: usize, window: usize) -> Result<Self> {
        Self::new(agent, n_channels, window, 0.0)
    }
}

impl AccessPolicy for DqnPolicy<'_> {
    fn name(&self) -> &str {
        "dqn"
    }

    fn n_channels(&self) -> usize {
        self.history.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.history.clear();
        Ok(())
    }

    fn act(&mut self, rng: &mut SimRng) -> Result<usize> {
        self.agent.act(self.history.as_slice(), self.epsilon, rng)
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        self.history.push(action, observation)
    }
}

/// Greedy single-user controller backed by a Q-table.
#[derive(Debug, Clone)]
pub struct TabularPolicy<'a> {
    table: &'a TabularQ,
    history: HistoryState,
}

impl<'a> TabularPolicy<'a> {
    pub fn new(table: &'a TabularQ, n_channels: usize, window: usize) -> Result<Self> {
        Ok(Self {
            table,
            history: HistoryState::new(n_channels, window)?,
        })
    }
}

impl AccessPolicy for TabularPolicy<'_> {
    fn name(&self) -> &str {
        "tabular"
    }

    fn n_channels(&self) -> usize {
        self.history.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.history.clear();
        Ok(())
    }

    fn act(&mut self, _rng: &mut SimRng) -> Result<usize> {
        Ok(self.table.greedy_action(self.history.as_slice()))
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        self.history.push(action, observation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelModel, FixedPatternModel};
    use crate::nn::{DqnConfig, Preset};

    fn alternating_task(seed: u64) -> SingleUserTask {
        let m = ChannelModel::FixedPattern(FixedPatternModel::round_robin(2, 1.0).unwrap());
        SingleUserTask::new(ChannelEnv::new(m, seed).unwrap())
    }

    fn tiny_agent(seed: u64) -> DqnAgent {
        let cfg = DqnConfig {
            hidden: vec![8],
            learning_rate: 1e-3,
            ..DqnConfig::from_preset(Preset::Wide2, 0.9)
        };
        DqnAgent::new(4, 2, cfg, &mut SimRng::seed_from_u64(seed)).unwrap()
    }

    fn small_schedule() -> TrainSchedule {
        TrainSchedule {
            steps_per_iteration: 200,
            learning_starts: 100,
            replay_capacity: 10_000,
            ..TrainSchedule::default()
        }
    }

    #[test]
    fn zero_iterations_leave_agent_unchanged() {
        let mut agent = tiny_agent(1);
        let before = agent.network().clone();
        let mut trainer = DqnTrainer::new(alternating_task(0), 2, small_schedule(), 3).unwrap();
        let curve = dqn_train(&mut agent, &mut trainer, 0, &[], &mut |_| Ok(1.5)).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].iteration, 0);
        assert_eq!(agent.network(), &before);
    }

    #[test]
    fn equal_seeds_give_equal_curves() {
        let run = || {
            let mut agent = tiny_agent(1);
            let mut trainer = DqnTrainer::new(alternating_task(0), 2, small_schedule(), 3).unwrap();
            let probes = sample_probe_states(&mut alternating_task(5), 2, 4, 50, 6).unwrap();
            let curve = dqn_train(&mut agent, &mut trainer, 3, &probes, &mut |a| {
                a.max_q(&[1, 0, 0, 1])
            })
            .unwrap();
            (curve, agent.network().params())
        };
        let (c1, p1) = run();
        let (c2, p2) = run();
        assert_eq!(c1, c2);
        assert_eq!(
            p1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            p2.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(c1.last().unwrap().env_steps, 600);
    }

    #[test]
    fn probe_of_zero_network_is_zero() {
        let cfg = DqnConfig::from_preset(Preset::Wide2, 0.9);
        let mut agent = tiny_agent(2);
        let zero = crate::nn::Mlp::zeros(agent.network().sizes()).unwrap();
        agent = DqnAgent::from_parts(zero, None, None, DqnConfig { hidden: vec![8], ..cfg }).unwrap();
        let probes = sample_probe_states(&mut alternating_task(5), 2, 3, 10, 6).unwrap();
        assert_eq!(track_max_q(&agent, &probes).unwrap(), 0.0);
        let one = &probes[..1];
        assert_eq!(track_max_q(&agent, one).unwrap(), agent.max_q(one[0].as_slice()).unwrap());
    }
}
