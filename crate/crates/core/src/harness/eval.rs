use rand::SeedableRng;

use super::derive_seed;
use crate::channel::{ChannelEnv, ChannelModel};
use crate::error::{Error, Result};
use crate::nn::{AccessTask, DqnAgent, HistoryState};
use crate::policy::AccessPolicy;
use crate::SimRng;

/// Evaluation protocol: fresh episodes of fixed length, discounted from the
/// first slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSpec {
    pub episodes: usize,
    pub length: usize,
    pub gamma: f64,
}

impl Default for EvalSpec {
    fn default() -> Self {
        Self {
            episodes: 1_000,
            length: 100,
            gamma: 0.9,
        }
    }
}

impl EvalSpec {
    fn validate(&self) -> Result<()> {
        if self.episodes == 0 || self.length == 0 {
            return Err(Error::InvalidArgument("evaluation needs episodes and slots".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("discount {} outside [0, 1)", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub policy: String,
    /// Mean over episodes of `sum_t gamma^(t-1) r_t`.
    pub mean_return: f64,
    /// Standard error of `mean_return`.
    pub stderr: f64,
    pub returns: Vec<f64>,
    /// Fraction of sensing decisions spent on each channel.
    pub utilization: Vec<f64>,
    pub episode_length: usize,
    pub episodes: usize,
    pub seed: u64,
}

struct Accumulator {
    returns: Vec<f64>,
    counts: Vec<u64>,
}

impl Accumulator {
    fn new(n_channels: usize, episodes: usize) -> Self {
        Self {
            returns: Vec::with_capacity(episodes),
            counts: vec![0; n_channels],
        }
    }

    fn finish(self, policy: &str, spec: &EvalSpec, seed: u64) -> EvaluationReport {
        let n = self.returns.len() as f64;
        let mean = self.returns.iter().sum::<f64>() / n;
        let var = if self.returns.len() > 1 {
            self.returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let total: u64 = self.counts.iter().sum();
        EvaluationReport {
            policy: policy.to_string(),
            mean_return: mean,
            stderr: (var / n).sqrt(),
            returns: self.returns,
            utilization: self.counts.iter().map(|&c| c as f64 / total as f64).collect(),
            episode_length: spec.length,
            episodes: spec.episodes,
            seed,
        }
    }
}

/// Runs `spec.episodes` fresh episodes of `policy` on `model`. The
/// environment is seeded with `seed`; traces start at a random offset per
/// episode.
pub fn evaluate_policy(
    policy: &mut dyn AccessPolicy,
    model: &ChannelModel,
    spec: &EvalSpec,
    seed: u64,
) -> Result<EvaluationReport> {
    spec.validate()?;
    if policy.n_channels() != model.n_channels() {
        return Err(Error::Dimension {
            expected: model.n_channels(),
            found: policy.n_channels(),
        });
    }
    let mut env = ChannelEnv::new(model.clone(), seed)?;
    if matches!(model, ChannelModel::Trace(_)) {
        env.randomize_trace_start(spec.length);
    }
    let mut rng = SimRng::seed_from_u64(derive_seed(seed, 0x9011c7));
    let mut acc = Accumulator::new(model.n_channels(), spec.episodes);
    for _ in 0..spec.episodes {
        env.reset()?;
        policy.reset()?;
        let mut ret = 0.0;
        let mut discount = 1.0;
        for _ in 0..spec.length {
            let a = policy.act(&mut rng)?;
            let o = env.step(a)?;
            policy.observe(a, o.observation)?;
            acc.counts[a] += 1;
            ret += discount * o.reward;
            discount *= spec.gamma;
        }
        acc.returns.push(ret);
    }
    Ok(acc.finish(policy.name(), spec, seed))
}

/// Evaluates a controller that maps the running history to a task action.
/// The task is reset before every episode; its own seed fixes the episodes.
pub fn evaluate_task<T: AccessTask>(
    name: &str,
    task: &mut T,
    window: usize,
    spec: &EvalSpec,
    seed: u64,
    controller: &mut dyn FnMut(&HistoryState, &mut SimRng) -> Result<usize>,
) -> Result<EvaluationReport> {
    spec.validate()?;
    let mut rng = SimRng::seed_from_u64(derive_seed(seed, 0x9011c7));
    let mut history = HistoryState::new(task.n_channels(), window)?;
    let mut acc = Accumulator::new(task.n_channels(), spec.episodes);
    for _ in 0..spec.episodes {
        task.reset()?;
        history.clear();
        let mut ret = 0.0;
        let mut discount = 1.0;
        for _ in 0..spec.length {
            let a = controller(&history, &mut rng)?;
            let step = task.step(a)?;
            for &(c, _) in &step.sensed {
                acc.counts[c] += 1;
            }
            history.push_multi(&step.sensed)?;
            ret += discount * step.reward;
            discount *= spec.gamma;
        }
        acc.returns.push(ret);
    }
    Ok(acc.finish(name, spec, seed))
}

/// Greedy evaluation of a Q-network on a task.
pub fn evaluate_agent<T: AccessTask>(
    agent: &DqnAgent,
    task: &mut T,
    window: usize,
    spec: &EvalSpec,
    seed: u64,
) -> Result<EvaluationReport> {
    evaluate_task("dqn", task, window, spec, seed, &mut |h, _| {
        agent.greedy_action(h.as_slice())
    })
}
