use rand::SeedableRng;

use super::derive_seed;
use super::eval::{evaluate_agent, EvalSpec};
use super::learn::{make_env, streams};
use crate::channel::{ChannelModel, NonstationaryModel};
use crate::error::{Error, Result};
use crate::nn::{DqnAgent, DqnTrainer, SingleUserTask};
use crate::SimRng;

/// Monitoring and retraining settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// Slots between evaluations; also the training length of one
    /// retraining period.
    pub period: usize,
    /// Relative drop from the best evaluation that triggers retraining.
    pub threshold: f64,
    /// Periods of training spent per retraining event.
    pub retrain_budget: usize,
    /// Reinitialize the network instead of warm-starting from it.
    pub cold_start: bool,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            period: 1_000,
            threshold: 0.3,
            retrain_budget: 80,
            cold_start: false,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 || self.retrain_budget == 0 {
            return Err(Error::Config("adaptive period and budget must be positive".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!(
                "degradation threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Drop of `value` below `best`, relative to `best`, measured on returns
/// shifted by `1/(1-gamma)` so that every return is non-negative.
pub fn relative_drop(best: f64, value: f64, gamma: f64) -> f64 {
    let shift = 1.0 / (1.0 - gamma);
    let b = best + shift;
    if b <= 0.0 {
        0.0
    } else {
        (best - value) / b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveLogEntry {
    pub period: usize,
    /// Slots elapsed since the run began.
    pub slot: u64,
    /// 0 before the switch, 1 after it.
    pub phase: usize,
    pub mean_return: f64,
    /// Best evaluation since the last (re)training finished.
    pub best_return: f64,
    /// The agent trained during this period.
    pub retraining: bool,
    /// This evaluation started a retraining event.
    pub triggered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveLog {
    pub threshold: f64,
    pub entries: Vec<AdaptiveLogEntry>,
}

impl AdaptiveLog {
    /// Periods whose evaluation triggered retraining.
    pub fn trigger_periods(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| e.triggered).map(|e| e.period).collect()
    }
}

/// Monitors a pretrained agent while the channels switch from `phase_a` to
/// `phase_b` at slot `switch_slot`. Every period the frozen policy is
/// evaluated on the phase in force; a drop of at least `threshold` below the
/// best evaluation so far clears the replay memory and trains for
/// `retrain_budget` periods, after which monitoring resumes with a fresh
/// best.
#[allow(clippy::too_many_arguments)]
pub fn adaptive_dqn_run(
    agent: &mut DqnAgent,
    model: &NonstationaryModel,
    window: usize,
    trainer: &mut DqnTrainer<SingleUserTask>,
    config: &AdaptiveConfig,
    periods: usize,
    eval: &EvalSpec,
    seed: u64,
) -> Result<AdaptiveLog> {
    config.validate()?;
    let phase_models: [&ChannelModel; 2] = [&model.phase_a, &model.phase_b];
    let episode_len = trainer.schedule().episode_length.unwrap_or(eval.length);
    let mut slot: u64 = 0;
    let mut phase = usize::from(model.switch_slot == 0);
    let mut best: Option<f64> = None;
    let mut remaining = 0usize;
    let mut entries = Vec::with_capacity(periods);
    if phase == 1 {
        *trainer.task_mut().env_mut() =
            make_env(&model.phase_b, derive_seed(seed, streams::TRAIN_ENV), episode_len)?;
        trainer.reset_episode()?;
    }
    for period in 1..=periods {
        let retraining = remaining > 0;
        if retraining {
            trainer.run_steps(agent, config.period)?;
            remaining -= 1;
        }
        slot += config.period as u64;
        if phase == 0 && slot >= model.switch_slot {
            phase = 1;
            *trainer.task_mut().env_mut() =
                make_env(&model.phase_b, derive_seed(seed, streams::TRAIN_ENV), episode_len)?;
            trainer.reset_episode()?;
        }
        let mut eval_task = SingleUserTask::new(make_env(
            phase_models[phase],
            derive_seed(seed, streams::CURVE_EVAL),
            eval.length,
        )?);
        let r = evaluate_agent(agent, &mut eval_task, window, eval, derive_seed(seed, streams::CURVE_EVAL))?
            .mean_return;
        let mut triggered = false;
        if retraining {
            if remaining == 0 {
                best = Some(r);
            }
        } else {
            match best {
                Some(b) if relative_drop(b, r, eval.gamma) >= config.threshold => {
                    triggered = true;
                    remaining = config.retrain_budget;
                    trainer.clear_replay();
                    trainer.reset_episode()?;
                    if config.cold_start {
                        let mut rng = SimRng::seed_from_u64(derive_seed(seed, streams::INIT ^ period as u64));
                        *agent = DqnAgent::new(agent.n_inputs(), agent.n_actions(), agent.config().clone(), &mut rng)?;
                    }
                }
                Some(b) => best = Some(b.max(r)),
                None => best = Some(r),
            }
        }
        entries.push(AdaptiveLogEntry {
            period,
            slot,
            phase,
            mean_return: r,
            best_return: best.unwrap_or(r),
            retraining,
            triggered,
        });
    }
    Ok(AdaptiveLog {
        threshold: config.threshold,
        entries,
    })
}
