use rand::{Rng, SeedableRng};

use super::{
    stationary_distribution, ChannelState, CorrelatedChannelModel, FixedPatternModel,
    JointMarkovModel, SlidingWindowModel, TraceModel,
};
use crate::error::{Error, Result};
use crate::SimRng;

/// Any channel-system model the environment can run.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    FixedPattern(FixedPatternModel),
    Correlated(CorrelatedChannelModel),
    Window(SlidingWindowModel),
    Joint(JointMarkovModel),
    Trace(TraceModel),
    Nonstationary(Box<NonstationaryModel>),
}

/// Runs `phase_a` for slots `0..switch_slot` and `phase_b` from then on.
#[derive(Debug, Clone, PartialEq)]
pub struct NonstationaryModel {
    pub phase_a: ChannelModel,
    pub phase_b: ChannelModel,
    pub switch_slot: u64,
}

impl NonstationaryModel {
    pub fn new(phase_a: ChannelModel, phase_b: ChannelModel, switch_slot: u64) -> Result<Self> {
        if switch_slot == 0 {
            return Err(Error::InvalidModel("switch slot must be positive".into()));
        }
        if phase_a.n_channels() != phase_b.n_channels() {
            return Err(Error::InvalidModel(format!(
                "phases disagree on channel count ({} vs {})",
                phase_a.n_channels(),
                phase_b.n_channels()
            )));
        }
        if matches!(phase_a, ChannelModel::Nonstationary(_))
            || matches!(phase_b, ChannelModel::Nonstationary(_))
        {
            return Err(Error::InvalidModel("nested nonstationary models are not supported".into()));
        }
        Ok(Self {
            phase_a,
            phase_b,
            switch_slot,
        })
    }

    pub fn phase_at(&self, slot: u64) -> &ChannelModel {
        if slot < self.switch_slot {
            &self.phase_a
        } else {
            &self.phase_b
        }
    }
}

impl ChannelModel {
    pub fn n_channels(&self) -> usize {
        match self {
            ChannelModel::FixedPattern(m) => m.n_channels(),
            ChannelModel::Correlated(m) => m.n_channels(),
            ChannelModel::Window(m) => m.n_channels(),
            ChannelModel::Joint(m) => m.n_channels(),
            ChannelModel::Trace(m) => m.n_channels(),
            ChannelModel::Nonstationary(m) => m.phase_a.n_channels(),
        }
    }

    /// The stationary model in force at `slot`.
    pub fn phase_at(&self, slot: u64) -> &ChannelModel {
        match self {
            ChannelModel::Nonstationary(m) => m.phase_at(slot),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub observation: bool,
    pub reward: f64,
}

impl StepOutcome {
    pub fn from_observation(observation: bool) -> Self {
        Self {
            observation,
            reward: if observation { 1.0 } else { -1.0 },
        }
    }
}

#[derive(Debug, Clone)]
enum Latent {
    Subset(usize),
    Independent(Vec<bool>),
    Window(usize),
    Joint(usize),
    Trace(usize),
}

/// A seeded, single-threaded channel environment.
///
/// Fixed-pattern and sliding-window models start with their first subset
/// (window position 0) active; correlated and joint models draw the initial
/// state from their stationary distribution; traces start at slot 0 unless a
/// random start is requested with [`ChannelEnv::randomize_trace_start`].
#[derive(Debug, Clone)]
pub struct ChannelEnv {
    model: ChannelModel,
    rng: SimRng,
    slot: u64,
    state: ChannelState,
    latent: Latent,
    stationary_cache: [Option<Vec<f64>>; 2],
    trace_window: Option<usize>,
}

impl ChannelEnv {
    pub fn new(model: ChannelModel, seed: u64) -> Result<Self> {
        let n = model.n_channels();
        let mut env = Self {
            model,
            rng: SimRng::seed_from_u64(seed),
            slot: 0,
            state: ChannelState::all_bad(n),
            latent: Latent::Subset(0),
            stationary_cache: [None, None],
            trace_window: None,
        };
        env.reset()?;
        Ok(env)
    }

    /// Makes every reset pick a uniformly random trace offset that leaves at
    /// least `episode_len` slots before the end.
    pub fn randomize_trace_start(&mut self, episode_len: usize) {
        self.trace_window = Some(episode_len);
    }

    pub fn reset(&mut self) -> Result<()> {
        self.slot = 0;
        let (latent, state) = self.init_phase(0)?;
        self.latent = latent;
        self.state = state;
        Ok(())
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    pub fn n_channels(&self) -> usize {
        self.state.n_channels()
    }

    /// Number of steps taken since the last reset.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Genie view of every channel in the current slot.
    pub fn full_state(&self) -> &ChannelState {
        &self.state
    }

    pub fn active_model(&self) -> &ChannelModel {
        self.model.phase_at(self.slot)
    }

    /// Index of the active subset when a fixed-pattern phase is running.
    pub fn active_subset(&self) -> Option<usize> {
        match (&self.latent, self.active_model()) {
            (Latent::Subset(i), ChannelModel::FixedPattern(_)) => Some(*i),
            _ => None,
        }
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// Senses `action`, collects the +1/-1 reward, and advances one slot.
    pub fn step(&mut self, action: usize) -> Result<StepOutcome> {
        let obs = self.step_many(&[action])?;
        Ok(StepOutcome::from_observation(obs[0]))
    }

    /// Senses every listed channel in the current slot, then advances once.
    pub fn step_many(&mut self, channels: &[usize]) -> Result<Vec<bool>> {
        let n = self.n_channels();
        if let Some(&a) = channels.iter().find(|&&a| a >= n) {
            return Err(Error::InvalidArgument(format!(
                "action {a} outside channels 0..{n}"
            )));
        }
        if let Latent::Trace(cursor) = self.latent {
            if let ChannelModel::Trace(t) = self.active_model() {
                if cursor >= t.len() {
                    return Err(Error::EndOfTrace(t.len()));
                }
            }
        }
        let obs = channels.iter().map(|&a| self.state.is_good(a)).collect();
        self.advance()?;
        Ok(obs)
    }

    /// Advances one slot without sensing anything.
    pub fn advance(&mut self) -> Result<()> {
        self.slot += 1;
        if let ChannelModel::Nonstationary(ns) = &self.model {
            if self.slot == ns.switch_slot {
                let (latent, state) = self.init_phase(1)?;
                self.latent = latent;
                self.state = state;
                return Ok(());
            }
        }
        let model = self.model.phase_at(self.slot);
        match (&mut self.latent, model) {
            (Latent::Subset(i), ChannelModel::FixedPattern(m)) => {
                if self.rng.gen::<f64>() < m.switch_prob() {
                    *i = m.next_subset(*i);
                }
                self.state = m.subset_state(*i);
            }
            (Latent::Independent(bits), ChannelModel::Correlated(m)) => {
                m.advance(bits, &mut self.rng);
                self.state = m.full_state(bits);
            }
            (Latent::Window(start), ChannelModel::Window(m)) => {
                if self.rng.gen::<f64>() < m.switch_prob() {
                    *start = (*start + 1) % m.n_channels();
                }
                self.state = m.state_at(*start);
            }
            (Latent::Joint(s), ChannelModel::Joint(m)) => {
                *s = m.sample_next(*s, &mut self.rng);
                self.state = ChannelState::from_index(m.n_channels(), *s);
            }
            (Latent::Trace(cursor), ChannelModel::Trace(t)) => {
                *cursor += 1;
                if let Some(s) = t.slot(*cursor) {
                    self.state = s.clone();
                }
            }
            _ => unreachable!("latent state always matches the active model"),
        }
        Ok(())
    }

    fn init_phase(&mut self, phase: usize) -> Result<(Latent, ChannelState)> {
        let model = match (&self.model, phase) {
            (ChannelModel::Nonstationary(ns), 0) => &ns.phase_a,
            (ChannelModel::Nonstationary(ns), _) => &ns.phase_b,
            (m, _) => m,
        };
        Ok(match model {
            ChannelModel::FixedPattern(m) => (Latent::Subset(0), m.subset_state(0)),
            ChannelModel::Correlated(m) => {
                let bits = m.sample_initial(&mut self.rng);
                let s = m.full_state(&bits);
                (Latent::Independent(bits), s)
            }
            ChannelModel::Window(m) => (Latent::Window(0), m.state_at(0)),
            ChannelModel::Joint(m) => {
                if self.stationary_cache[phase].is_none() {
                    let pi = stationary_distribution(m)?;
                    self.stationary_cache[phase] = Some(pi.probs().to_vec());
                }
                let pi = self.stationary_cache[phase].as_ref().unwrap();
                let u: f64 = self.rng.gen();
                let mut acc = 0.0;
                let mut s = *m.support().last().unwrap();
                for (i, &p) in pi.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        s = i;
                        break;
                    }
                }
                (Latent::Joint(s), ChannelState::from_index(m.n_channels(), s))
            }
            ChannelModel::Trace(t) => {
                let start = match self.trace_window {
                    Some(len) if t.len() > len => self.rng.gen_range(0..=t.len() - len),
                    _ => 0,
                };
                (Latent::Trace(start), t.slot(start).unwrap().clone())
            }
            ChannelModel::Nonstationary(_) => unreachable!("rejected at construction"),
        })
    }
}
