use std::collections::HashMap;
use std::sync::Arc;

use super::AccessPolicy;
use crate::channel::{check_probability, TwoStateMatrix};
use crate::error::{Error, Result};
use crate::SimRng;

const GRID_POINTS: usize = 1001;
const VALUE_TOLERANCE: f64 = 1e-8;
const VALUE_ITERATION_CAP: usize = 1_000_000;
const BISECTION_TOLERANCE: f64 = 1e-4;
const BRACKET_SLACK: f64 = 1e-9;

/// Two-state (bad = 0, good = 1) Markov channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertElliotChain {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl GilbertElliotChain {
    pub fn new(p01: f64, p11: f64) -> Result<Self> {
        check_probability("p01", p01)?;
        check_probability("p11", p11)?;
        Ok(Self {
            p00: 1.0 - p01,
            p01,
            p10: 1.0 - p11,
            p11,
        })
    }

    pub fn from_matrix(m: TwoStateMatrix) -> Result<Self> {
        for row in m {
            if (row[0] + row[1] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidModel(format!("chain row {row:?} does not sum to 1")));
            }
        }
        Self::new(m[0][1], m[1][1])
    }

    pub fn to_matrix(&self) -> TwoStateMatrix {
        [[self.p00, self.p01], [self.p10, self.p11]]
    }

    /// `p11 >= p01`.
    pub fn is_positively_correlated(&self) -> bool {
        self.p11 >= self.p01
    }

    /// Stationary probability of the good state (`0.5` for a chain that
    /// never leaves its initial state).
    pub fn stationary_good(&self) -> f64 {
        let d = self.p01 + self.p10;
        if d == 0.0 {
            0.5
        } else {
            self.p01 / d
        }
    }

    /// One unobserved step of the good-probability.
    pub fn propagate(&self, omega: f64) -> f64 {
        omega * self.p11 + (1.0 - omega) * self.p01
    }
}

/// Good-probability of every channel, treating channels as independent.
pub type PerChannelBelief = Vec<f64>;

/// Advances one channel's good-probability: a sensed channel first collapses
/// to its observed state, then every channel propagates one slot.
pub fn per_channel_belief_step(omega: f64, chain: &GilbertElliotChain, sensed: Option<bool>) -> f64 {
    let start = match sensed {
        Some(true) => 1.0,
        Some(false) => 0.0,
        None => omega,
    };
    chain.propagate(start)
}

/// Whittle index of a single channel computed from its subsidy definition.
///
/// For subsidy `lambda`, the single-arm problem pays `2 omega - 1` when the
/// arm is sensed (and the belief resolves) and `lambda` when it is left
/// passive (and the belief propagates). Its value function is solved by value
/// iteration on a 1001-point belief grid with linear interpolation. The index
/// is the subsidy that equalizes the two actions at `omega`, located by
/// bisection on `[-1, 1]` and refined by a secant step inside the final
/// bracket. Value functions are cached per subsidy and indices per belief.
#[derive(Debug, Clone)]
pub struct WhittleIndexer {
    chain: GilbertElliotChain,
    gamma: f64,
    passive_next: Vec<(usize, f64)>,
    good_next: (usize, f64),
    bad_next: (usize, f64),
    cache: HashMap<u64, Arc<Vec<f64>>>,
    indices: HashMap<u64, f64>,
}

fn grid_position(x: f64) -> (usize, f64) {
    let scaled = x.clamp(0.0, 1.0) * (GRID_POINTS - 1) as f64;
    let i = (scaled.floor() as usize).min(GRID_POINTS - 2);
    (i, scaled - i as f64)
}

#[inline]
fn interpolate(v: &[f64], (i, frac): (usize, f64)) -> f64 {
    v[i] + frac * (v[i + 1] - v[i])
}

impl WhittleIndexer {
    pub fn new(chain: GilbertElliotChain, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("discount {gamma} outside [0, 1)")));
        }
        let passive_next = (0..GRID_POINTS)
            .map(|g| grid_position(chain.propagate(g as f64 / (GRID_POINTS - 1) as f64)))
            .collect();
        Ok(Self {
            chain,
            gamma,
            passive_next,
            good_next: grid_position(chain.p11),
            bad_next: grid_position(chain.p01),
            cache: HashMap::new(),
            indices: HashMap::new(),
        })
    }

    pub fn chain(&self) -> &GilbertElliotChain {
        &self.chain
    }

    fn value_function(&mut self, subsidy: f64) -> Result<Arc<Vec<f64>>> {
        if let Some(v) = self.cache.get(&subsidy.to_bits()) {
            return Ok(Arc::clone(v));
        }
        let gamma = self.gamma;
        let mut v = vec![0.0; GRID_POINTS];
        let mut next = vec![0.0; GRID_POINTS];
        let mut converged = false;
        for _ in 0..VALUE_ITERATION_CAP {
            let cont_good = interpolate(&v, self.good_next);
            let cont_bad = interpolate(&v, self.bad_next);
            let mut delta = 0.0f64;
            for g in 0..GRID_POINTS {
                let omega = g as f64 / (GRID_POINTS - 1) as f64;
                let active = 2.0 * omega - 1.0 + gamma * (omega * cont_good + (1.0 - omega) * cont_bad);
                let passive = subsidy + gamma * interpolate(&v, self.passive_next[g]);
                next[g] = active.max(passive);
                delta = delta.max((next[g] - v[g]).abs());
            }
            std::mem::swap(&mut v, &mut next);
            if delta < VALUE_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!(
                "single-arm value iteration did not converge for subsidy {subsidy}"
            )));
        }
        let v = Arc::new(v);
        self.cache.insert(subsidy.to_bits(), Arc::clone(&v));
        Ok(v)
    }

    /// Advantage of sensing over resting at `omega` under `subsidy`.
    fn advantage(&mut self, omega: f64, subsidy: f64) -> Result<f64> {
        let v = self.value_function(subsidy)?;
        let active = 2.0 * omega - 1.0
            + self.gamma
                * (omega * interpolate(&v, self.good_next)
                    + (1.0 - omega) * interpolate(&v, self.bad_next));
        let passive = subsidy + self.gamma * interpolate(&v, grid_position(self.chain.propagate(omega)));
        Ok(active - passive)
    }

    pub fn index(&mut self, omega: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::InvalidArgument(format!("belief {omega} outside [0, 1]")));
        }
        if let Some(&idx) = self.indices.get(&omega.to_bits()) {
            return Ok(idx);
        }
        let idx = self.solve_index(omega)?;
        self.indices.insert(omega.to_bits(), idx);
        Ok(idx)
    }

    fn solve_index(&mut self, omega: f64) -> Result<f64> {
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        let mut d_lo = self.advantage(omega, lo)?;
        let mut d_hi = self.advantage(omega, hi)?;
        if d_lo < -BRACKET_SLACK || d_hi > BRACKET_SLACK {
            return Err(Error::Numeric(format!(
                "subsidy bracket [-1, 1] does not contain the index at belief {omega} \
                 (advantages {d_lo:.3e}, {d_hi:.3e})"
            )));
        }
        while hi - lo > BISECTION_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            let d = self.advantage(omega, mid)?;
            if d > 0.0 {
                lo = mid;
                d_lo = d;
            } else {
                hi = mid;
                d_hi = d;
            }
        }
        let span = d_lo - d_hi;
        let root = if span > 0.0 {
            lo + d_lo.max(0.0) * (hi - lo) / span
        } else {
            0.5 * (lo + hi)
        };
        Ok(root.clamp(lo, hi))
    }
}

/// One-off index computation; prefer [`WhittleIndexer`] for repeated calls.
pub fn whittle_index(chain: &GilbertElliotChain, omega: f64, gamma: f64) -> Result<f64> {
    WhittleIndexer::new(*chain, gamma)?.index(omega)
}

/// Channel with the largest Whittle index, lowest index on ties.
pub fn whittle_policy_action(
    beliefs: &[f64],
    chains: &[GilbertElliotChain],
    gamma: f64,
) -> Result<usize> {
    if beliefs.len() != chains.len() {
        return Err(Error::Dimension {
            expected: chains.len(),
            found: beliefs.len(),
        });
    }
    let mut indexers = chains
        .iter()
        .map(|c| WhittleIndexer::new(*c, gamma))
        .collect::<Result<Vec<_>>>()?;
    select(&mut indexers, beliefs)
}

fn select(indexers: &mut [WhittleIndexer], beliefs: &[f64]) -> Result<usize> {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, (ix, &w)) in indexers.iter_mut().zip(beliefs).enumerate() {
        let idx = ix.index(w)?;
        if idx > best.1 {
            best = (k, idx);
        }
    }
    Ok(best.0)
}

/// Whittle-index heuristic over per-channel chains that ignore any
/// correlation between channels. Beliefs start at each chain's stationary
/// good-probability.
#[derive(Debug, Clone)]
pub struct WhittlePolicy {
    indexers: Vec<WhittleIndexer>,
    beliefs: PerChannelBelief,
}

impl WhittlePolicy {
    pub fn new(chains: &[GilbertElliotChain], gamma: f64) -> Result<Self> {
        if chains.is_empty() {
            return Err(Error::InvalidArgument("Whittle policy needs at least one channel".into()));
        }
        let indexers = chains
            .iter()
            .map(|c| WhittleIndexer::new(*c, gamma))
            .collect::<Result<Vec<_>>>()?;
        let beliefs = chains.iter().map(GilbertElliotChain::stationary_good).collect();
        Ok(Self { indexers, beliefs })
    }

    pub fn beliefs(&self) -> &[f64] {
        &self.beliefs
    }

    pub fn set_beliefs(&mut self, beliefs: PerChannelBelief) -> Result<()> {
        if beliefs.len() != self.indexers.len() {
            return Err(Error::Dimension {
                expected: self.indexers.len(),
                found: beliefs.len(),
            });
        }
        self.beliefs = beliefs;
        Ok(())
    }

    pub fn chains(&self) -> Vec<GilbertElliotChain> {
        self.indexers.iter().map(|ix| *ix.chain()).collect()
    }
}

impl AccessPolicy for WhittlePolicy {
    fn name(&self) -> &str {
        "whittle"
    }

    fn n_channels(&self) -> usize {
        self.indexers.len()
    }

    fn reset(&mut self) -> Result<()> {
        self.beliefs = self
            .indexers
            .iter()
            .map(|ix| ix.chain().stationary_good())
            .collect();
        Ok(())
    }

    fn act(&mut self, _rng: &mut SimRng) -> Result<usize> {
        select(&mut self.indexers, &self.beliefs)
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        for (k, (w, ix)) in self.beliefs.iter_mut().zip(&self.indexers).enumerate() {
            let sensed = (k == action).then_some(observation);
            *w = per_channel_belief_step(*w, ix.chain(), sensed);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn belief_steps() {
        let c = GilbertElliotChain::new(0.2, 0.8).unwrap();
        assert!((per_channel_belief_step(0.3, &c, Some(true)) - 0.8).abs() < 1e-15);
        assert!((per_channel_belief_step(0.5, &c, None) - 0.5).abs() < 1e-15);
        let c = GilbertElliotChain::new(0.3, 0.8).unwrap();
        let fixed = c.p01 / (1.0 - c.p11 + c.p01);
        assert!((per_channel_belief_step(fixed, &c, None) - fixed).abs() < 1e-15);
    }

    #[test]
    fn frozen_belief_index_is_immediate_reward() {
        let c = GilbertElliotChain::new(0.4, 0.4).unwrap();
        for omega in [0.0, 0.25, 0.4, 0.9, 1.0] {
            let idx = whittle_index(&c, omega, 0.9).unwrap();
            assert!((idx - (2.0 * omega - 1.0)).abs() < 1e-6, "{omega}: {idx}");
        }
    }

    #[test]
    fn absorbing_good_state_has_index_one() {
        let c = GilbertElliotChain::new(0.2, 1.0).unwrap();
        let idx = whittle_index(&c, 1.0, 0.9).unwrap();
        assert!((idx - 1.0).abs() < 1e-4, "{idx}");
    }

    #[test]
    fn index_is_monotone_for_positive_correlation() {
        let c = GilbertElliotChain::new(0.3, 0.8).unwrap();
        let mut ix = WhittleIndexer::new(c, 0.9).unwrap();
        let values: Vec<f64> = (0..=100).map(|i| ix.index(i as f64 / 100.0).unwrap()).collect();
        for w in values.windows(2) {
            assert!(w[1] >= w[0], "{values:?}");
        }
        assert!(values.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn identical_chains_pick_higher_belief() {
        let c = GilbertElliotChain::new(0.3, 0.8).unwrap();
        assert_eq!(whittle_policy_action(&[0.9, 0.2], &[c, c], 0.9).unwrap(), 0);
        assert_eq!(whittle_policy_action(&[0.2, 0.9], &[c, c], 0.9).unwrap(), 1);
        assert_eq!(whittle_policy_action(&[0.5, 0.5, 0.5], &[c, c, c], 0.9).unwrap(), 0);
    }

    #[test]
    fn negatively_correlated_chain_has_an_index() {
        let c = GilbertElliotChain::new(0.9, 0.1).unwrap();
        let mut ix = WhittleIndexer::new(c, 0.9).unwrap();
        for i in 0..=20 {
            let v = ix.index(i as f64 / 20.0).unwrap();
            assert!((-1.0..=1.0).contains(&v));
        }
    }
}
