use std::collections::HashMap;

use super::BeliefVector;
use crate::channel::JointMarkovModel;
use crate::error::{Error, Result};

pub const MAX_EXACT_CHANNELS: usize = 4;
pub const MAX_EXACT_HORIZON: usize = 10;

/// Values closer than this are treated as tied; ties go to the lowest channel.
const VALUE_TIE_TOLERANCE: f64 = 1e-10;
const MEMO_QUANTUM: f64 = 1e-12;

/// Continuation value over beliefs.
pub trait ValueFunction {
    fn value(&self, belief: &BeliefVector) -> f64;
}

/// The terminal value `V = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroValue;

impl ValueFunction for ZeroValue {
    fn value(&self, _belief: &BeliefVector) -> f64 {
        0.0
    }
}

/// One Bellman backup with the +1/-1 reward: for each channel the expected
/// immediate reward `2 P(good) - 1` plus the discounted expected continuation
/// over both observations. Returns the best value and its channel.
pub fn bellman_backup(
    belief: &BeliefVector,
    model: &JointMarkovModel,
    gamma: f64,
    continuation: &dyn ValueFunction,
) -> Result<(f64, usize)> {
    check_inputs(belief, model, gamma)?;
    let q = action_values(belief, model, gamma, |b| Ok(continuation.value(b)))?;
    Ok(best(&q))
}

fn check_inputs(belief: &BeliefVector, model: &JointMarkovModel, gamma: f64) -> Result<()> {
    if belief.n_channels() != model.n_channels() {
        return Err(Error::Dimension {
            expected: model.n_channels(),
            found: belief.n_channels(),
        });
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("discount {gamma} outside [0, 1)")));
    }
    Ok(())
}

fn action_values(
    belief: &BeliefVector,
    model: &JointMarkovModel,
    gamma: f64,
    mut next_value: impl FnMut(&BeliefVector) -> Result<f64>,
) -> Result<Vec<f64>> {
    (0..belief.n_channels())
        .map(|k| {
            let p_good = belief.marginal_good(k);
            let mut q = 2.0 * p_good - 1.0;
            if gamma > 0.0 {
                for (obs, p_obs) in [(true, p_good), (false, 1.0 - p_good)] {
                    if p_obs <= 0.0 {
                        continue;
                    }
                    let next = belief.sense_and_advance(model, k, obs)?;
                    q += gamma * p_obs * next_value(&next)?;
                }
            }
            Ok(q)
        })
        .collect()
}

fn best(q: &[f64]) -> (f64, usize) {
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let action = q
        .iter()
        .position(|&v| v >= max - VALUE_TIE_TOLERANCE)
        .unwrap_or(0);
    (max, action)
}

/// Depth-limited expectimax over the belief tree with memoization on
/// quantized beliefs. Reusing one solver across queries shares the memo.
#[derive(Debug, Clone)]
pub struct ExpectimaxSolver {
    model: JointMarkovModel,
    gamma: f64,
    memo: HashMap<(usize, Vec<i64>), f64>,
}

impl ExpectimaxSolver {
    pub fn new(model: JointMarkovModel, gamma: f64) -> Result<Self> {
        if model.n_channels() > MAX_EXACT_CHANNELS {
            return Err(Error::Capacity(format!(
                "exact solver handles at most {MAX_EXACT_CHANNELS} channels, got {}",
                model.n_channels()
            )));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("discount {gamma} outside [0, 1)")));
        }
        Ok(Self {
            model,
            gamma,
            memo: HashMap::new(),
        })
    }

    /// Q-value of every first action with `horizon` slots to go.
    pub fn q_values(&mut self, belief: &BeliefVector, horizon: usize) -> Result<Vec<f64>> {
        check_horizon(horizon)?;
        check_inputs(belief, &self.model, self.gamma)?;
        let model = self.model.clone();
        let gamma = self.gamma;
        action_values(belief, &model, gamma, |b| self.value(b, horizon - 1))
    }

    /// Optimal value and first action (lowest channel among ties).
    pub fn solve(&mut self, belief: &BeliefVector, horizon: usize) -> Result<(f64, usize)> {
        Ok(best(&self.q_values(belief, horizon)?))
    }

    fn value(&mut self, belief: &BeliefVector, depth: usize) -> Result<f64> {
        if depth == 0 {
            return Ok(0.0);
        }
        let key = (
            depth,
            belief
                .probs()
                .iter()
                .map(|p| (p / MEMO_QUANTUM).round() as i64)
                .collect::<Vec<_>>(),
        );
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let model = self.model.clone();
        let gamma = self.gamma;
        let q = action_values(belief, &model, gamma, |b| self.value(b, depth - 1))?;
        let v = best(&q).0;
        self.memo.insert(key, v);
        Ok(v)
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 || horizon > MAX_EXACT_HORIZON {
        return Err(Error::Capacity(format!(
            "horizon {horizon} outside 1..={MAX_EXACT_HORIZON}"
        )));
    }
    Ok(())
}

/// Exact finite-horizon optimum from `belief`: returns the value and the
/// optimal first channel.
pub fn exact_finite_horizon_solve(
    model: &JointMarkovModel,
    gamma: f64,
    horizon: usize,
    belief: &BeliefVector,
) -> Result<(f64, usize)> {
    check_horizon(horizon)?;
    ExpectimaxSolver::new(model.clone(), gamma)?.solve(belief, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_joint_from_marginals, FixedPatternModel};

    #[test]
    fn backup_on_certain_beliefs() {
        let model = JointMarkovModel::identity(2).unwrap();
        let (v, a) = bellman_backup(&BeliefVector::point(2, 3), &model, 0.9, &ZeroValue).unwrap();
        assert_eq!((v, a), (1.0, 0));
        let (v, _) = bellman_backup(&BeliefVector::point(2, 0), &model, 0.9, &ZeroValue).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn backup_single_channel() {
        let model = JointMarkovModel::identity(1).unwrap();
        let b = BeliefVector::new(1, vec![0.4, 0.6]).unwrap();
        let (v, _) = bellman_backup(&b, &model, 0.9, &ZeroValue).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn horizon_one_is_a_zero_continuation_backup() {
        let model = build_joint_from_marginals(&[[[0.7, 0.3], [0.2, 0.8]]; 2]).unwrap();
        let b = BeliefVector::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let exact = exact_finite_horizon_solve(&model, 0.9, 1, &b).unwrap();
        let backup = bellman_backup(&b, &model, 0.9, &ZeroValue).unwrap();
        assert!((exact.0 - backup.0).abs() < 1e-15);
        assert_eq!(exact.1, backup.1);
    }

    #[test]
    fn zero_discount_is_myopic_reward() {
        let model = build_joint_from_marginals(&[[[0.7, 0.3], [0.2, 0.8]]; 2]).unwrap();
        let b = BeliefVector::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let (v, a) = exact_finite_horizon_solve(&model, 0.0, 6, &b).unwrap();
        // P(ch0 good) = 0.7, P(ch1 good) = 0.6
        assert_eq!(a, 0);
        assert!((v - 0.4).abs() < 1e-12);
    }

    #[test]
    fn capacity_limits() {
        let five = FixedPatternModel::round_robin(5, 0.5).unwrap().to_joint().unwrap();
        let b = BeliefVector::uniform(5);
        assert!(matches!(
            exact_finite_horizon_solve(&five, 0.9, 2, &b),
            Err(Error::Capacity(_))
        ));
        let two = FixedPatternModel::round_robin(2, 0.5).unwrap().to_joint().unwrap();
        assert!(matches!(
            exact_finite_horizon_solve(&two, 0.9, 11, &BeliefVector::uniform(2)),
            Err(Error::Capacity(_))
        ));
    }
}
