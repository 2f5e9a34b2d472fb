use crate::channel::FixedPatternModel;
use crate::error::{Error, Result};

const CLASS_TIE_TOLERANCE: f64 = 1e-12;

/// Where a chosen channel sits relative to the active subset `C_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionClass {
    /// A channel of `C_{i+1}`.
    Next,
    /// A channel of `C_i`.
    Same,
    /// Any other channel.
    Other,
}

/// Exact Q-values of the fully observed fixed-pattern MDP whose state is the
/// active subset. `q[i][j]` is the value of sensing a channel of subset `j`
/// in the slot after subset `i` was active.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPatternQTable {
    model: FixedPatternModel,
    gamma: f64,
    q: Vec<Vec<f64>>,
    continuation: Vec<f64>,
    value: Vec<f64>,
}

impl FixedPatternQTable {
    pub fn n_states(&self) -> usize {
        self.q.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn model(&self) -> &FixedPatternModel {
        &self.model
    }

    /// `V*(S_i)`.
    pub fn value(&self, state: usize) -> f64 {
        self.value[state]
    }

    /// The action-independent part `gamma [p V*(S_{i+1}) + (1-p) V*(S_i)]`.
    pub fn continuation(&self, state: usize) -> f64 {
        self.continuation[state]
    }

    pub fn q_subset(&self, state: usize, subset: usize) -> f64 {
        self.q[state][subset]
    }

    pub fn q_channel(&self, state: usize, channel: usize) -> f64 {
        self.q[state][self.model.subset_of(channel)]
    }

    pub fn class_of(&self, state: usize, subset: usize) -> ActionClass {
        if subset == self.model.next_subset(state) {
            ActionClass::Next
        } else if subset == state {
            ActionClass::Same
        } else {
            ActionClass::Other
        }
    }

    /// Q-value of an action class, if the class exists for this partition.
    pub fn q_class(&self, state: usize, class: ActionClass) -> Option<f64> {
        (0..self.n_states())
            .find(|&j| self.class_of(state, j) == class)
            .map(|j| self.q[state][j])
    }

    /// Subsets attaining the maximum Q-value.
    pub fn argmax_subsets(&self, state: usize) -> Vec<usize> {
        let row = &self.q[state];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..row.len())
            .filter(|&j| row[j] >= max - CLASS_TIE_TOLERANCE)
            .collect()
    }

    /// Optimal subset with ties resolved next subset first, then the current
    /// subset, then the lowest channel index.
    pub fn best_subset(&self, state: usize) -> usize {
        let winners = self.argmax_subsets(state);
        let next = self.model.next_subset(state);
        if winners.contains(&next) {
            return next;
        }
        if winners.contains(&state) {
            return state;
        }
        *winners
            .iter()
            .min_by_key(|&&j| self.model.subsets()[j][0])
            .expect("at least one maximizer")
    }

    /// Lowest-index channel of [`Self::best_subset`].
    pub fn best_channel(&self, state: usize) -> usize {
        self.model.subsets()[self.best_subset(state)][0]
    }
}

/// Solves the active-subset MDP by policy evaluation and improvement.
///
/// The chain moves `S_i -> S_{i+1}` with probability `p` and stays otherwise,
/// independent of the action; sensing a channel of subset `j` pays `+1` if
/// `j` is active in the next slot and `-1` otherwise.
pub fn fixed_pattern_q(model: &FixedPatternModel, gamma: f64) -> Result<FixedPatternQTable> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("discount {gamma} outside [0, 1)")));
    }
    let m = model.n_subsets();
    let p = model.switch_prob();
    let mut trans = vec![vec![0.0; m]; m];
    for (i, row) in trans.iter_mut().enumerate() {
        row[i] += 1.0 - p;
        row[model.next_subset(i)] += p;
    }
    let reward: Vec<Vec<f64>> = trans
        .iter()
        .map(|row| (0..m).map(|j| 2.0 * row[j] - 1.0).collect())
        .collect();

    let mut policy: Vec<usize> = (0..m).collect();
    let mut value;
    loop {
        let r_pi: Vec<f64> = (0..m).map(|i| reward[i][policy[i]]).collect();
        value = evaluate(&trans, &r_pi, gamma)?;
        let cont: Vec<f64> = continuation(&trans, &value, gamma);
        let mut stable = true;
        for i in 0..m {
            let current = reward[i][policy[i]] + cont[i];
            let (j_best, q_best) = (0..m)
                .map(|j| (j, reward[i][j] + cont[i]))
                .fold((policy[i], current), |acc, x| if x.1 > acc.1 + 1e-14 { x } else { acc });
            if j_best != policy[i] && q_best > current + 1e-14 {
                policy[i] = j_best;
                stable = false;
            }
        }
        if stable {
            break;
        }
    }
    let cont = continuation(&trans, &value, gamma);
    let q = (0..m)
        .map(|i| (0..m).map(|j| reward[i][j] + cont[i]).collect())
        .collect();
    Ok(FixedPatternQTable {
        model: model.clone(),
        gamma,
        q,
        continuation: cont,
        value,
    })
}

fn continuation(trans: &[Vec<f64>], value: &[f64], gamma: f64) -> Vec<f64> {
    trans
        .iter()
        .map(|row| gamma * row.iter().zip(value).map(|(p, v)| p * v).sum::<f64>())
        .collect()
}

/// Solves `(I - gamma P) v = r` by Gaussian elimination with partial pivoting.
fn evaluate(trans: &[Vec<f64>], reward: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let m = reward.len();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m)
                .map(|j| if i == j { 1.0 } else { 0.0 } - gamma * trans[i][j])
                .collect();
            row.push(reward[i]);
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Numeric("singular policy-evaluation system".into()));
        }
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=m {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Ok((0..m).map(|i| a[i][m] / a[i][i]).collect())
}
