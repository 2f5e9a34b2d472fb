use rand::Rng;

use super::{check_joint_capacity, check_probability};
use crate::belief::BeliefVector;
use crate::error::{Error, Result};
use crate::SimRng;

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const STATIONARY_TOLERANCE: f64 = 1e-10;
const POWER_ITERATION_CAP: usize = 200_000;
const MAX_DETECTED_PERIOD: usize = 256;
const MAX_NONZEROS: usize = 1 << 26;

/// Row-stochastic transition matrix over the `2^N` joint channel states.
///
/// Rows are stored sparsely. `support` lists the states the originating model
/// can actually occupy; power iteration starts from the uniform distribution
/// over it.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMarkovModel {
    n_channels: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    support: Vec<usize>,
}

impl JointMarkovModel {
    /// Builds a model from sparse rows `(target, probability)`; duplicate
    /// targets within a row are merged.
    pub fn from_rows(
        n_channels: usize,
        rows: Vec<Vec<(usize, f64)>>,
        support: Vec<usize>,
    ) -> Result<Self> {
        check_joint_capacity(n_channels)?;
        let n_states = 1usize << n_channels;
        if rows.len() != n_states {
            return Err(Error::Dimension {
                expected: n_states,
                found: rows.len(),
            });
        }
        let mut row_start = Vec::with_capacity(n_states + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            let mut sum = 0.0;
            let first = cols.len();
            for (j, p) in row {
                if j >= n_states {
                    return Err(Error::InvalidModel(format!(
                        "row {i} targets state {j}, beyond {n_states} states"
                    )));
                }
                if !(p >= 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "row {i} has negative or NaN entry {p}"
                    )));
                }
                sum += p;
                if p == 0.0 {
                    continue;
                }
                if cols.len() > first && *cols.last().unwrap() == j {
                    *vals.last_mut().unwrap() += p;
                } else {
                    cols.push(j);
                    vals.push(p);
                }
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!("row {i} sums to {sum}")));
            }
            if cols.len() > MAX_NONZEROS {
                return Err(Error::Capacity(format!(
                    "joint matrix exceeds {MAX_NONZEROS} stored entries"
                )));
            }
            row_start.push(cols.len());
        }
        let mut support = support;
        support.sort_unstable();
        support.dedup();
        if support.is_empty() || support.iter().any(|&s| s >= n_states) {
            return Err(Error::InvalidModel("support must be a nonempty set of states".into()));
        }
        Ok(Self {
            n_channels,
            row_start,
            cols,
            vals,
            support,
        })
    }

    /// Dense constructor; every state is in the support.
    pub fn from_dense(n_channels: usize, matrix: &[Vec<f64>]) -> Result<Self> {
        check_joint_capacity(n_channels)?;
        let rows = matrix
            .iter()
            .map(|row| row.iter().copied().enumerate().collect())
            .collect();
        Self::from_rows(n_channels, rows, (0..1 << n_channels).collect())
    }

    pub fn identity(n_channels: usize) -> Result<Self> {
        check_joint_capacity(n_channels)?;
        let n_states = 1 << n_channels;
        let rows = (0..n_states).map(|i| vec![(i, 1.0)]).collect();
        Self::from_rows(n_channels, rows, (0..n_states).collect())
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_states(&self) -> usize {
        1 << self.n_channels
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Nonzero entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_start[i]..self.row_start[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, p)| p)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_states())
            .map(|i| {
                let mut row = vec![0.0; self.n_states()];
                for (j, p) in self.row(i) {
                    row[j] = p;
                }
                row
            })
            .collect()
    }

    /// Row-vector times matrix.
    pub fn propagate(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_states()];
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (j, p) in self.row(i) {
                out[j] += w * p;
            }
        }
        out
    }

    pub fn sample_next(&self, state: usize, rng: &mut SimRng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = state;
        for (j, p) in self.row(state) {
            acc += p;
            if u < acc {
                return j;
            }
            last = j;
        }
        last
    }
}

/// 2x2 chain indexed `[from][to]` with 0 = bad, 1 = good.
pub type TwoStateMatrix = [[f64; 2]; 2];

/// Joint model of independent channels: the transition is the product of
/// the per-channel transitions.
pub fn build_joint_from_marginals(chains: &[TwoStateMatrix]) -> Result<JointMarkovModel> {
    let n = chains.len();
    check_joint_capacity(n)?;
    for (k, chain) in chains.iter().enumerate() {
        for (from, row) in chain.iter().enumerate() {
            check_probability(&format!("chain {k} row {from}"), row[0])?;
            check_probability(&format!("chain {k} row {from}"), row[1])?;
            if (row[0] + row[1] - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "chain {k} row {from} sums to {}",
                    row[0] + row[1]
                )));
            }
        }
    }
    let n_states = 1usize << n;
    if n_states.saturating_mul(n_states) > MAX_NONZEROS {
        return Err(Error::Capacity(format!(
            "a product of {n} chains has 4^{n} entries"
        )));
    }
    let rows = (0..n_states)
        .map(|i| {
            (0..n_states)
                .map(|j| {
                    let p = (0..n)
                        .map(|k| {
                            let from = super::state_bit(n, i, k) as usize;
                            let to = super::state_bit(n, j, k) as usize;
                            chains[k][from][to]
                        })
                        .product::<f64>();
                    (j, p)
                })
                .collect()
        })
        .collect();
    // Product rows may drift from 1 by rounding; renormalize before validation.
    let rows: Vec<Vec<(usize, f64)>> = rows_renormalized(rows);
    JointMarkovModel::from_rows(n, rows, (0..n_states).collect())
}

fn rows_renormalized(rows: Vec<Vec<(usize, f64)>>) -> Vec<Vec<(usize, f64)>> {
    rows.into_iter()
        .map(|row| {
            let s: f64 = row.iter().map(|&(_, p)| p).sum();
            row.into_iter().map(|(j, p)| (j, p / s)).collect()
        })
        .collect()
}

/// Stationary distribution by power iteration from the uniform distribution
/// over the model's support.
///
/// If the iterates do not settle (a periodic chain), the Cesàro average over
/// one detected period is returned instead.
pub fn stationary_distribution(model: &JointMarkovModel) -> Result<BeliefVector> {
    let n_states = model.n_states();
    let mut x = vec![0.0; n_states];
    let w = 1.0 / model.support().len() as f64;
    for &s in model.support() {
        x[s] = w;
    }
    let mut last_delta = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let next = model.propagate(&x);
        last_delta = l1_distance(&next, &x);
        x = next;
        if last_delta < STATIONARY_TOLERANCE {
            return BeliefVector::from_unnormalized(model.n_channels(), x);
        }
    }

    // Periodic regime: find d with x P^d = x and average one full period.
    let anchor = x.clone();
    let mut sum = x.clone();
    let mut cur = x;
    for d in 1..=MAX_DETECTED_PERIOD {
        cur = model.propagate(&cur);
        if l1_distance(&cur, &anchor) < STATIONARY_TOLERANCE {
            let avg: Vec<f64> = sum.iter().map(|v| v / d as f64).collect();
            let residual = l1_distance(&model.propagate(&avg), &avg);
            if residual < STATIONARY_TOLERANCE * 10.0 {
                return BeliefVector::from_unnormalized(model.n_channels(), avg);
            }
            break;
        }
        for (s, v) in sum.iter_mut().zip(&cur) {
            *s += v;
        }
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge after {POWER_ITERATION_CAP} iterations \
         (last L1 change {last_delta:.3e}) and no period <= {MAX_DETECTED_PERIOD} was found"
    )))
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
