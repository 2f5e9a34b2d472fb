use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::policy::argmax_lowest;
use crate::SimRng;

/// Look-up table of Q-values keyed by encoded history; unseen entries are 0.
#[derive(Debug, Clone)]
pub struct TabularQ {
    n_actions: usize,
    alpha: f64,
    table: HashMap<Vec<i8>, Vec<f64>>,
}

impl TabularQ {
    pub fn new(n_actions: usize, alpha: f64) -> Result<Self> {
        if n_actions == 0 {
            return Err(Error::InvalidArgument("Q-table needs at least one action".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("learning rate {alpha} outside (0, 1)")));
        }
        Ok(Self {
            n_actions,
            alpha,
            table: HashMap::new(),
        })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of histories with a stored row.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn q_values(&self, state: &[i8]) -> Vec<f64> {
        self.table
            .get(state)
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.n_actions])
    }

    pub fn q(&self, state: &[i8], action: usize) -> f64 {
        self.table.get(state).map_or(0.0, |row| row[action])
    }

    /// `Q(x, a) += alpha * (r + gamma * max_a' Q(x', a') - Q(x, a))`.
    pub fn update(
        &mut self,
        state: &[i8],
        action: usize,
        reward: f64,
        next_state: &[i8],
        gamma: f64,
    ) -> Result<()> {
        if action >= self.n_actions {
            return Err(Error::InvalidArgument(format!(
                "action {action} outside 0..{}",
                self.n_actions
            )));
        }
        let best_next = self
            .table
            .get(next_state)
            .map_or(0.0, |row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let n = self.n_actions;
        let alpha = self.alpha;
        let row = self.table.entry(state.to_vec()).or_insert_with(|| vec![0.0; n]);
        row[action] += alpha * (reward + gamma * best_next - row[action]);
        Ok(())
    }

    pub fn greedy_action(&self, state: &[i8]) -> usize {
        self.table.get(state).map_or(0, |row| argmax_lowest(row, 0.0))
    }

    pub fn act(&self, state: &[i8], epsilon: f64, rng: &mut SimRng) -> usize {
        if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
            rng.gen_range(0..self.n_actions)
        } else {
            self.greedy_action(state)
        }
    }
}
