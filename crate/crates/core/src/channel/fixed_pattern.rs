use rand::seq::SliceRandom;

use super::{channel_mask, check_joint_capacity, check_probability, ChannelState, JointMarkovModel};
use crate::error::{Error, Result};
use crate::SimRng;

/// Channels partitioned into subsets `C_1..C_M` that take turns being good in
/// circular order. Each slot the active subset advances with probability
/// `switch_prob` and otherwise stays; exactly the active subset is good.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPatternModel {
    n_channels: usize,
    subsets: Vec<Vec<usize>>,
    subset_of: Vec<usize>,
    switch_prob: f64,
}

impl FixedPatternModel {
    pub fn new(n_channels: usize, subsets: Vec<Vec<usize>>, switch_prob: f64) -> Result<Self> {
        check_probability("switch probability", switch_prob)?;
        if n_channels == 0 || subsets.is_empty() {
            return Err(Error::InvalidModel("fixed pattern needs channels and subsets".into()));
        }
        let mut subset_of = vec![usize::MAX; n_channels];
        for (i, subset) in subsets.iter().enumerate() {
            if subset.is_empty() {
                return Err(Error::InvalidModel(format!("subset {i} is empty")));
            }
            for &ch in subset {
                if ch >= n_channels {
                    return Err(Error::InvalidModel(format!(
                        "subset {i} names channel {ch} of a {n_channels}-channel system"
                    )));
                }
                if subset_of[ch] != usize::MAX {
                    return Err(Error::InvalidModel(format!(
                        "channel {ch} appears in subsets {} and {i}",
                        subset_of[ch]
                    )));
                }
                subset_of[ch] = i;
            }
        }
        if let Some(ch) = subset_of.iter().position(|&s| s == usize::MAX) {
            return Err(Error::InvalidModel(format!("channel {ch} belongs to no subset")));
        }
        Ok(Self {
            n_channels,
            subsets,
            subset_of,
            switch_prob,
        })
    }

    /// Single good channel moving `0, 1, ..., n-1, 0, ...`.
    pub fn round_robin(n_channels: usize, switch_prob: f64) -> Result<Self> {
        Self::new(n_channels, (0..n_channels).map(|c| vec![c]).collect(), switch_prob)
    }

    /// Consecutive blocks of `subset_size` channels activated in order.
    pub fn contiguous(n_channels: usize, subset_size: usize, switch_prob: f64) -> Result<Self> {
        if subset_size == 0 || n_channels % subset_size != 0 {
            return Err(Error::InvalidModel(format!(
                "{n_channels} channels cannot be split evenly into subsets of {subset_size}"
            )));
        }
        let subsets = (0..n_channels)
            .collect::<Vec<_>>()
            .chunks(subset_size)
            .map(<[usize]>::to_vec)
            .collect();
        Self::new(n_channels, subsets, switch_prob)
    }

    /// Evenly sized subsets with channels assigned, and subsets ordered, by a
    /// random permutation.
    pub fn shuffled(
        n_channels: usize,
        subset_size: usize,
        switch_prob: f64,
        rng: &mut SimRng,
    ) -> Result<Self> {
        let base = Self::contiguous(n_channels, subset_size, switch_prob)?;
        let mut perm: Vec<usize> = (0..n_channels).collect();
        perm.shuffle(rng);
        let subsets = base
            .subsets
            .iter()
            .map(|s| {
                let mut v: Vec<usize> = s.iter().map(|&c| perm[c]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        Self::new(n_channels, subsets, switch_prob)
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn n_subsets(&self) -> usize {
        self.subsets.len()
    }

    pub fn switch_prob(&self) -> f64 {
        self.switch_prob
    }

    /// Index of the subset holding `channel`.
    pub fn subset_of(&self, channel: usize) -> usize {
        self.subset_of[channel]
    }

    pub fn next_subset(&self, i: usize) -> usize {
        (i + 1) % self.subsets.len()
    }

    pub fn subset_state(&self, i: usize) -> ChannelState {
        let mut s = ChannelState::all_bad(self.n_channels);
        for &c in &self.subsets[i] {
            s.set(c, true);
        }
        s
    }

    fn subset_index(&self, i: usize) -> usize {
        self.subsets[i]
            .iter()
            .fold(0, |acc, &c| acc | channel_mask(self.n_channels, c))
    }

    pub fn to_joint(&self) -> Result<JointMarkovModel> {
        check_joint_capacity(self.n_channels)?;
        let n_states = 1usize << self.n_channels;
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n_states).map(|i| vec![(i, 1.0)]).collect();
        let mut support = Vec::with_capacity(self.subsets.len());
        for i in 0..self.subsets.len() {
            let from = self.subset_index(i);
            let to = self.subset_index(self.next_subset(i));
            rows[from] = vec![(from, 1.0 - self.switch_prob), (to, self.switch_prob)];
            support.push(from);
        }
        JointMarkovModel::from_rows(self.n_channels, rows, support)
    }
}
