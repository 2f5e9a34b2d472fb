use super::{channel_mask, check_joint_capacity, check_probability, ChannelState, JointMarkovModel};
use crate::error::{Error, Result};

/// A block of `width` consecutive good channels (wrapping around) that slides
/// forward by one channel with probability `switch_prob` each slot. Used for
/// the centralized multi-user scenario where most channels are good at once.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingWindowModel {
    n_channels: usize,
    width: usize,
    switch_prob: f64,
}

impl SlidingWindowModel {
    pub fn new(n_channels: usize, width: usize, switch_prob: f64) -> Result<Self> {
        check_probability("switch probability", switch_prob)?;
        if width == 0 || width > n_channels {
            return Err(Error::InvalidModel(format!(
                "window width {width} must lie in 1..={n_channels}"
            )));
        }
        Ok(Self {
            n_channels,
            width,
            switch_prob,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn switch_prob(&self) -> f64 {
        self.switch_prob
    }

    pub fn state_at(&self, start: usize) -> ChannelState {
        let mut s = ChannelState::all_bad(self.n_channels);
        for i in 0..self.width {
            s.set((start + i) % self.n_channels, true);
        }
        s
    }

    pub fn to_joint(&self) -> Result<JointMarkovModel> {
        check_joint_capacity(self.n_channels)?;
        let n = self.n_channels;
        let index = |start: usize| {
            (0..self.width).fold(0, |acc, i| acc | channel_mask(n, (start + i) % n))
        };
        let mut rows: Vec<Vec<(usize, f64)>> = (0..1usize << n).map(|i| vec![(i, 1.0)]).collect();
        let mut support = Vec::new();
        for start in 0..n {
            let from = index(start);
            let to = index((start + 1) % n);
            rows[from] = vec![(from, 1.0 - self.switch_prob), (to, self.switch_prob)];
            support.push(from);
        }
        JointMarkovModel::from_rows(n, rows, support)
    }
}
