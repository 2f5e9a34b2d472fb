use rand::Rng;

use super::joint::TwoStateMatrix;
use super::{check_joint_capacity, check_probability, ChannelState, JointMarkovModel};
use crate::error::{Error, Result};
use crate::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    /// Identical copy of the source channel.
    Positive,
    /// Bitwise negation of the source channel.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DependentChannel {
    pub channel: usize,
    pub source: usize,
    pub correlation: Correlation,
}

/// A few independent channels sharing one two-state chain; every other
/// channel is a perfect (`+1`) or inverted (`-1`) copy of one of them.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedChannelModel {
    n_channels: usize,
    chain: TwoStateMatrix,
    independent: Vec<usize>,
    dependents: Vec<DependentChannel>,
}

impl CorrelatedChannelModel {
    pub fn new(
        n_channels: usize,
        chain: TwoStateMatrix,
        independent: Vec<usize>,
        dependents: Vec<DependentChannel>,
    ) -> Result<Self> {
        for (from, row) in chain.iter().enumerate() {
            check_probability(&format!("chain row {from}"), row[0])?;
            check_probability(&format!("chain row {from}"), row[1])?;
            if (row[0] + row[1] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidModel(format!("chain row {from} does not sum to 1")));
            }
        }
        if independent.is_empty() {
            return Err(Error::InvalidModel("at least one independent channel is required".into()));
        }
        let mut seen = vec![false; n_channels];
        let mut mark = |c: usize| -> Result<()> {
            if c >= n_channels {
                return Err(Error::InvalidModel(format!("channel {c} out of range")));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidModel(format!("channel {c} is assigned twice")));
            }
            Ok(())
        };
        for &c in &independent {
            mark(c)?;
        }
        for d in &dependents {
            mark(d.channel)?;
            if !independent.contains(&d.source) {
                return Err(Error::InvalidModel(format!(
                    "channel {} copies {}, which is not an independent channel",
                    d.channel, d.source
                )));
            }
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidModel(format!("channel {c} is neither independent nor dependent")));
        }
        Ok(Self {
            n_channels,
            chain,
            independent,
            dependents,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn chain(&self) -> TwoStateMatrix {
        self.chain
    }

    pub fn independent(&self) -> &[usize] {
        &self.independent
    }

    pub fn dependents(&self) -> &[DependentChannel] {
        &self.dependents
    }

    /// Stationary probability that an independent channel is good.
    pub fn stationary_good(&self) -> f64 {
        let p01 = self.chain[0][1];
        let p10 = self.chain[1][0];
        if p01 + p10 == 0.0 {
            0.5
        } else {
            p01 / (p01 + p10)
        }
    }

    /// Full state given the states of the independent channels (in the order
    /// of [`Self::independent`]).
    pub fn full_state(&self, independent_bits: &[bool]) -> ChannelState {
        let mut s = ChannelState::all_bad(self.n_channels);
        for (&c, &b) in self.independent.iter().zip(independent_bits) {
            s.set(c, b);
        }
        for d in &self.dependents {
            let src = s.is_good(d.source);
            s.set(
                d.channel,
                match d.correlation {
                    Correlation::Positive => src,
                    Correlation::Negative => !src,
                },
            );
        }
        s
    }

    pub(crate) fn sample_initial(&self, rng: &mut SimRng) -> Vec<bool> {
        let pi = self.stationary_good();
        self.independent.iter().map(|_| rng.gen::<f64>() < pi).collect()
    }

    pub(crate) fn advance(&self, bits: &mut [bool], rng: &mut SimRng) {
        for b in bits.iter_mut() {
            let p_good = self.chain[*b as usize][1];
            *b = rng.gen::<f64>() < p_good;
        }
    }

    pub fn to_joint(&self) -> Result<JointMarkovModel> {
        check_joint_capacity(self.n_channels)?;
        let k = self.independent.len();
        let n_states = 1usize << self.n_channels;
        let combos: Vec<Vec<bool>> = (0..1usize << k)
            .map(|c| (0..k).map(|i| (c >> (k - 1 - i)) & 1 == 1).collect())
            .collect();
        let indices: Vec<usize> = combos.iter().map(|b| self.full_state(b).to_index()).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n_states).map(|i| vec![(i, 1.0)]).collect();
        for (from_bits, &from) in combos.iter().zip(&indices) {
            rows[from] = combos
                .iter()
                .zip(&indices)
                .map(|(to_bits, &to)| {
                    let p: f64 = from_bits
                        .iter()
                        .zip(to_bits)
                        .map(|(&a, &b)| self.chain[a as usize][b as usize])
                        .product();
                    (to, p)
                })
                .collect();
            let s: f64 = rows[from].iter().map(|&(_, p)| p).sum();
            rows[from].iter_mut().for_each(|e| e.1 /= s);
        }
        JointMarkovModel::from_rows(self.n_channels, rows, indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_copy_joint_equals_base_chain() {
        let chain = [[0.6, 0.4], [0.2, 0.8]];
        let m = CorrelatedChannelModel::new(
            2,
            chain,
            vec![0],
            vec![DependentChannel {
                channel: 1,
                source: 0,
                correlation: Correlation::Positive,
            }],
        )
        .unwrap();
        let p = m.to_joint().unwrap();
        assert_eq!(p.support(), &[0, 3]);
        assert!((p.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((p.get(0, 3) - 0.4).abs() < 1e-15);
        assert!((p.get(3, 0) - 0.2).abs() < 1e-15);
        assert!((p.get(3, 3) - 0.8).abs() < 1e-15);
        assert_eq!(p.get(1, 1), 1.0);
    }

    #[test]
    fn negated_copy() {
        let m = CorrelatedChannelModel::new(
            3,
            [[0.5, 0.5], [0.5, 0.5]],
            vec![1],
            vec![
                DependentChannel { channel: 0, source: 1, correlation: Correlation::Negative },
                DependentChannel { channel: 2, source: 1, correlation: Correlation::Positive },
            ],
        )
        .unwrap();
        assert_eq!(m.full_state(&[true]).bits(), &[false, true, true]);
        assert_eq!(m.full_state(&[false]).bits(), &[true, false, false]);
    }

    #[test]
    fn rejects_unassigned_and_bad_sources() {
        let chain = [[0.5, 0.5], [0.5, 0.5]];
        assert!(CorrelatedChannelModel::new(2, chain, vec![0], vec![]).is_err());
        let bad_src = DependentChannel { channel: 1, source: 1, correlation: Correlation::Positive };
        assert!(CorrelatedChannelModel::new(2, chain, vec![0], vec![bad_src]).is_err());
    }
}
