use super::AccessPolicy;
use crate::channel::FixedPatternModel;
use crate::error::Result;
use crate::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchRegime {
    /// `p >= 0.5`: after a good slot move on to the next subset, after a bad
    /// slot stay put.
    Frequent,
    /// `p < 0.5`: after a good slot stay put, after a bad slot move on.
    Rare,
}

impl SwitchRegime {
    pub fn for_switch_prob(p: f64) -> Self {
        if p >= 0.5 {
            SwitchRegime::Frequent
        } else {
            SwitchRegime::Rare
        }
    }
}

/// Optimal policy for a known fixed-pattern system: start in the first
/// subset, then advance or stay according to the last observation and the
/// switching regime. Within a subset the lowest-index channel is used.
#[derive(Debug, Clone)]
pub struct GeniePolicy {
    model: FixedPatternModel,
    regime: SwitchRegime,
    last: Option<(usize, bool)>,
}

impl GeniePolicy {
    pub fn new(model: FixedPatternModel) -> Self {
        let regime = SwitchRegime::for_switch_prob(model.switch_prob());
        Self {
            model,
            regime,
            last: None,
        }
    }

    pub fn regime(&self) -> SwitchRegime {
        self.regime
    }

    /// Restores a specific previous (channel, observation) pair.
    pub fn set_last(&mut self, last: Option<(usize, bool)>) {
        self.last = last;
    }

    fn first_channel(&self, subset: usize) -> usize {
        self.model.subsets()[subset]
            .iter()
            .copied()
            .min()
            .expect("subsets are nonempty")
    }

    /// The genie decision for the current slot.
    pub fn action(&self) -> usize {
        match self.last {
            None => self.first_channel(0),
            Some((channel, good)) => {
                let advance = match self.regime {
                    SwitchRegime::Frequent => good,
                    SwitchRegime::Rare => !good,
                };
                if advance {
                    self.first_channel(self.model.next_subset(self.model.subset_of(channel)))
                } else {
                    channel
                }
            }
        }
    }
}

impl AccessPolicy for GeniePolicy {
    fn name(&self) -> &str {
        "genie"
    }

    fn n_channels(&self) -> usize {
        self.model.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.last = None;
        Ok(())
    }

    fn act(&mut self, _rng: &mut SimRng) -> Result<usize> {
        Ok(self.action())
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        self.last = Some((action, observation));
        Ok(())
    }
}
