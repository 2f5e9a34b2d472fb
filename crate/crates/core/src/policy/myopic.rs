use super::{argmax_lowest, AccessPolicy};
use crate::belief::BeliefVector;
use crate::channel::{CorrelatedChannelModel, Correlation, JointMarkovModel};
use crate::error::{Error, Result};
use crate::SimRng;

/// Marginals computed by summing joint-belief entries carry rounding noise;
/// differences below this count as ties.
const MARGINAL_TIE_TOLERANCE: f64 = 1e-12;

/// Channel with the highest probability of being good.
pub fn myopic_action(belief: &BeliefVector) -> usize {
    argmax_lowest(&belief.marginals(), MARGINAL_TIE_TOLERANCE)
}

/// Myopic choice from per-channel good probabilities, exact comparison.
pub fn myopic_action_from_marginals(omega: &[f64]) -> usize {
    argmax_lowest(omega, 0.0)
}

/// Myopic policy run as a genie: it filters the exact joint belief with the
/// true transition matrix.
#[derive(Debug, Clone)]
pub struct MyopicPolicy {
    model: JointMarkovModel,
    initial: BeliefVector,
    belief: BeliefVector,
}

impl MyopicPolicy {
    pub fn new(model: JointMarkovModel, initial: BeliefVector) -> Self {
        Self {
            belief: initial.clone(),
            model,
            initial,
        }
    }

    pub fn belief(&self) -> &BeliefVector {
        &self.belief
    }
}

impl AccessPolicy for MyopicPolicy {
    fn name(&self) -> &str {
        "myopic"
    }

    fn n_channels(&self) -> usize {
        self.model.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.belief = self.initial.clone();
        Ok(())
    }

    fn act(&mut self, _rng: &mut SimRng) -> Result<usize> {
        Ok(myopic_action(&self.belief))
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        self.belief = self.belief.sense_and_advance(&self.model, action, observation)?;
        Ok(())
    }
}

/// Myopic genie for perfectly correlated channels. The joint belief factors
/// over the independent channels, so it tracks one good-probability per
/// independent channel instead of `2^N` joint entries.
#[derive(Debug, Clone)]
pub struct CorrelatedMyopicPolicy {
    model: CorrelatedChannelModel,
    /// For each channel: index into the independent list and whether the
    /// channel is inverted.
    source: Vec<(usize, bool)>,
    omega: Vec<f64>,
}

impl CorrelatedMyopicPolicy {
    pub fn new(model: CorrelatedChannelModel) -> Self {
        let mut source = vec![(0, false); model.n_channels()];
        for (i, &c) in model.independent().iter().enumerate() {
            source[c] = (i, false);
        }
        for d in model.dependents() {
            let i = model.independent().iter().position(|&c| c == d.source).unwrap();
            source[d.channel] = (i, d.correlation == Correlation::Negative);
        }
        let omega = vec![model.stationary_good(); model.independent().len()];
        Self {
            model,
            source,
            omega,
        }
    }

    pub fn marginals(&self) -> Vec<f64> {
        self.source
            .iter()
            .map(|&(i, inv)| if inv { 1.0 - self.omega[i] } else { self.omega[i] })
            .collect()
    }
}

impl AccessPolicy for CorrelatedMyopicPolicy {
    fn name(&self) -> &str {
        "myopic"
    }

    fn n_channels(&self) -> usize {
        self.model.n_channels()
    }

    fn reset(&mut self) -> Result<()> {
        self.omega.fill(self.model.stationary_good());
        Ok(())
    }

    fn act(&mut self, _rng: &mut SimRng) -> Result<usize> {
        Ok(argmax_lowest(&self.marginals(), MARGINAL_TIE_TOLERANCE))
    }

    fn observe(&mut self, action: usize, observation: bool) -> Result<()> {
        let &(i, inv) = self.source.get(action).ok_or_else(|| {
            Error::InvalidArgument(format!("action {action} outside 0..{}", self.source.len()))
        })?;
        self.omega[i] = if observation != inv { 1.0 } else { 0.0 };
        let chain = self.model.chain();
        for w in &mut self.omega {
            *w = *w * chain[1][1] + (1.0 - *w) * chain[0][1];
        }
        Ok(())
    }
}
