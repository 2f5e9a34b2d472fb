use super::GilbertElliotChain;
use crate::error::{Error, Result};

/// Maximum-likelihood two-state chain with a flag per source state telling
/// whether it was ever visited (unvisited rows default to `[0.5, 0.5]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub chain: GilbertElliotChain,
    pub bad_row_observed: bool,
    pub good_row_observed: bool,
}

/// Counts transitions of a fully observed good/bad sequence.
pub fn mle_estimate_chain(observations: &[bool]) -> Result<MleEstimate> {
    if observations.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 observations, got {}",
            observations.len()
        )));
    }
    let mut counts = [[0usize; 2]; 2];
    for w in observations.windows(2) {
        counts[w[0] as usize][w[1] as usize] += 1;
    }
    let row = |from: usize| {
        let total = counts[from][0] + counts[from][1];
        if total == 0 {
            (0.5, false)
        } else {
            (counts[from][1] as f64 / total as f64, true)
        }
    };
    let (p01, bad_seen) = row(0);
    let (p11, good_seen) = row(1);
    Ok(MleEstimate {
        chain: GilbertElliotChain::new(p01, p11)?,
        bad_row_observed: bad_seen,
        good_row_observed: good_seen,
    })
}
