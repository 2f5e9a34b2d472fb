use rand::{Rng, SeedableRng};

use crate::channel::{ChannelState, TraceModel};
use crate::error::{Error, Result};
use crate::SimRng;

/// Synthetic stand-in for a measured multichannel trace.
///
/// An interferer occupies either the lower or the upper half of the band and
/// hops between the halves after geometrically distributed bursts. Occupied
/// channels are bad; a free channel `k` is good with probability
/// `quality[k]` in each slot, independently.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSpec {
    pub slots: usize,
    /// Mean burst length of the interferer in one half, in slots.
    pub mean_burst: f64,
    pub quality: Vec<f64>,
}

impl Default for SurrogateSpec {
    fn default() -> Self {
        Self {
            slots: 50_000,
            mean_burst: 10.0,
            quality: vec![0.95, 0.75, 0.6, 0.85, 0.7, 0.9, 0.8, 0.65],
        }
    }
}

pub fn synthesize_bursty_trace(spec: &SurrogateSpec, seed: u64) -> Result<TraceModel> {
    let n = spec.quality.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "surrogate needs an even number of channels, got {n}"
        )));
    }
    if spec.quality.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::InvalidArgument("channel qualities must lie in [0, 1]".into()));
    }
    if !(spec.mean_burst >= 1.0) || spec.slots == 0 {
        return Err(Error::InvalidArgument(
            "surrogate needs a mean burst of at least one slot and a positive length".into(),
        ));
    }
    let hop = 1.0 / spec.mean_burst;
    let mut rng = SimRng::seed_from_u64(seed);
    let mut upper = rng.gen::<bool>();
    let mut slots = Vec::with_capacity(spec.slots);
    for _ in 0..spec.slots {
        let bits = (0..n)
            .map(|c| {
                let occupied = (c >= n / 2) == upper;
                let noise_ok = rng.gen::<f64>() < spec.quality[c];
                !occupied && noise_ok
            })
            .collect();
        slots.push(ChannelState::new(bits)?);
        if rng.gen::<f64>() < hop {
            upper = !upper;
        }
    }
    TraceModel::new(slots)
}
