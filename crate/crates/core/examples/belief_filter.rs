//! Exact belief filtering over the 2^N joint states of three independent
//! Gilbert-Elliott channels, with the per-channel marginals it implies.

use chanaccess::belief::{marginal_channel_chain, BeliefVector};
use chanaccess::channel::{build_joint_from_marginals, stationary_distribution};

fn main() -> chanaccess::Result<()> {
    let chains = [
        [[0.7, 0.3], [0.2, 0.8]],
        [[0.9, 0.1], [0.4, 0.6]],
        [[0.5, 0.5], [0.5, 0.5]],
    ];
    let joint = build_joint_from_marginals(&chains)?;
    let mut belief: BeliefVector = stationary_distribution(&joint)?;
    println!("stationary marginals {:?}", fmt(&belief.marginals()));

    for (channel, seen) in [(0, true), (1, false), (0, false), (2, true)] {
        belief = belief.sense_and_advance(&joint, channel, seen)?;
        let total: f64 = belief.probs().iter().sum();
        println!(
            "sense {channel} -> {:<5}  marginals {:?}  mass {total:.12}",
            seen,
            fmt(&belief.marginals())
        );
    }

    for c in 0..3 {
        let m = marginal_channel_chain(&joint, c)?;
        println!("channel {c}: p01 = {:.3}, p11 = {:.3}", m[0][1], m[1][1]);
    }
    Ok(())
}

fn fmt(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.4}")).collect()
}
