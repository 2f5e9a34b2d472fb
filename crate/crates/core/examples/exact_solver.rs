//! Closed-form fixed-pattern Q-values, and the exact finite-horizon POMDP
//! solver agreeing with the myopic choice on two positively correlated
//! channels.

use chanaccess::belief::{exact_finite_horizon_solve, fixed_pattern_q, BeliefVector};
use chanaccess::channel::{build_joint_from_marginals, FixedPatternModel};
use chanaccess::policy::myopic_action;

fn main() -> chanaccess::Result<()> {
    let model = FixedPatternModel::round_robin(4, 0.9)?;
    let q = fixed_pattern_q(&model, 0.9)?;
    println!("round robin, 4 channels, p = 0.9");
    for s in 0..q.n_states() {
        let row: Vec<String> = (0..q.n_states()).map(|j| format!("{:7.3}", q.q_subset(s, j))).collect();
        println!("  after S{s}: {}  best C{}", row.join(" "), q.best_subset(s));
    }

    let joint = build_joint_from_marginals(&[[[0.7, 0.3], [0.2, 0.8]], [[0.6, 0.4], [0.1, 0.9]]])?;
    println!("two channels, horizon 8");
    for probs in [[0.25, 0.25, 0.25, 0.25], [0.1, 0.6, 0.2, 0.1], [0.4, 0.1, 0.4, 0.1]] {
        let b = BeliefVector::new(2, probs.to_vec())?;
        let (v, a) = exact_finite_horizon_solve(&joint, 0.9, 8, &b)?;
        println!("  belief {probs:?}: value {v:.4}, first action {a}, myopic {}", myopic_action(&b));
    }
    Ok(())
}
