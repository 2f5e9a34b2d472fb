//! Genie returns on 16-channel round-robin switching against the closed form
//! `1 + (2p - 1) gamma (1 - gamma^(L-1)) / (1 - gamma)`.

use chanaccess::channel::{ChannelModel, FixedPatternModel};
use chanaccess::harness::{evaluate_policy, EvalSpec};
use chanaccess::policy::GeniePolicy;

fn main() -> chanaccess::Result<()> {
    let spec = EvalSpec {
        episodes: 2_000,
        ..EvalSpec::default()
    };
    let g = spec.gamma;
    println!("{:>4} {:>10} {:>10}", "p", "genie", "closed");
    for p in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let model = FixedPatternModel::round_robin(16, p)?;
        let mut genie = GeniePolicy::new(model.clone());
        let r = evaluate_policy(&mut genie, &ChannelModel::FixedPattern(model), &spec, 11)?;
        let closed = 1.0 + (2.0 * p - 1.0) * g * (1.0 - g.powi(spec.length as i32 - 1)) / (1.0 - g);
        println!("{p:>4.1} {:>10.4} {closed:>10.4}", r.mean_return);
    }
    Ok(())
}
