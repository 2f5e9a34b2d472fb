//! Synthesizes a bursty 8-channel interference trace, writes it to disk,
//! reloads it and compares the Whittle heuristic with random access.

use chanaccess::channel::{load_trace, write_trace, ChannelModel};
use chanaccess::harness::{build_baseline, evaluate_policy, synthesize_bursty_trace, EvalSpec, SurrogateSpec};

fn main() -> chanaccess::Result<()> {
    let trace = synthesize_bursty_trace(&SurrogateSpec::default(), 7)?;
    let path = std::env::temp_dir().join("chanaccess_surrogate.txt");
    write_trace(&path, &trace, "synthetic bursty trace, seed 7")?;
    let trace = load_trace(&path)?;
    println!("{} channels, {} slots, written to {}", trace.n_channels(), trace.len(), path.display());
    for c in 0..trace.n_channels() {
        let s = trace.channel_series(c);
        println!("channel {c}: good {:.3}", s.iter().filter(|&&g| g).count() as f64 / s.len() as f64);
    }
    let model = ChannelModel::Trace(trace);
    for name in ["whittle", "random"] {
        let mut p = build_baseline(name, &model, 0.9, 10_000, 3)?;
        let r = evaluate_policy(p.as_mut(), &model, &EvalSpec::default(), 4)?;
        println!("{name:<8} {:.4} +- {:.4}", r.mean_return, r.stderr);
    }
    Ok(())
}
