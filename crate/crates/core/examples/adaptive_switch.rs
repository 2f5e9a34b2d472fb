//! Pretrains on 8-good contiguous switching, switches to 1-good round robin
//! and lets the monitor trigger retraining.

use chanaccess::channel::{ChannelModel, FixedPatternModel, NonstationaryModel};
use chanaccess::harness::{run_adaptive_dqn, AdaptiveConfig, EvalSpec, LearnerSetup};
use chanaccess::nn::{DqnConfig, Preset, TrainSchedule};

fn main() -> chanaccess::Result<()> {
    let periods = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(90);
    let adaptive = AdaptiveConfig::default();
    let model = NonstationaryModel::new(
        ChannelModel::FixedPattern(FixedPatternModel::contiguous(16, 8, 0.9)?),
        ChannelModel::FixedPattern(FixedPatternModel::round_robin(16, 0.9)?),
        5 * adaptive.period as u64,
    )?;
    let spec = EvalSpec::default();
    let setup = LearnerSetup {
        dqn: DqnConfig::from_preset(Preset::Wide2, spec.gamma),
        window: None,
        schedule: TrainSchedule::default(),
        iterations: 10,
        curve_eval: EvalSpec {
            episodes: 100,
            ..spec
        },
        probe_count: 16,
        probe_rollout: 1000,
    };
    let (after, stale, log, _) = run_adaptive_dqn(&model, &setup, &adaptive, periods, &spec, 1)?;
    for e in log.entries.iter().filter(|e| e.triggered || e.period % 10 == 0 || e.period <= 7) {
        println!(
            "period {:>3} phase {} return {:>8.3} best {:>8.3}{}{}",
            e.period,
            e.phase,
            e.mean_return,
            e.best_return,
            if e.retraining { " retraining" } else { "" },
            if e.triggered { " TRIGGER" } else { "" }
        );
    }
    println!("pretrained policy after the switch: {:.3}", stale.mean_return);
    println!("after retraining:                   {:.3}", after.mean_return);
    Ok(())
}
