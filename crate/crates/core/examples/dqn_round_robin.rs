//! Trains a DQN on round-robin switching and compares it to the genie and
//! the Whittle heuristic. Pass the iteration count as the first argument
//! (default 60; one iteration is 1000 environment steps).

use chanaccess::channel::{ChannelModel, FixedPatternModel};
use chanaccess::harness::{
    build_baseline, evaluate_agent, evaluate_policy, train_dqn, EvalSpec, LearnerSetup,
};
use chanaccess::channel::ChannelEnv;
use chanaccess::nn::{DqnConfig, Preset, SingleUserTask, TrainSchedule};

fn main() -> chanaccess::Result<()> {
    let iterations = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(60);
    let model = ChannelModel::FixedPattern(FixedPatternModel::round_robin(16, 0.9)?);
    let spec = EvalSpec::default();
    let setup = LearnerSetup {
        dqn: DqnConfig::from_preset(Preset::Wide2, spec.gamma),
        window: None,
        schedule: TrainSchedule::default(),
        iterations,
        curve_eval: EvalSpec {
            episodes: 100,
            ..spec
        },
        probe_count: 64,
        probe_rollout: 1000,
    };
    let trained = train_dqn(&model, &setup, 1)?;
    for p in trained.curve.iter().step_by(10) {
        println!("iteration {:>4}  return {:>8.3}  avg max Q {:>8.3}", p.iteration, p.mean_return, p.avg_max_q);
    }
    let mut task = SingleUserTask::new(ChannelEnv::new(model.clone(), 99)?);
    let dqn = evaluate_agent(&trained.agent, &mut task, trained.window, &spec, 99)?;
    println!("dqn     {:.3} +- {:.3}", dqn.mean_return, dqn.stderr);
    for name in ["genie", "whittle", "random"] {
        let mut p = build_baseline(name, &model, spec.gamma, 10_000, 7)?;
        let r = evaluate_policy(p.as_mut(), &model, &spec, 99)?;
        println!("{name:<7} {:.3} +- {:.3}", r.mean_return, r.stderr);
    }
    Ok(())
}
