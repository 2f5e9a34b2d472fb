//! DQN on perfectly correlated channels, tracking the average max Q-value of
//! fixed probe histories as training proceeds, against the myopic genie.

use chanaccess::channel::ChannelEnv;
use chanaccess::channel::ChannelModel;
use chanaccess::harness::{
    build_baseline, correlated_case, evaluate_agent, evaluate_policy, train_dqn, EvalSpec,
    LearnerSetup,
};
use chanaccess::nn::{DqnConfig, Preset, SingleUserTask, TrainSchedule};

fn main() -> chanaccess::Result<()> {
    let case = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0);
    let model = ChannelModel::Correlated(correlated_case(16, case, 0.3, 0.8)?);
    let spec = EvalSpec::default();
    let setup = LearnerSetup {
        dqn: DqnConfig::from_preset(Preset::Deep3, spec.gamma),
        window: None,
        schedule: TrainSchedule::default(),
        iterations: 30,
        curve_eval: EvalSpec {
            episodes: 100,
            ..spec
        },
        probe_count: 64,
        probe_rollout: 1000,
    };
    let trained = train_dqn(&model, &setup, 2)?;
    for p in trained.curve.iter().step_by(5) {
        println!("iteration {:>3}  return {:>7.3}  avg max Q {:>7.3}", p.iteration, p.mean_return, p.avg_max_q);
    }
    let mut task = SingleUserTask::new(ChannelEnv::new(model.clone(), 9)?);
    let dqn = evaluate_agent(&trained.agent, &mut task, trained.window, &spec, 9)?;
    println!("dqn     {:.3}", dqn.mean_return);
    for name in ["myopic", "whittle", "random"] {
        let mut p = build_baseline(name, &model, spec.gamma, 10_000, 7)?;
        println!("{name:<7} {:.3}", evaluate_policy(p.as_mut(), &model, &spec, 9)?.mean_return);
    }
    Ok(())
}
