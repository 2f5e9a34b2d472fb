//! Centralized access for several users on 8 channels where a window of 6
//! good channels slides round robin. One DQN action picks a channel subset.

use chanaccess::channel::{ChannelEnv, ChannelModel, SlidingWindowModel};
use chanaccess::harness::{
    channel_subsets, evaluate_agent, evaluate_task, multi_user_train, EvalSpec, LearnerSetup,
    MultiUserTask,
};
use chanaccess::nn::{DqnConfig, Preset, TrainSchedule};
use chanaccess::policy::random_action;

fn main() -> chanaccess::Result<()> {
    let model = ChannelModel::Window(SlidingWindowModel::new(8, 6, 0.9)?);
    let spec = EvalSpec::default();
    let setup = LearnerSetup {
        dqn: DqnConfig::from_preset(Preset::Wide2, spec.gamma),
        window: None,
        schedule: TrainSchedule::default(),
        iterations: 20,
        curve_eval: EvalSpec {
            episodes: 50,
            ..spec
        },
        probe_count: 0,
        probe_rollout: 0,
    };
    for users in [2, 3] {
        println!("{users} users: {} joint actions", channel_subsets(8, users)?.len());
        let trained = multi_user_train(&model, users, &setup, 1)?;
        let mut task = MultiUserTask::new(ChannelEnv::new(model.clone(), 5)?, users)?;
        let dqn = evaluate_agent(&trained.agent, &mut task, trained.window, &spec, 5)?;
        let n_actions = task.subsets().len();
        let random = evaluate_task("random", &mut task, 1, &spec, 5, &mut |_, rng| {
            Ok(random_action(n_actions, rng))
        })?;
        println!("  dqn {:.3}  random {:.3}", dqn.mean_return, random.mean_return);
    }
    Ok(())
}
