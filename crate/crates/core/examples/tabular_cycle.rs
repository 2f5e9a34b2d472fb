//! Tabular Q-learning on a deterministic two-channel cycle learns to follow
//! the good channel, for a return of about 10.

use chanaccess::channel::{ChannelEnv, ChannelModel, FixedPatternModel};
use chanaccess::harness::{evaluate_policy, EvalSpec};
use chanaccess::nn::{decode_slot, tabular_train, SingleUserTask, TabularPolicy, TabularQ};

fn main() -> chanaccess::Result<()> {
    let model = ChannelModel::FixedPattern(FixedPatternModel::round_robin(2, 1.0)?);
    let mut table = TabularQ::new(2, 0.1)?;
    let mut task = SingleUserTask::new(ChannelEnv::new(model.clone(), 5)?);
    tabular_train(&mut table, &mut task, 2, 20_000, 0.1, 0.9, Some(100), 6)?;
    println!("{} history states visited", table.len());
    for history in [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]] {
        let h: Vec<i8> = history.to_vec();
        let slots: Vec<_> = h.chunks(2).map(|s| decode_slot(s)).collect();
        println!("history {slots:?} -> Q {:?}", table.q_values(&h));
    }
    let mut policy = TabularPolicy::new(&table, 2, 2)?;
    let r = evaluate_policy(&mut policy, &model, &EvalSpec::default(), 8)?;
    println!("greedy return {:.4} (optimum {:.4})", r.mean_return, (1.0 - 0.9f64.powi(100)) / 0.1);
    Ok(())
}
