//! Learning agents over history states: slot encoding, a dense Q-network
//! with Adam, experience replay, deep and tabular Q-learning, training loops
//! and checkpoints.

mod adam;
mod checkpoint;
mod dqn;
mod history;
mod mlp;
mod replay;
mod tabular;
mod train;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint};
pub use dqn::{DqnAgent, DqnConfig, DEFAULT_EPSILON, DEFAULT_MINIBATCH};
pub use history::{decode_slot, encode_slot, encode_slot_multi, HistoryState};
pub use mlp::{Gradients, Mlp, Preset};
pub use replay::{ExperienceRecord, ReplayBuffer, DEFAULT_REPLAY_CAPACITY};
pub use tabular::TabularQ;
pub use train::{
    dqn_train, sample_probe_states, tabular_train, track_max_q, AccessTask, CurvePoint, DqnPolicy,
    DqnTrainer, SingleUserTask, TabularPolicy, TaskStep, TrainSchedule, DEFAULT_EPISODE_LENGTH,
    STEPS_PER_ITERATION,
};
