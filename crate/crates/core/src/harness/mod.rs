//! Evaluation protocol, adaptive retraining, the multi-user extension,
//! configuration and CSV experiment runs.

mod adaptive;
mod baselines;
mod config;
mod eval;
mod experiment;
mod learn;
mod multi_user;
mod surrogate;
mod tools;

pub use adaptive::{
    adaptive_dqn_run, relative_drop, AdaptiveConfig, AdaptiveLog, AdaptiveLogEntry,
};
pub use baselines::{
    build_baseline, estimate_chains, myopic_genie, whittle_heuristic, MAX_DENSE_MYOPIC_CHANNELS,
};
pub use config::Config;
pub use eval::{evaluate_agent, evaluate_policy, evaluate_task, EvalSpec, EvaluationReport};
pub use experiment::{
    adaptive_config, adaptive_csv, build_model, bundle, comparison_csv, correlated_case, curve_csv,
    eval_spec, expand_cases, learner_setup, run_adaptive_dqn, run_experiment, utilization_csv,
    write_outputs, AdaptiveRow, ComparisonRow, CurveRow, ExperimentOutput, UtilizationRow,
    BUNDLES,
};
pub use learn::{multi_user_train, train_dqn, train_dqn_on_task, LearnerSetup, TrainedAgent};
pub use multi_user::{
    channel_subsets, multi_user_step, MultiUserTask, MAX_MULTI_USER_ACTIONS,
};
pub use surrogate::{synthesize_bursty_trace, SurrogateSpec};
pub use tools::{evaluate_checkpoint, simulate_csv, solve_csv, trace_stats_csv, train_from_config};

/// Independent seed for stream `stream` of replica `seed` (SplitMix64
/// finalizer over the pair).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
