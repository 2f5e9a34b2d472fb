use std::fmt::Write as _;

use rand::SeedableRng;

use super::baselines::build_baseline;
use super::config::Config;
use super::derive_seed;
use super::eval::{evaluate_agent, EvaluationReport};
use super::experiment::{build_model, eval_spec, learner_setup, ExperimentOutput};
use super::learn::{make_env, multi_user_train, streams, train_dqn, TrainedAgent};
use super::multi_user::MultiUserTask;
use crate::belief::{exact_finite_horizon_solve, fixed_pattern_q};
use crate::channel::{expand_to_joint, stationary_distribution, ChannelEnv, ChannelModel, TraceModel};
use crate::error::{Error, Result};
use crate::nn::{Checkpoint, SingleUserTask};
use crate::policy::mle_estimate_chain;
use crate::SimRng;

/// Trains the configured DQN (single or multi-user) and evaluates it with
/// the final protocol. The returned output holds the curve and one
/// comparison row.
pub fn train_from_config(cfg: &Config, seed: u64) -> Result<(TrainedAgent, ExperimentOutput)> {
    let model = build_model(cfg)?;
    let setup = learner_setup(cfg)?;
    let users = cfg.usize("agent.users")?;
    let trained = if users == 1 {
        train_dqn(&model, &setup, seed)?
    } else {
        multi_user_train(&model, users, &setup, seed)?
    };
    let report = evaluate_trained(&trained, &model, cfg, seed)?;
    let mut out = ExperimentOutput {
        config_hash: cfg.hash(),
        canonical_config: cfg.canonical_text(),
        ..Default::default()
    };
    let case_id = cfg.get("run.case_id")?.to_string();
    out.push_curve(&case_id, seed, &trained.curve);
    out.push_report(&case_id, seed, &report);
    Ok((trained, out))
}

fn evaluate_trained(
    trained: &TrainedAgent,
    model: &ChannelModel,
    cfg: &Config,
    seed: u64,
) -> Result<EvaluationReport> {
    let spec = eval_spec(cfg)?;
    let eval_seed = derive_seed(seed, streams::FINAL_EVAL);
    let users = cfg.usize("agent.users")?;
    let env = make_env(model, eval_seed, spec.length)?;
    if users == 1 {
        evaluate_agent(&trained.agent, &mut SingleUserTask::new(env), trained.window, &spec, eval_seed)
    } else {
        evaluate_agent(&trained.agent, &mut MultiUserTask::new(env, users)?, trained.window, &spec, eval_seed)
    }
}

/// Evaluates a saved agent on the configured channel model.
pub fn evaluate_checkpoint(ck: &Checkpoint, cfg: &Config, seed: u64) -> Result<EvaluationReport> {
    let model = build_model(cfg)?;
    if model.n_channels() != ck.n_channels {
        return Err(Error::Config(format!(
            "checkpoint was trained on {} channels, config has {}",
            ck.n_channels,
            model.n_channels()
        )));
    }
    let trained = TrainedAgent {
        agent: ck.agent.clone(),
        window: ck.window,
        curve: Vec::new(),
    };
    evaluate_trained(&trained, &model, cfg, seed)
}

/// Slot-by-slot log of one non-learning policy on a single run.
pub fn simulate_csv(cfg: &Config, policy: &str, slots: usize, seed: u64) -> Result<String> {
    let model = build_model(cfg)?;
    let gamma = cfg.f64("run.gamma")?;
    let observe = cfg.usize("whittle.observe_slots")?;
    let mut p = build_baseline(policy, &model, gamma, observe, derive_seed(seed, streams::ESTIMATE))?;
    let mut env = ChannelEnv::new(model, derive_seed(seed, streams::FINAL_EVAL))?;
    let mut rng = SimRng::seed_from_u64(derive_seed(seed, 0x9011c7));
    p.reset()?;
    let mut s = String::from("slot,policy,action,observation,reward,good_channels\n");
    for t in 0..slots {
        let a = p.act(&mut rng)?;
        let state: String = env
            .full_state()
            .bits()
            .iter()
            .map(|&g| if g { '1' } else { '0' })
            .collect();
        let o = env.step(a)?;
        p.observe(a, o.observation)?;
        let _ = writeln!(s, "{t},{},{a},{},{},{state}", p.name(), u8::from(o.observation), o.reward);
    }
    Ok(s)
}

/// Q-table of a fixed-pattern model, or the exact finite-horizon value and
/// first action from the stationary belief for small joint models.
pub fn solve_csv(cfg: &Config, horizon: usize) -> Result<String> {
    let model = build_model(cfg)?;
    let gamma = cfg.f64("run.gamma")?;
    let mut s = String::new();
    if let ChannelModel::FixedPattern(m) = &model {
        let table = fixed_pattern_q(m, gamma)?;
        s.push_str("state,subset,class,q,value,best_subset\n");
        for i in 0..table.n_states() {
            for j in 0..table.n_states() {
                let _ = writeln!(
                    s,
                    "{i},{j},{:?},{:.10},{:.10},{}",
                    table.class_of(i, j),
                    table.q_subset(i, j),
                    table.value(i),
                    table.best_subset(i)
                );
            }
        }
        return Ok(s);
    }
    let joint = expand_to_joint(&model)?;
    if joint.n_channels() > 4 {
        return Err(Error::Capacity(format!(
            "exact solving is limited to 4 channels, model has {}",
            joint.n_channels()
        )));
    }
    let belief = stationary_distribution(&joint)?;
    s.push_str("horizon,value,first_action\n");
    for h in 1..=horizon {
        let (v, a) = exact_finite_horizon_solve(&joint, gamma, h, &belief)?;
        let _ = writeln!(s, "{h},{v:.10},{a}");
    }
    Ok(s)
}

/// Per-channel good fraction and maximum-likelihood transition estimates.
pub fn trace_stats_csv(trace: &TraceModel) -> Result<String> {
    let mut s = String::from("channel,slots,good_fraction,p01,p11\n");
    for c in 0..trace.n_channels() {
        let series = trace.channel_series(c);
        let good = series.iter().filter(|&&g| g).count() as f64 / series.len() as f64;
        let (p01, p11) = if series.len() >= 2 {
            let e = mle_estimate_chain(&series)?;
            (format!("{:.6}", e.chain.p01), format!("{:.6}", e.chain.p11))
        } else {
            (String::new(), String::new())
        };
        let _ = writeln!(s, "{c},{},{good:.6},{p01},{p11}", series.len());
    }
    Ok(s)
}
