use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;

use super::adaptive::{adaptive_dqn_run, AdaptiveConfig, AdaptiveLog};
use super::baselines::{build_baseline, whittle_heuristic};
use super::config::Config;
use super::derive_seed;
use super::eval::{evaluate_agent, evaluate_policy, evaluate_task, EvalSpec, EvaluationReport};
use super::learn::{make_env, multi_user_train, streams, train_dqn, LearnerSetup};
use super::multi_user::MultiUserTask;
use super::surrogate::{synthesize_bursty_trace, SurrogateSpec};
use crate::channel::{
    load_trace, ChannelModel, CorrelatedChannelModel, Correlation, DependentChannel,
    FixedPatternModel, NonstationaryModel, SlidingWindowModel,
};
use crate::error::{Error, Result};
use crate::nn::{
    dqn_train, sample_probe_states, tabular_train, track_max_q, CurvePoint, DqnAgent, DqnConfig,
    DqnTrainer, Preset, SingleUserTask, TabularPolicy, TabularQ, TrainSchedule,
};
use crate::policy::random_action;
use crate::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub case_id: String,
    pub policy: String,
    pub seed: u64,
    pub mean_return: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub case_id: String,
    pub seed: u64,
    pub point: CurvePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilizationRow {
    pub case_id: String,
    pub policy: String,
    pub seed: u64,
    pub channel: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRow {
    pub case_id: String,
    pub seed: u64,
    pub log: AdaptiveLog,
}

/// Everything an experiment produced, ready to be written as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub config_hash: String,
    pub canonical_config: String,
    pub comparison: Vec<ComparisonRow>,
    pub curve: Vec<CurveRow>,
    pub utilization: Vec<UtilizationRow>,
    pub adaptive: Vec<AdaptiveRow>,
}

impl ExperimentOutput {
    pub fn push_report(&mut self, case_id: &str, seed: u64, report: &EvaluationReport) {
        self.comparison.push(ComparisonRow {
            case_id: case_id.to_string(),
            policy: report.policy.clone(),
            seed,
            mean_return: report.mean_return,
            stderr: report.stderr,
        });
        for (channel, &fraction) in report.utilization.iter().enumerate() {
            self.utilization.push(UtilizationRow {
                case_id: case_id.to_string(),
                policy: report.policy.clone(),
                seed,
                channel,
                fraction,
            });
        }
    }

    pub fn push_curve(&mut self, case_id: &str, seed: u64, curve: &[CurvePoint]) {
        self.curve.extend(curve.iter().map(|&point| CurveRow {
            case_id: case_id.to_string(),
            seed,
            point,
        }));
    }

    /// Row of `policy` in `case_id` for `seed`.
    pub fn find(&self, case_id: &str, policy: &str, seed: u64) -> Option<&ComparisonRow> {
        self.comparison
            .iter()
            .find(|r| r.case_id == case_id && r.policy == policy && r.seed == seed)
    }
}

/// Pre-set experiment configurations.
pub const BUNDLES: &[(&str, &str)] = &[
    ("fig4", "round-robin switching, sweep over the switching probability"),
    ("fig6", "arbitrary switching orders at p = 0.9"),
    ("fig8", "subsets of 1, 2, 4 and 8 good channels in sequential order"),
    ("fig8_arbitrary", "subsets of 1, 2, 4 and 8 good channels in arbitrary order"),
    ("fig9", "six perfectly correlated cases with Q-value tracking"),
    ("table2", "bursty 8-channel trace (synthetic unless env.trace is set)"),
    ("fig13", "adaptive retraining after an 8-good to 1-good pattern change"),
    ("fig14", "centralized multi-user access, 6 of 8 channels good"),
];

pub fn bundle(name: &str) -> Result<Config> {
    let text = match name {
        "fig4" => "sweep.key = env.p\nsweep.values = 0.5;0.6;0.7;0.8;0.9\ntrain.iterations = 80\n",
        "fig6" => {
            "env.kind = shuffled\nsweep.key = env.order_seed\nsweep.values = 1;2;3;4;5;6;7;8\n\
             train.iterations = 80\n"
        }
        "fig8" => {
            "env.kind = contiguous\nsweep.key = env.good\nsweep.values = 1;2;4;8\n\
             train.iterations = 80\n"
        }
        "fig8_arbitrary" => {
            "env.kind = shuffled\nenv.order_seed = 3\nsweep.key = env.good\nsweep.values = 1;2;4;8\n\
             train.iterations = 80\n"
        }
        "fig9" => {
            "env.kind = correlated\nagent.preset = deep3\nrun.policies = dqn;whittle;random;myopic\n\
             sweep.key = env.case\nsweep.values = 0;1;2;3;4;5\ntrain.iterations = 60\n"
        }
        "table2" => {
            "env.kind = trace\nenv.channels = 8\nagent.preset = deep3\n\
             run.policies = dqn;whittle;random\ntrain.iterations = 60\n"
        }
        "fig13" => {
            "env.kind = switch\nenv.good = 8\nenv.after.kind = round_robin\nenv.after.good = 1\n\
             run.policies = genie;dqn;whittle;random\ntrain.iterations = 10\n\
             env.switch_period = 5\nadaptive.periods = 90\nadaptive.budget = 80\n"
        }
        "fig14" => {
            "env.kind = window\nenv.channels = 8\nenv.good = 6\nrun.policies = dqn;random\n\
             sweep.key = agent.users\nsweep.values = 2;3;4\ntrain.iterations = 40\n"
        }
        other => {
            let names: Vec<&str> = BUNDLES.iter().map(|(n, _)| *n).collect();
            return Err(Error::Config(format!(
                "unknown bundle `{other}` (available: {})",
                names.join(", ")
            )));
        }
    };
    let mut cfg = Config::parse(text)?;
    cfg.set("run.case_id", name)?;
    Ok(cfg)
}

/// The perfectly correlated scenarios: cases 0-2 copy their sources, cases
/// 3-5 invert them, each with a different set of independent channels.
pub fn correlated_case(n_channels: usize, case: usize, p01: f64, p11: f64) -> Result<CorrelatedChannelModel> {
    if case > 5 {
        return Err(Error::Config(format!("correlated case {case} outside 0..=5")));
    }
    let sets: [&[usize]; 3] = [&[0, 8], &[0, 5, 10], &[3, 6, 13]];
    let independent: Vec<usize> = sets[case % 3]
        .iter()
        .copied()
        .filter(|&c| c < n_channels)
        .collect();
    if independent.len() < 2 {
        return Err(Error::Config(format!(
            "correlated case {case} needs more than {n_channels} channels"
        )));
    }
    let correlation = if case < 3 {
        Correlation::Positive
    } else {
        Correlation::Negative
    };
    let dependents = (0..n_channels)
        .filter(|c| !independent.contains(c))
        .enumerate()
        .map(|(i, channel)| DependentChannel {
            channel,
            source: independent[i % independent.len()],
            correlation,
        })
        .collect();
    CorrelatedChannelModel::new(n_channels, [[1.0 - p01, p01], [1.0 - p11, p11]], independent, dependents)
}

fn fixed_pattern(kind: &str, n: usize, good: usize, p: f64, order_seed: u64) -> Result<FixedPatternModel> {
    match kind {
        "round_robin" if good == 1 => FixedPatternModel::round_robin(n, p),
        "round_robin" | "contiguous" => FixedPatternModel::contiguous(n, good, p),
        "shuffled" => FixedPatternModel::shuffled(n, good, p, &mut SimRng::seed_from_u64(order_seed)),
        other => Err(Error::Config(format!("`{other}` is not a fixed-pattern kind"))),
    }
}

/// Channel model described by the `env.*` keys.
pub fn build_model(cfg: &Config) -> Result<ChannelModel> {
    let n = cfg.usize("env.channels")?;
    let good = cfg.usize("env.good")?;
    let p = cfg.f64("env.p")?;
    let kind = cfg.get("env.kind")?;
    let order_seed = cfg.u64("env.order_seed")?;
    Ok(match kind {
        "round_robin" | "contiguous" | "shuffled" => {
            ChannelModel::FixedPattern(fixed_pattern(kind, n, good, p, order_seed)?)
        }
        "correlated" => ChannelModel::Correlated(correlated_case(
            n,
            cfg.usize("env.case")?,
            cfg.f64("env.p01")?,
            cfg.f64("env.p11")?,
        )?),
        "window" => ChannelModel::Window(SlidingWindowModel::new(n, good, p)?),
        "trace" => {
            let path = cfg.get("env.trace")?;
            let trace = if path.is_empty() {
                let quality: Vec<f64> = cfg.list_of("env.quality")?;
                if quality.is_empty() {
                    return Err(Error::Config("env.quality is empty".into()));
                }
                let spec = SurrogateSpec {
                    slots: cfg.usize("env.trace_slots")?,
                    mean_burst: cfg.f64("env.burst")?,
                    quality: (0..n).map(|k| quality[k % quality.len()]).collect(),
                };
                synthesize_bursty_trace(&spec, cfg.u64("env.trace_seed")?)?
            } else {
                load_trace(path)?
            };
            if trace.n_channels() != n {
                return Err(Error::Config(format!(
                    "trace has {} channels but env.channels = {n}",
                    trace.n_channels()
                )));
            }
            ChannelModel::Trace(trace)
        }
        "switch" => {
            let before = fixed_pattern("contiguous", n, good, p, order_seed)?;
            let after = fixed_pattern(
                cfg.get("env.after.kind")?,
                n,
                cfg.usize("env.after.good")?,
                cfg.f64("env.after.p")?,
                order_seed,
            )?;
            let switch = cfg.u64("env.switch_period")? * cfg.u64("adaptive.period")?;
            ChannelModel::Nonstationary(Box::new(NonstationaryModel::new(
                ChannelModel::FixedPattern(before),
                ChannelModel::FixedPattern(after),
                switch,
            )?))
        }
        other => return Err(Error::Config(format!("unknown env.kind `{other}`"))),
    })
}

pub fn eval_spec(cfg: &Config) -> Result<EvalSpec> {
    Ok(EvalSpec {
        episodes: cfg.usize("eval.episodes")?,
        length: cfg.usize("eval.length")?,
        gamma: cfg.f64("run.gamma")?,
    })
}

pub fn learner_setup(cfg: &Config) -> Result<LearnerSetup> {
    let preset: Preset = cfg.get("agent.preset")?.parse()?;
    let gamma = cfg.f64("run.gamma")?;
    let mut dqn = DqnConfig::from_preset(preset, gamma);
    let lr = cfg.f64("agent.lr")?;
    if lr > 0.0 {
        dqn.learning_rate = lr;
    }
    let sync = cfg.u64("agent.target_sync")?;
    dqn.target_sync = (sync > 0).then_some(sync);
    let history = cfg.usize("agent.history")?;
    let episode = cfg.usize("train.episode_length")?;
    Ok(LearnerSetup {
        dqn,
        window: (history > 0).then_some(history),
        schedule: TrainSchedule {
            steps_per_iteration: cfg.usize("train.steps_per_iteration")?,
            learning_starts: cfg.usize("train.learning_starts")?,
            episode_length: (episode > 0).then_some(episode),
            epsilon: cfg.f64("train.epsilon")?,
            replay_capacity: cfg.usize("train.replay")?,
        },
        iterations: cfg.usize("train.iterations")?,
        curve_eval: EvalSpec {
            episodes: cfg.usize("eval.curve_episodes")?,
            ..eval_spec(cfg)?
        },
        probe_count: cfg.usize("probe.count")?,
        probe_rollout: cfg.usize("probe.rollout")?,
    })
}

pub fn adaptive_config(cfg: &Config) -> Result<AdaptiveConfig> {
    let c = AdaptiveConfig {
        period: cfg.usize("adaptive.period")?,
        threshold: cfg.f64("adaptive.threshold")?,
        retrain_budget: cfg.usize("adaptive.budget")?,
        cold_start: cfg.bool("adaptive.cold_start")?,
    };
    c.validate()?;
    Ok(c)
}

/// One configuration per sweep value, each with its case id.
pub fn expand_cases(cfg: &Config) -> Result<Vec<(String, Config)>> {
    let base = cfg.get("run.case_id")?.to_string();
    let key = cfg.get("sweep.key")?.to_string();
    let values = cfg.list("sweep.values")?;
    if key.is_empty() {
        if !values.is_empty() {
            return Err(Error::Config("sweep.values given without sweep.key".into()));
        }
        return Ok(vec![(base, cfg.clone())]);
    }
    if key.starts_with("sweep.") || key.starts_with("run.") {
        return Err(Error::Config(format!("`{key}` cannot be swept")));
    }
    if values.is_empty() {
        return Err(Error::Config("sweep.key given without sweep.values".into()));
    }
    values
        .iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.set(&key, v)?;
            Ok((format!("{base}/{key}={v}"), c))
        })
        .collect()
}

fn check_case_id(id: &str) -> Result<()> {
    if id.contains([',', '"', '\n']) {
        return Err(Error::Config(format!("case id `{id}` may not contain commas or quotes")));
    }
    Ok(())
}

/// Runs every case, seed and policy named by the configuration.
pub fn run_experiment(cfg: &Config) -> Result<ExperimentOutput> {
    let policies = cfg.list("run.policies")?;
    if policies.is_empty() {
        return Err(Error::Config("run.policies is empty".into()));
    }
    let seeds: Vec<u64> = cfg.list_of("run.seeds")?;
    if seeds.is_empty() {
        return Err(Error::Config("run.seeds is empty".into()));
    }
    let mut out = ExperimentOutput {
        config_hash: cfg.hash(),
        canonical_config: cfg.canonical_text(),
        ..Default::default()
    };
    for (case_id, case_cfg) in expand_cases(cfg)? {
        check_case_id(&case_id)?;
        let model = build_model(&case_cfg)?;
        for &seed in &seeds {
            if let ChannelModel::Nonstationary(ns) = &model {
                run_switch_case(&case_cfg, &case_id, ns, &policies, seed, &mut out)?;
            } else {
                run_stationary_case(&case_cfg, &case_id, &model, &policies, seed, &mut out)?;
            }
        }
    }
    Ok(out)
}

fn run_stationary_case(
    cfg: &Config,
    case_id: &str,
    model: &ChannelModel,
    policies: &[String],
    seed: u64,
    out: &mut ExperimentOutput,
) -> Result<()> {
    let spec = eval_spec(cfg)?;
    let users = cfg.usize("agent.users")?;
    let eval_seed = derive_seed(seed, streams::FINAL_EVAL);
    let observe = cfg.usize("whittle.observe_slots")?;
    for policy in policies {
        let report = match (policy.as_str(), users) {
            ("dqn", 1) => {
                let setup = learner_setup(cfg)?;
                let trained = train_dqn(model, &setup, seed)?;
                out.push_curve(case_id, seed, &trained.curve);
                let mut task = SingleUserTask::new(make_env(model, eval_seed, spec.length)?);
                evaluate_agent(&trained.agent, &mut task, trained.window, &spec, eval_seed)?
            }
            ("dqn", u) => {
                let setup = learner_setup(cfg)?;
                let trained = multi_user_train(model, u, &setup, seed)?;
                out.push_curve(case_id, seed, &trained.curve);
                let mut task = MultiUserTask::new(make_env(model, eval_seed, spec.length)?, u)?;
                evaluate_agent(&trained.agent, &mut task, trained.window, &spec, eval_seed)?
            }
            ("random", u) if u > 1 => {
                let mut task = MultiUserTask::new(make_env(model, eval_seed, spec.length)?, u)?;
                let n_actions = task.subsets().len();
                evaluate_task("random", &mut task, 1, &spec, eval_seed, &mut |_, rng| {
                    Ok(random_action(n_actions, rng))
                })?
            }
            ("tabular", 1) => {
                let n = model.n_channels();
                let history = cfg.usize("agent.history")?;
                let window = if history > 0 { history } else { n };
                let mut table = TabularQ::new(n, cfg.f64("agent.alpha")?)?;
                let episode = cfg.usize("train.episode_length")?;
                let mut task = SingleUserTask::new(make_env(
                    model,
                    derive_seed(seed, streams::TRAIN_ENV),
                    episode.max(1),
                )?);
                tabular_train(
                    &mut table,
                    &mut task,
                    window,
                    cfg.usize("train.tabular_steps")?,
                    cfg.f64("train.epsilon")?,
                    spec.gamma,
                    (episode > 0).then_some(episode),
                    derive_seed(seed, streams::TRAINER),
                )?;
                let mut p = TabularPolicy::new(&table, n, window)?;
                evaluate_policy(&mut p, model, &spec, eval_seed)?
            }
            (name, 1) => {
                let mut p = build_baseline(
                    name,
                    model,
                    spec.gamma,
                    observe,
                    derive_seed(seed, streams::ESTIMATE),
                )?;
                evaluate_policy(p.as_mut(), model, &spec, eval_seed)?
            }
            (name, u) => {
                return Err(Error::Config(format!(
                    "policy `{name}` does not support {u} users"
                )))
            }
        };
        out.push_report(case_id, seed, &report);
    }
    Ok(())
}

fn run_switch_case(
    cfg: &Config,
    case_id: &str,
    model: &NonstationaryModel,
    policies: &[String],
    seed: u64,
    out: &mut ExperimentOutput,
) -> Result<()> {
    if cfg.usize("agent.users")? != 1 {
        return Err(Error::Config("pattern-change runs are single-user".into()));
    }
    let spec = eval_spec(cfg)?;
    let setup = learner_setup(cfg)?;
    let adaptive = adaptive_config(cfg)?;
    let eval_seed = derive_seed(seed, streams::FINAL_EVAL);
    let observe = cfg.usize("whittle.observe_slots")?;
    let before = &model.phase_a;
    let after = &model.phase_b;
    for policy in policies {
        match policy.as_str() {
            "dqn" => {
                let (report, stale, log, curve) =
                    run_adaptive_dqn(model, &setup, &adaptive, cfg.usize("adaptive.periods")?, &spec, seed)?;
                out.push_curve(case_id, seed, &curve);
                out.push_report(case_id, seed, &stale);
                out.push_report(case_id, seed, &report);
                out.adaptive.push(AdaptiveRow {
                    case_id: case_id.to_string(),
                    seed,
                    log,
                });
            }
            "whittle" => {
                let est = derive_seed(seed, streams::ESTIMATE);
                let mut old = whittle_heuristic(before, observe, spec.gamma, est)?;
                let mut r = evaluate_policy(&mut old, after, &spec, eval_seed)?;
                r.policy = "whittle_stale".into();
                out.push_report(case_id, seed, &r);
                let mut new = whittle_heuristic(after, observe, spec.gamma, est)?;
                out.push_report(case_id, seed, &evaluate_policy(&mut new, after, &spec, eval_seed)?);
            }
            name => {
                let mut p = build_baseline(name, after, spec.gamma, observe, derive_seed(seed, streams::ESTIMATE))?;
                out.push_report(case_id, seed, &evaluate_policy(p.as_mut(), after, &spec, eval_seed)?);
            }
        }
    }
    Ok(())
}

/// Pretrains on the first phase, then runs the adaptive loop across the
/// switch. Returns the final evaluation on the second phase, the evaluation
/// of the pretrained (pre-switch) policy on the second phase, the
/// monitoring log and the learning curve across both stages.
pub fn run_adaptive_dqn(
    model: &NonstationaryModel,
    setup: &LearnerSetup,
    adaptive: &AdaptiveConfig,
    periods: usize,
    spec: &EvalSpec,
    seed: u64,
) -> Result<(EvaluationReport, EvaluationReport, AdaptiveLog, Vec<CurvePoint>)> {
    let before = &model.phase_a;
    let after = &model.phase_b;
    let n = before.n_channels();
    let window = setup.window.unwrap_or(n);
    let ep = setup.schedule.episode_length.unwrap_or(spec.length);
    let mut init_rng = SimRng::seed_from_u64(derive_seed(seed, streams::INIT));
    let mut agent = DqnAgent::new(window * n, n, setup.dqn.clone(), &mut init_rng)?;
    let mut probe_task = SingleUserTask::new(make_env(before, derive_seed(seed, streams::PROBES), ep)?);
    let probes = sample_probe_states(
        &mut probe_task,
        window,
        setup.probe_count,
        setup.probe_rollout,
        derive_seed(seed, streams::PROBES),
    )?;
    let task = SingleUserTask::new(make_env(before, derive_seed(seed, streams::TRAIN_ENV), ep)?);
    let mut trainer = DqnTrainer::new(task, window, setup.schedule.clone(), derive_seed(seed, streams::TRAINER))?;
    let curve_seed = derive_seed(seed, streams::CURVE_EVAL);
    let mut eval_before = SingleUserTask::new(make_env(before, curve_seed, spec.length)?);
    let curve_spec = setup.curve_eval;
    let mut curve = dqn_train(&mut agent, &mut trainer, setup.iterations, &probes, &mut |a| {
        Ok(evaluate_agent(a, &mut eval_before, window, &curve_spec, curve_seed)?.mean_return)
    })?;
    let eval_seed = derive_seed(seed, streams::FINAL_EVAL);
    let final_eval = |a: &DqnAgent, name: &str| -> Result<EvaluationReport> {
        let mut task = SingleUserTask::new(make_env(after, eval_seed, spec.length)?);
        let mut r = evaluate_agent(a, &mut task, window, spec, eval_seed)?;
        r.policy = name.to_string();
        Ok(r)
    };
    let stale = final_eval(&agent, "dqn_pretrained")?;
    let log = adaptive_dqn_run(&mut agent, model, window, &mut trainer, adaptive, periods, &curve_spec, seed)?;
    let base_iter = setup.iterations;
    let steps_per_iter = setup.schedule.steps_per_iteration.max(1) as f64;
    for e in &log.entries {
        curve.push(CurvePoint {
            iteration: base_iter + (e.slot as f64 / steps_per_iter).round() as usize,
            env_steps: trainer.env_steps(),
            mean_return: e.mean_return,
            avg_max_q: f64::NAN,
        });
    }
    if let Some(last) = curve.last_mut() {
        last.avg_max_q = track_max_q(&agent, &probes)?;
    }
    let report = final_eval(&agent, "dqn")?;
    Ok((report, stale, log, curve))
}

fn f(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6}")
    }
}

pub fn comparison_csv(out: &ExperimentOutput) -> String {
    let mut s = String::from("case_id,policy,seed,mean_return,stderr,config_hash\n");
    for r in &out.comparison {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.case_id,
            r.policy,
            r.seed,
            f(r.mean_return),
            f(r.stderr),
            out.config_hash
        );
    }
    s
}

pub fn curve_csv(out: &ExperimentOutput) -> String {
    let mut s = String::from("case_id,seed,iteration,env_steps,mean_return,avg_max_q,config_hash\n");
    for r in &out.curve {
        let p = r.point;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.case_id,
            r.seed,
            p.iteration,
            p.env_steps,
            f(p.mean_return),
            f(p.avg_max_q),
            out.config_hash
        );
    }
    s
}

pub fn utilization_csv(out: &ExperimentOutput) -> String {
    let mut s = String::from("case_id,policy,seed,channel,fraction,config_hash\n");
    for r in &out.utilization {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.case_id,
            r.policy,
            r.seed,
            r.channel,
            f(r.fraction),
            out.config_hash
        );
    }
    s
}

pub fn adaptive_csv(out: &ExperimentOutput) -> String {
    let mut s = String::from(
        "case_id,seed,period,slot,phase,mean_return,best_return,retraining,triggered,threshold,config_hash\n",
    );
    for row in &out.adaptive {
        for e in &row.log.entries {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.case_id,
                row.seed,
                e.period,
                e.slot,
                e.phase,
                f(e.mean_return),
                f(e.best_return),
                e.retraining,
                e.triggered,
                f(row.log.threshold),
                out.config_hash
            );
        }
    }
    s
}

fn write_file(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the CSV files (and the resolved configuration) into `dir`.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write_file(dir.join("comparison.csv"), &comparison_csv(out))?,
        write_file(dir.join("utilization.csv"), &utilization_csv(out))?,
    ];
    if !out.curve.is_empty() {
        written.push(write_file(dir.join("curve.csv"), &curve_csv(out))?);
    }
    if !out.adaptive.is_empty() {
        written.push(write_file(dir.join("adaptive.csv"), &adaptive_csv(out))?);
    }
    let mut info = format!("config_hash = {}\n", out.config_hash);
    info.push_str(&out.canonical_config);
    written.push(write_file(dir.join("config.resolved"), &info)?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_expand_with_case_ids() {
        let cfg = Config::parse("sweep.key = env.p\nsweep.values = 0.5;0.9").unwrap();
        let cases = expand_cases(&cfg).unwrap();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[1].0, "default/env.p=0.9");
        assert_eq!(cases[1].1.f64("env.p").unwrap(), 0.9);
        let bad = Config::parse("sweep.values = 1").unwrap();
        assert!(expand_cases(&bad).is_err());
    }

    #[test]
    fn empty_policy_list_is_rejected() {
        let cfg = Config::parse("run.policies = ").unwrap();
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn every_bundle_builds() {
        for (name, _) in BUNDLES {
            let cfg = bundle(name).unwrap();
            for (_, c) in expand_cases(&cfg).unwrap() {
                build_model(&c).unwrap();
                learner_setup(&c).unwrap();
            }
        }
        assert!(bundle("fig99").is_err());
    }

    #[test]
    fn correlated_cases_partition_channels() {
        for case in 0..6 {
            let m = correlated_case(16, case, 0.3, 0.8).unwrap();
            assert_eq!(m.independent().len() + m.dependents().len(), 16);
        }
    }

    #[test]
    fn baseline_only_run_writes_rows() {
        let cfg = Config::parse(
            "env.channels = 4\nrun.policies = genie;random;whittle\neval.episodes = 20\n\
             whittle.observe_slots = 500\nrun.seeds = 1;2",
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.comparison.len(), 6);
        assert_eq!(out.utilization.len(), 24);
        let csv = comparison_csv(&out);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(&out.config_hash)));
        assert_eq!(run_experiment(&cfg).unwrap(), out);
    }
}
