//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach stdout; exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};

use chanaccess::belief::{
    fixed_pattern_q, marginal_channel_chain, BeliefVector, ExpectimaxSolver,
};
use chanaccess::channel::{
    build_joint_from_marginals, stationary_distribution, ChannelEnv, ChannelModel,
    FixedPatternModel, JointMarkovModel, NonstationaryModel, TwoStateMatrix,
};
use chanaccess::harness::{
    build_baseline, derive_seed, evaluate_agent, evaluate_policy, learner_setup, run_adaptive_dqn,
    train_dqn, whittle_heuristic, AdaptiveConfig, Config, EvalSpec, EvaluationReport,
};
use chanaccess::nn::{
    decode_slot, tabular_train, HistoryState, Mlp, Preset, SingleUserTask, TabularQ,
};
use chanaccess::policy::{
    myopic_action, AccessPolicy, GeniePolicy, GilbertElliotChain, MyopicPolicy, WhittlePolicy,
};
use chanaccess::{Result, SimRng};

const GAMMA: f64 = 0.9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn final_spec() -> EvalSpec {
    EvalSpec {
        episodes: 1_000,
        length: 100,
        gamma: GAMMA,
    }
}

fn round_robin(n: usize, p: f64) -> FixedPatternModel {
    FixedPatternModel::round_robin(n, p).unwrap()
}

// 1. Closed-form fixed-pattern Q-values against plain value iteration on the
// M-state chain, plus the genie's argmax.
fn fixed_pattern_oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut argmax_mismatch = Vec::new();
    for m in [2usize, 3, 4, 8, 16] {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let model = round_robin(m, p);
            let table = fixed_pattern_q(&model, GAMMA)?;
            let oracle = value_iteration_oracle(m, p, GAMMA);
            for i in 0..m {
                for j in 0..m {
                    worst = worst.max((table.q_subset(i, j) - oracle[i][j]).abs());
                }
                let mut genie = GeniePolicy::new(model.clone());
                genie.set_last(Some((i, true)));
                if genie.action() != table.best_channel(i) {
                    argmax_mismatch.push((m, p, i));
                }
            }
        }
    }
    outcome(
        worst < 1e-8 && argmax_mismatch.is_empty(),
        format!("max |dQ| = {worst:.2e}, argmax mismatches {argmax_mismatch:?}"),
    )
}

/// Generic finite-MDP value iteration: state = last active subset, action =
/// subset sensed, reward +1 if it is the next active subset and -1 otherwise.
fn value_iteration_oracle(m: usize, p: f64, gamma: f64) -> Vec<Vec<f64>> {
    let trans = |i: usize| [((i + 1) % m, p), (i, 1.0 - p)];
    let mut v = vec![0.0; m];
    loop {
        let q: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|a| {
                        trans(i)
                            .iter()
                            .map(|&(s, pr)| pr * (if a == s { 1.0 } else { -1.0 } + gamma * v[s]))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let next: Vec<f64> = q.iter().map(|r: &Vec<f64>| r.iter().cloned().fold(f64::MIN, f64::max)).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-14 {
            return q;
        }
    }
}

// 2. Genie return against its closed form.
fn genie_closed_form() -> Result<Outcome> {
    let spec = EvalSpec {
        episodes: 10_000,
        ..final_spec()
    };
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    let mut pass = true;
    for p in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let model = round_robin(16, p);
        let mut genie = GeniePolicy::new(model.clone());
        let r = evaluate_policy(&mut genie, &ChannelModel::FixedPattern(model), &spec, 1)?;
        let closed = 1.0
            + (2.0 * p - 1.0) * GAMMA * (1.0 - GAMMA.powi(spec.length as i32 - 1)) / (1.0 - GAMMA);
        let rel = (r.mean_return - closed).abs() / closed.abs();
        worst = worst.max(rel);
        pass &= rel < 0.03;
        parts.push(format!("p={p}: {:.4} vs {closed:.4}", r.mean_return));
    }
    outcome(pass, format!("{} (worst rel {:.2}%)", parts.join(", "), worst * 100.0))
}

fn stationary_eval(
    name: &str,
    model: &ChannelModel,
    spec: &EvalSpec,
    eval_seed: u64,
    estimate_seed: u64,
) -> Result<EvaluationReport> {
    let mut p = build_baseline(name, model, spec.gamma, 10_000, estimate_seed)?;
    evaluate_policy(p.as_mut(), model, spec, eval_seed)
}

const DQN_ITERATIONS: usize = 100;

// 3. DQN on round-robin switching against the genie and the Whittle heuristic.
fn dqn_reaches_genie() -> Result<Outcome> {
    let model = ChannelModel::FixedPattern(round_robin(16, 0.9));
    let mut cfg = Config::new();
    cfg.set("train.iterations", &DQN_ITERATIONS.to_string())?;
    let setup = learner_setup(&cfg)?;
    let spec = final_spec();
    let mut reach = 0;
    let mut beat_whittle = 0;
    let mut parts = Vec::new();
    for seed in 1..=3u64 {
        let trained = train_dqn(&model, &setup, seed)?;
        let eval_seed = derive_seed(seed, 6);
        let mut task = SingleUserTask::new(ChannelEnv::new(model.clone(), eval_seed)?);
        let dqn = evaluate_agent(&trained.agent, &mut task, trained.window, &spec, eval_seed)?;
        let genie = stationary_eval("genie", &model, &spec, eval_seed, seed)?;
        let whittle = stationary_eval("whittle", &model, &spec, eval_seed, derive_seed(seed, 7))?;
        reach += usize::from(dqn.mean_return >= 0.9 * genie.mean_return);
        beat_whittle += usize::from(dqn.mean_return > whittle.mean_return);
        parts.push(format!(
            "seed {seed}: dqn {:.3} genie {:.3} whittle {:.3}",
            dqn.mean_return, genie.mean_return, whittle.mean_return
        ));
    }
    outcome(
        reach >= 2 && beat_whittle == 3,
        format!(
            "{} iterations; {}; >=90% genie on {reach}/3, above Whittle on {beat_whittle}/3",
            DQN_ITERATIONS,
            parts.join("; ")
        ),
    )
}

// 4. Whittle and myopic pick the same channels on identical positively
// correlated chains.
fn whittle_equals_myopic() -> Result<Outcome> {
    let chain = GilbertElliotChain::new(0.3, 0.8)?;
    let n = 4;
    let joint = build_joint_from_marginals(&vec![chain.to_matrix(); n])?;
    let start = stationary_distribution(&joint)?;
    let mut myopic = MyopicPolicy::new(joint.clone(), start);
    let mut whittle = WhittlePolicy::new(&vec![chain; n], GAMMA)?;
    let mut env = ChannelEnv::new(ChannelModel::Joint(joint), 4)?;
    let mut rng = SimRng::seed_from_u64(4);
    let mut first_mismatch = None;
    for t in 0..1_000 {
        let a = whittle.act(&mut rng)?;
        let b = myopic.act(&mut rng)?;
        if a != b && first_mismatch.is_none() {
            first_mismatch = Some((t, a, b));
        }
        let o = env.step(a)?;
        whittle.observe(a, o.observation)?;
        myopic.observe(a, o.observation)?;
    }
    outcome(
        first_mismatch.is_none(),
        format!("1000 slots, first mismatch {first_mismatch:?}"),
    )
}

// 5. Exact expectimax agrees with myopic at every belief reachable within
// six slots, N = 2 identical positively correlated channels.
fn myopic_optimal_two_channels() -> Result<Outcome> {
    let mut rng = SimRng::seed_from_u64(5);
    let mut checked = 0;
    let mut ties = 0;
    let mut failures = Vec::new();
    for draw in 0..3 {
        let p11: f64 = rng.gen_range(0.05..0.95);
        let p01: f64 = rng.gen_range(0.0..p11);
        let m: TwoStateMatrix = [[1.0 - p01, p01], [1.0 - p11, p11]];
        let joint = build_joint_from_marginals(&[m, m])?;
        let mut solver = ExpectimaxSolver::new(joint.clone(), GAMMA)?;
        for b in reachable_beliefs(&joint, 6)? {
            let q = solver.q_values(&b, 8)?;
            let my = myopic_action(&b);
            let best = q.iter().cloned().fold(f64::MIN, f64::max);
            let argmax = q.iter().position(|&v| v == best).unwrap();
            checked += 1;
            if argmax != my {
                if best - q[my] <= 1e-9 {
                    ties += 1;
                } else {
                    failures.push((draw, b.probs().to_vec()));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} beliefs over 3 chains, {ties} exact ties, {} disagreements",
            failures.len()
        ),
    )
}

fn reachable_beliefs(joint: &JointMarkovModel, depth: usize) -> Result<Vec<BeliefVector>> {
    let mut frontier = vec![stationary_distribution(joint)?];
    let mut all = frontier.clone();
    let mut seen = BTreeSet::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for b in &frontier {
            for c in 0..joint.n_channels() {
                for obs in [false, true] {
                    let pg = b.marginal_good(c);
                    let p = if obs { pg } else { 1.0 - pg };
                    if p <= 1e-12 {
                        continue;
                    }
                    let nb = b.sense_and_advance(joint, c, obs)?;
                    let key: Vec<u64> = nb.probs().iter().map(|x| (x * 1e12).round() as u64).collect();
                    if seen.insert(key) {
                        next.push(nb);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(all)
}

// 6. Belief filter normalization, support consistency and marginal chains.
fn belief_filter() -> Result<Outcome> {
    let mut rng = SimRng::seed_from_u64(6);
    let models = [
        ChannelModel::FixedPattern(FixedPatternModel::contiguous(4, 2, 0.7)?),
        ChannelModel::Joint(build_joint_from_marginals(&[
            [[0.7, 0.3], [0.2, 0.8]],
            [[0.9, 0.1], [0.4, 0.6]],
            [[0.6, 0.4], [0.1, 0.9]],
        ])?),
    ];
    let mut worst_norm = 0.0f64;
    let mut support_violations = 0;
    for model in &models {
        let joint = chanaccess::channel::expand_to_joint(model)?;
        let mut env = ChannelEnv::new(model.clone(), 60)?;
        let mut b = stationary_distribution(&joint)?;
        let n = joint.n_channels();
        for _ in 0..5_000 {
            let c = rng.gen_range(0..n);
            let o = env.step(c)?;
            let post = b.observation_update(c, o.observation)?;
            for (s, &pr) in post.probs().iter().enumerate() {
                let bit = chanaccess::channel::state_bit(n, s, c);
                if pr > 0.0 && bit != o.observation {
                    support_violations += 1;
                }
            }
            let prior_support: Vec<usize> =
                (0..post.probs().len()).filter(|&s| post.probs()[s] > 0.0).collect();
            b = post.transition_update(&joint)?;
            for (s, &pr) in b.probs().iter().enumerate() {
                if pr > 0.0 && prior_support.iter().all(|&from| joint.get(from, s) == 0.0) {
                    support_violations += 1;
                }
            }
            worst_norm = worst_norm.max((b.probs().iter().sum::<f64>() - 1.0).abs());
        }
    }
    let mut worst_chain = 0.0f64;
    for _ in 0..100 {
        let chains: Vec<TwoStateMatrix> = (0..3)
            .map(|_| {
                let p01: f64 = rng.gen_range(0.01..0.99);
                let p11: f64 = rng.gen_range(0.01..0.99);
                [[1.0 - p01, p01], [1.0 - p11, p11]]
            })
            .collect();
        let joint = build_joint_from_marginals(&chains)?;
        for (c, chain) in chains.iter().enumerate() {
            let m = marginal_channel_chain(&joint, c)?;
            for r in 0..2 {
                for col in 0..2 {
                    worst_chain = worst_chain.max((m[r][col] - chain[r][col]).abs());
                }
            }
        }
    }
    outcome(
        worst_norm < 1e-9 && support_violations == 0 && worst_chain < 1e-9,
        format!(
            "10^4 updates: max |sum-1| {worst_norm:.1e}, support violations {support_violations}; \
             marginal round trip max err {worst_chain:.1e}"
        ),
    )
}

// 7. Analytic against central finite-difference gradients.
fn gradient_check() -> Result<Outcome> {
    let mut rng = SimRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for (preset, hidden) in [(Preset::Wide2, vec![12, 12]), (Preset::Deep3, vec![6, 6, 6])] {
        assert_eq!(preset.hidden().len(), hidden.len());
        for _ in 0..20 {
            let (n_in, n_out, batch) = (10, 4, 6);
            let mut sizes = vec![n_in];
            sizes.extend(&hidden);
            sizes.push(n_out);
            let mut net = Mlp::new(&sizes, &mut rng)?;
            let params: Vec<f64> = (0..net.n_params()).map(|_| rng.gen_range(-0.5..0.5)).collect();
            net.set_params(&params)?;
            let inputs = Array2::from_shape_fn((batch, n_in), |_| f64::from(rng.gen_range(-1i8..=1)));
            let actions: Vec<usize> = (0..batch).map(|_| rng.gen_range(0..n_out)).collect();
            let targets: Vec<f64> = (0..batch).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (_, grads) = net.gradients(inputs.view(), &actions, &targets)?;
            let analytic = grads.flatten();
            let h = 1e-5;
            let mut numeric = Vec::with_capacity(params.len());
            let mut probe = net.clone();
            for i in 0..params.len() {
                let mut p = params.clone();
                p[i] += h;
                probe.set_params(&p)?;
                let up = probe.loss(inputs.view(), &actions, &targets)?;
                p[i] -= 2.0 * h;
                probe.set_params(&p)?;
                let down = probe.loss(inputs.view(), &actions, &targets)?;
                numeric.push((up - down) / (2.0 * h));
            }
            let diff = norm(analytic.iter().zip(&numeric).map(|(a, b)| a - b));
            let scale = norm(analytic.iter().copied()) + norm(numeric.iter().copied());
            worst = worst.max(diff / scale.max(1e-12));
        }
    }
    outcome(worst < 1e-4, format!("40 draws, worst relative error {worst:.2e}"))
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

// 8. Tabular Q-learning on the deterministic two-channel cycle.
fn tabular_cycle() -> Result<Outcome> {
    let fixed = round_robin(2, 1.0);
    let model = ChannelModel::FixedPattern(fixed.clone());
    let mut table = TabularQ::new(2, 0.1)?;
    let mut task = SingleUserTask::new(ChannelEnv::new(model.clone(), 8)?);
    tabular_train(&mut table, &mut task, 2, 20_000, 0.1, GAMMA, Some(100), 9)?;

    // every history produced by any action sequence from a reset
    let mut histories = BTreeSet::new();
    let mut stack = vec![(ChannelEnv::new(model.clone(), 0)?, HistoryState::new(2, 2)?, 0)];
    while let Some((env, h, depth)) = stack.pop() {
        if !histories.insert(h.as_slice().to_vec()) || depth == 6 {
            continue;
        }
        for a in 0..2 {
            let mut e = env.clone();
            let mut nh = h.clone();
            let o = e.step(a)?;
            nh.push(a, o.observation)?;
            stack.push((e, nh, depth + 1));
        }
    }
    let mut mismatches = 0;
    for h in &histories {
        let last = decode_slot(&h[2..]);
        let mut genie = GeniePolicy::new(fixed.clone());
        genie.set_last(last);
        if table.greedy_action(h) != genie.action() {
            mismatches += 1;
        }
    }
    let optimum = fixed_pattern_q(&fixed, GAMMA)?.value(0);
    let mut policy = chanaccess::nn::TabularPolicy::new(&table, 2, 2)?;
    let r = evaluate_policy(&mut policy, &model, &final_spec(), 10)?;
    let rel = (r.mean_return - optimum).abs() / optimum;
    outcome(
        mismatches == 0 && rel < 0.02,
        format!(
            "{} reachable histories, {mismatches} differ from the genie; return {:.4} vs {optimum:.4}",
            histories.len(),
            r.mean_return
        ),
    )
}

const ADAPTIVE_PERIODS: usize = 90;

// 9. Retraining triggers right after an 8-good to 1-good switch and recovers.
fn adaptive_detection() -> Result<Outcome> {
    let adaptive = AdaptiveConfig::default();
    let model = NonstationaryModel::new(
        ChannelModel::FixedPattern(FixedPatternModel::contiguous(16, 8, 0.9)?),
        ChannelModel::FixedPattern(round_robin(16, 0.9)),
        5 * adaptive.period as u64,
    )?;
    let mut cfg = Config::new();
    cfg.set("train.iterations", "10")?;
    let setup = learner_setup(&cfg)?;
    let spec = final_spec();
    let mut triggered_first = 0;
    let mut recovered = 0;
    let mut parts = Vec::new();
    for seed in 1..=3u64 {
        let (after, _, log, _) = run_adaptive_dqn(&model, &setup, &adaptive, ADAPTIVE_PERIODS, &spec, seed)?;
        let first_after = log.entries.iter().find(|e| e.phase == 1).unwrap();
        let early = log.entries.iter().any(|e| e.phase == 0 && e.triggered);
        triggered_first += usize::from(first_after.triggered && !early);
        let genie = stationary_eval("genie", &model.phase_b, &spec, derive_seed(seed, 6), seed)?;
        recovered += usize::from(after.mean_return >= 0.9 * genie.mean_return);
        parts.push(format!(
            "seed {seed}: triggers at {:?}, first post-switch period {}, final {:.3} vs genie {:.3}",
            log.trigger_periods(),
            first_after.period,
            after.mean_return,
            genie.mean_return
        ));
    }
    outcome(
        triggered_first == 3 && recovered >= 2,
        format!("{}; recovered on {recovered}/3", parts.join("; ")),
    )
}

const TRACE_ITERATIONS: usize = 300;

// 10. DQN > Whittle > random on the synthetic bursty trace.
fn trace_ordering() -> Result<Outcome> {
    let mut cfg = Config::new();
    for (k, v) in [
        ("env.kind", "trace"),
        ("env.channels", "8"),
        ("agent.preset", "deep3"),
        ("train.iterations", &TRACE_ITERATIONS.to_string()),
    ] {
        cfg.set(k, v)?;
    }
    let model = chanaccess::harness::build_model(&cfg)?;
    let setup = learner_setup(&cfg)?;
    let spec = final_spec();
    let seed = 1;
    let eval_seed = derive_seed(seed, 6);
    let trained = train_dqn(&model, &setup, seed)?;
    let mut env = ChannelEnv::new(model.clone(), eval_seed)?;
    env.randomize_trace_start(spec.length);
    let dqn = evaluate_agent(&trained.agent, &mut SingleUserTask::new(env), trained.window, &spec, eval_seed)?;
    let mut whittle_policy = whittle_heuristic(&model, 10_000, GAMMA, derive_seed(seed, 7))?;
    let whittle = evaluate_policy(&mut whittle_policy, &model, &spec, eval_seed)?;
    let random = stationary_eval("random", &model, &spec, eval_seed, seed)?;
    let gap = |a: &EvaluationReport, b: &EvaluationReport| {
        (a.mean_return - b.mean_return) / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
    };
    let (g1, g2) = (gap(&dqn, &whittle), gap(&whittle, &random));
    outcome(
        g1 > 3.0 && g2 > 3.0,
        format!(
            "dqn {:.3}+-{:.3}, whittle {:.3}+-{:.3}, random {:.3}+-{:.3}; gaps {g1:.1} and {g2:.1} SE",
            dqn.mean_return, dqn.stderr, whittle.mean_return, whittle.stderr, random.mean_return, random.stderr
        ),
    )
}

// 11. Repeated CLI invocations write byte-identical CSV files.
fn cli_determinism() -> Result<Outcome> {
    let bin = env!("CARGO_BIN_EXE_chanaccess");
    let runs: [&[&str]; 4] = [
        &["experiment", "fig4", "--set", "sweep.values=0.7;0.9", "--set", "train.iterations=2",
          "--set", "eval.episodes=50", "--set", "eval.curve_episodes=10", "--set", "whittle.observe_slots=1000",
          "--set", "probe.count=4", "--set", "probe.rollout=50"],
        &["train", "--seed", "3", "--preset", "deep3", "--set", "env.channels=6", "--set", "train.iterations=2",
          "--set", "eval.episodes=50", "--set", "eval.curve_episodes=10"],
        &["simulate", "--policy", "whittle", "--slots", "300", "--set", "whittle.observe_slots=1000"],
        &["adaptive", "--set", "train.iterations=1", "--set", "adaptive.periods=4", "--set", "adaptive.budget=1",
          "--set", "env.switch_period=2", "--set", "eval.episodes=20", "--set", "eval.curve_episodes=10",
          "--set", "whittle.observe_slots=1000", "--set", "probe.count=4"],
    ];
    let root = tempfile::tempdir().map_err(|e| chanaccess::Error::Config(e.to_string()))?;
    let mut compared = 0;
    let mut differing = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = root.path().join(format!("run{i}_{rep}"));
            let status = Command::new(bin)
                .args(*args)
                .arg("--out")
                .arg(&dir)
                .output()
                .expect("binary runs");
            if !status.status.success() {
                return outcome(false, format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&status.stderr)));
            }
            let mut files: Vec<_> = std::fs::read_dir(&dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            files.sort();
            outputs.push(
                files
                    .iter()
                    .map(|f| (f.file_name().unwrap().to_owned(), std::fs::read(f).unwrap()))
                    .collect::<Vec<_>>(),
            );
        }
        compared += outputs[0].len();
        if outputs[0] != outputs[1] {
            differing.push(args[0]);
        }
    }
    outcome(
        differing.is_empty(),
        format!("{compared} files from 4 commands compared, differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("fixed-pattern Q-values match value iteration", fixed_pattern_oracle),
        ("genie return matches closed form", genie_closed_form),
        ("DQN reaches the genie on round robin", dqn_reaches_genie),
        ("Whittle equals myopic on identical chains", whittle_equals_myopic),
        ("myopic optimal for two channels", myopic_optimal_two_channels),
        ("belief filter properties", belief_filter),
        ("gradient correctness", gradient_check),
        ("tabular Q-learning on the two-channel cycle", tabular_cycle),
        ("adaptive detection and recovery", adaptive_detection),
        ("trace ordering DQN > Whittle > random", trace_ordering),
        ("CLI determinism", cli_determinism),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} {} {name} [{:.1}s]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
