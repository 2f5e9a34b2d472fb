use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chanaccess::channel::{load_trace, write_trace};
use chanaccess::harness::{
    bundle, evaluate_checkpoint, run_experiment, simulate_csv, solve_csv, synthesize_bursty_trace,
    trace_stats_csv, train_from_config, write_outputs, Config, ExperimentOutput, SurrogateSpec,
    BUNDLES,
};
use chanaccess::nn::{load_checkpoint, save_checkpoint, Checkpoint};
use chanaccess::{Error, Result};

#[derive(Parser)]
#[command(name = "chanaccess", version, about = "Dynamic multichannel access experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replaces `run.seeds` with a single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Network preset (wide2 or deep3).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the environment under a fixed policy and log every slot.
    Simulate {
        #[arg(long, default_value = "genie")]
        policy: String,
        #[arg(long, default_value_t = 1000)]
        slots: usize,
    },
    /// Exact fixed-pattern Q-table, or exact POMDP values for small models.
    Solve {
        #[arg(long, default_value_t = 6)]
        horizon: usize,
    },
    /// Train a DQN (or a tabular agent with `agent.kind = tabular`).
    Train,
    /// Evaluate a saved checkpoint.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Pretrain, switch the channel pattern and monitor with retraining.
    Adaptive,
    /// Validate, summarize or synthesize trace files.
    Trace {
        #[command(subcommand)]
        action: TraceAction,
    },
    /// Run a named experiment bundle.
    Experiment {
        /// Bundle name; omit with --list.
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum TraceAction {
    Validate { path: PathBuf },
    Stats { path: PathBuf },
    /// Write a synthetic bursty-interference trace.
    Synthesize {
        #[arg(long, default_value_t = 50_000)]
        slots: usize,
        #[arg(long, default_value_t = 10.0)]
        burst: f64,
        #[arg(long, default_value = "trace.txt")]
        file: String,
    },
}

fn resolve(common: &Common, base: Config) -> Result<Config> {
    let mut cfg = base;
    if let Some(path) = &common.config {
        for (k, v) in Config::load(path)?.explicit() {
            cfg.set(k, v)?;
        }
    }
    if let Some(p) = &common.preset {
        cfg.set("agent.preset", p)?;
    }
    if let Some(s) = common.seed {
        cfg.set("run.seeds", &s.to_string())?;
    }
    for o in &common.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{o}` is not KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn first_seed(cfg: &Config) -> Result<u64> {
    cfg.list_of::<u64>("run.seeds")?
        .first()
        .copied()
        .ok_or_else(|| Error::Config("run.seeds is empty".into()))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn finish(out: &ExperimentOutput, dir: &Path) -> Result<()> {
    for r in &out.comparison {
        println!(
            "{:<32} {:<16} seed {:<4} return {:>9.4} +- {:.4}",
            r.case_id, r.policy, r.seed, r.mean_return, r.stderr
        );
    }
    for path in write_outputs(out, dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match cli.command {
        Command::Simulate { policy, slots } => {
            let cfg = resolve(common, Config::new())?;
            let csv = simulate_csv(&cfg, &policy, slots, first_seed(&cfg)?)?;
            write(&common.out, "simulate.csv", &csv)
        }
        Command::Solve { horizon } => {
            let cfg = resolve(common, Config::new())?;
            write(&common.out, "solve.csv", &solve_csv(&cfg, horizon)?)
        }
        Command::Train => {
            let mut cfg = resolve(common, Config::new())?;
            match cfg.get("agent.kind")? {
                "tabular" => {
                    cfg.set("run.policies", "tabular")?;
                    finish(&run_experiment(&cfg)?, &common.out)
                }
                "dqn" => {
                    let seed = first_seed(&cfg)?;
                    let (trained, out) = train_from_config(&cfg, seed)?;
                    finish(&out, &common.out)?;
                    let ck = Checkpoint {
                        n_channels: trained.agent.n_inputs() / trained.window,
                        window: trained.window,
                        config_hash: cfg.hash(),
                        agent: trained.agent,
                    };
                    let path = common.out.join("checkpoint.txt");
                    save_checkpoint(&path, &ck)?;
                    println!("wrote {}", path.display());
                    Ok(())
                }
                other => Err(Error::Config(format!("unknown agent.kind `{other}`"))),
            }
        }
        Command::Eval { checkpoint } => {
            let cfg = resolve(common, Config::new())?;
            let ck = load_checkpoint(&checkpoint)?;
            if ck.config_hash != cfg.hash() {
                eprintln!(
                    "note: checkpoint config {} differs from current config {}",
                    ck.config_hash,
                    cfg.hash()
                );
            }
            let seed = first_seed(&cfg)?;
            let report = evaluate_checkpoint(&ck, &cfg, seed)?;
            let mut out = ExperimentOutput {
                config_hash: cfg.hash(),
                canonical_config: cfg.canonical_text(),
                ..Default::default()
            };
            out.push_report(cfg.get("run.case_id")?, seed, &report);
            finish(&out, &common.out)
        }
        Command::Adaptive => {
            let mut base = Config::new();
            base.set("env.kind", "switch")?;
            base.set("env.good", "8")?;
            base.set("run.policies", "dqn")?;
            let cfg = resolve(common, base)?;
            if cfg.get("env.kind")? != "switch" {
                return Err(Error::Config("adaptive runs need env.kind = switch".into()));
            }
            finish(&run_experiment(&cfg)?, &common.out)
        }
        Command::Trace { action } => match action {
            TraceAction::Validate { path } => {
                let t = load_trace(&path)?;
                println!("{}: {} channels, {} slots", path.display(), t.n_channels(), t.len());
                Ok(())
            }
            TraceAction::Stats { path } => {
                let t = load_trace(&path)?;
                write(&common.out, "trace_stats.csv", &trace_stats_csv(&t)?)
            }
            TraceAction::Synthesize { slots, burst, file } => {
                let cfg = resolve(common, Config::new())?;
                let spec = SurrogateSpec {
                    slots,
                    mean_burst: burst,
                    ..Default::default()
                };
                let seed = common.seed.unwrap_or(cfg.u64("env.trace_seed")?);
                let t = synthesize_bursty_trace(&spec, seed)?;
                std::fs::create_dir_all(&common.out)
                    .map_err(|e| io_error(&common.out, e))?;
                let path = common.out.join(file);
                let header = format!(
                    "synthetic bursty trace: {} channels, {slots} slots, mean burst {burst}, seed {seed}",
                    t.n_channels()
                );
                write_trace(&path, &t, &header)?;
                println!("wrote {}", path.display());
                Ok(())
            }
        },
        Command::Experiment { name, list } => {
            if list || name.is_none() {
                for (n, about) in BUNDLES {
                    println!("{n:<16} {about}");
                }
                return Ok(());
            }
            let cfg = resolve(common, bundle(name.as_deref().unwrap_or_default())?)?;
            finish(&run_experiment(&cfg)?, &common.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
