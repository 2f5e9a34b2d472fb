use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::adam::AdamState;
use super::dqn::{DqnAgent, DqnConfig};
use super::mlp::{Gradients, Mlp};
use crate::error::{Error, Result};

const MAGIC: &str = "chanaccess-checkpoint";
const VERSION: u32 = 1;

/// A trained agent plus what is needed to drive it again. Floats are stored
/// as raw bit patterns so a reload behaves bit-identically.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub agent: DqnAgent,
    pub n_channels: usize,
    pub window: usize,
    pub config_hash: String,
}

fn hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn push_floats<'a>(out: &mut String, key: &str, values: impl Iterator<Item = &'a f64>) {
    out.push_str(key);
    for v in values {
        out.push(' ');
        out.push_str(&hex(*v));
    }
    out.push('\n');
}

fn push_net(out: &mut String, prefix: &str, w: &[Array2<f64>], b: &[Array1<f64>]) {
    for (l, (w, b)) in w.iter().zip(b).enumerate() {
        push_floats(out, &format!("{prefix}.{l}.w"), w.iter());
        push_floats(out, &format!("{prefix}.{l}.b"), b.iter());
    }
}

pub fn write_checkpoint(ck: &Checkpoint) -> String {
    let a = &ck.agent;
    let cfg = a.config();
    let net = a.network();
    let adam = a.adam();
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "config_hash {}", ck.config_hash);
    let _ = writeln!(s, "n_channels {}", ck.n_channels);
    let _ = writeln!(s, "window {}", ck.window);
    let _ = writeln!(s, "sizes {}", join(net.sizes()));
    let _ = writeln!(s, "gamma {}", hex(cfg.gamma));
    let _ = writeln!(s, "learning_rate {}", hex(cfg.learning_rate));
    let _ = writeln!(s, "batch_size {}", cfg.batch_size);
    let _ = writeln!(
        s,
        "target_sync {}",
        cfg.target_sync.map_or("none".to_string(), |k| k.to_string())
    );
    let _ = writeln!(s, "divergence_bound {}", hex(cfg.divergence_bound));
    let _ = writeln!(s, "adam_step {}", adam.step);
    let _ = writeln!(
        s,
        "adam_constants {} {} {}",
        hex(adam.beta1),
        hex(adam.beta2),
        hex(adam.epsilon)
    );
    push_net(&mut s, "net", net.weights(), net.biases());
    push_net(&mut s, "adam_m", &adam.first.weights, &adam.first.biases);
    push_net(&mut s, "adam_v", &adam.second.weights, &adam.second.biases);
    if let Some(t) = a.target_network() {
        push_net(&mut s, "target", t.weights(), t.biases());
    }
    s.push_str("end\n");
    s
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

struct Fields<'a>(HashMap<&'a str, &'a str>);

impl<'a> Fields<'a> {
    fn get(&self, key: &str) -> Result<&'a str> {
        self.0.get(key).copied().ok_or_else(|| bad(format!("missing `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .parse()
            .map_err(|_| bad(format!("`{key}` is not an integer")))
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)?.split_whitespace().map(parse_hex).collect()
    }

    fn float(&self, key: &str) -> Result<f64> {
        match self.floats(key)?.as_slice() {
            [v] => Ok(*v),
            _ => Err(bad(format!("`{key}` must hold one value"))),
        }
    }

    fn net(&self, prefix: &str, sizes: &[usize]) -> Result<(Vec<Array2<f64>>, Vec<Array1<f64>>)> {
        let mut ws = Vec::new();
        let mut bs = Vec::new();
        for (l, dims) in sizes.windows(2).enumerate() {
            let w = self.floats(&format!("{prefix}.{l}.w"))?;
            let b = self.floats(&format!("{prefix}.{l}.b"))?;
            let w = Array2::from_shape_vec((dims[0], dims[1]), w)
                .map_err(|_| bad(format!("`{prefix}.{l}.w` has the wrong length")))?;
            if b.len() != dims[1] {
                return Err(bad(format!("`{prefix}.{l}.b` has the wrong length")));
            }
            ws.push(w);
            bs.push(Array1::from(b));
        }
        Ok((ws, bs))
    }
}

fn parse_hex(tok: &str) -> Result<f64> {
    u64::from_str_radix(tok, 16)
        .map(f64::from_bits)
        .map_err(|_| bad(format!("bad float bits `{tok}`")))
}

pub fn read_checkpoint(text: &str) -> Result<Checkpoint> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty checkpoint"))?;
    match header.split_once(' ') {
        Some((MAGIC, v)) if v == VERSION.to_string() => {}
        Some((MAGIC, v)) => return Err(bad(format!("unsupported checkpoint version {v}"))),
        _ => return Err(bad("not a checkpoint file")),
    }
    let mut map = HashMap::new();
    let mut ended = false;
    for line in lines {
        if line == "end" {
            ended = true;
            break;
        }
        let (k, v) = line.split_once(' ').unwrap_or((line, ""));
        if map.insert(k, v).is_some() {
            return Err(bad(format!("duplicate `{k}`")));
        }
    }
    if !ended {
        return Err(bad("truncated checkpoint"));
    }
    let f = Fields(map);
    let sizes = f
        .get("sizes")?
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| bad("bad layer size")))
        .collect::<Result<Vec<_>>>()?;
    if sizes.len() < 2 {
        return Err(bad("checkpoint needs at least two layer sizes"));
    }
    let (w, b) = f.net("net", &sizes)?;
    let online = Mlp::from_parts(w, b)?;
    let (mw, mb) = f.net("adam_m", &sizes)?;
    let (vw, vb) = f.net("adam_v", &sizes)?;
    let constants = f.floats("adam_constants")?;
    if constants.len() != 3 {
        return Err(bad("`adam_constants` must hold three values"));
    }
    let adam = AdamState {
        first: Gradients {
            weights: mw,
            biases: mb,
        },
        second: Gradients {
            weights: vw,
            biases: vb,
        },
        step: f
            .get("adam_step")?
            .parse()
            .map_err(|_| bad("`adam_step` is not an integer"))?,
        beta1: constants[0],
        beta2: constants[1],
        epsilon: constants[2],
    };
    let target_sync = match f.get("target_sync")? {
        "none" => None,
        k => Some(k.parse().map_err(|_| bad("bad `target_sync`"))?),
    };
    let target = if f.0.contains_key("target.0.w") {
        let (tw, tb) = f.net("target", &sizes)?;
        Some(Mlp::from_parts(tw, tb)?)
    } else {
        None
    };
    let config = DqnConfig {
        hidden: sizes[1..sizes.len() - 1].to_vec(),
        learning_rate: f.float("learning_rate")?,
        gamma: f.float("gamma")?,
        batch_size: f.usize("batch_size")?,
        target_sync,
        divergence_bound: f.float("divergence_bound")?,
    };
    let agent = DqnAgent::from_parts(online, target, Some(adam), config)?;
    let n_channels = f.usize("n_channels")?;
    let window = f.usize("window")?;
    if n_channels * window != agent.n_inputs() {
        return Err(bad(format!(
            "{n_channels} channels x {window} slots does not match input width {}",
            agent.n_inputs()
        )));
    }
    Ok(Checkpoint {
        agent,
        n_channels,
        window,
        config_hash: f.get("config_hash")?.to_string(),
    })
}

pub fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<()> {
    std::fs::write(path, write_checkpoint(ck)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(&text)
}
