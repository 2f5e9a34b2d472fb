use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Every accepted key with its default value.
const SCHEMA: &[(&str, &str)] = &[
    ("run.case_id", "default"),
    ("run.seeds", "1"),
    ("run.gamma", "0.9"),
    ("run.policies", "genie;dqn;whittle;random"),
    ("env.kind", "round_robin"),
    ("env.channels", "16"),
    ("env.good", "1"),
    ("env.p", "0.9"),
    ("env.order_seed", "0"),
    ("env.case", "0"),
    ("env.p01", "0.3"),
    ("env.p11", "0.8"),
    ("env.trace", ""),
    ("env.trace_slots", "50000"),
    ("env.trace_seed", "7"),
    ("env.burst", "10"),
    ("env.quality", "0.95;0.75;0.6;0.85;0.7;0.9;0.8;0.65"),
    ("env.after.kind", "round_robin"),
    ("env.after.good", "1"),
    ("env.after.p", "0.9"),
    ("env.switch_period", "5"),
    ("agent.kind", "dqn"),
    ("agent.preset", "wide2"),
    ("agent.history", "0"),
    ("agent.lr", "0"),
    ("agent.target_sync", "0"),
    ("agent.alpha", "0.1"),
    ("agent.users", "1"),
    ("train.iterations", "100"),
    ("train.steps_per_iteration", "1000"),
    ("train.learning_starts", "1000"),
    ("train.episode_length", "100"),
    ("train.epsilon", "0.1"),
    ("train.replay", "1000000"),
    ("train.tabular_steps", "100000"),
    ("eval.episodes", "1000"),
    ("eval.length", "100"),
    ("eval.curve_episodes", "100"),
    ("whittle.observe_slots", "10000"),
    ("probe.count", "64"),
    ("probe.rollout", "1000"),
    ("adaptive.period", "1000"),
    ("adaptive.threshold", "0.3"),
    ("adaptive.budget", "80"),
    ("adaptive.periods", "100"),
    ("adaptive.cold_start", "false"),
    ("sweep.key", ""),
    ("sweep.values", ""),
];

fn default_of(key: &str) -> Option<&'static str> {
    SCHEMA.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// Flat `section.key = value` configuration. Unknown keys are rejected and
/// unset keys take their defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1))
            })?;
            let k = k.trim();
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
            cfg.set(k, v.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip(e))))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if default_of(key).is_none() {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        if value.contains('\n') {
            return Err(Error::Config(format!("value of `{key}` spans lines")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        match self.values.get(key) {
            Some(v) => Ok(v),
            None => default_of(key).ok_or_else(|| Error::Config(format!("unknown key `{key}`"))),
        }
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{raw}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v: f64 = self.parse_value(key)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("`{key}` must be finite")))
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parse_value(key)
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.parse_value(key)
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        self.parse_value(key)
    }

    /// `;`-separated list, empty entries dropped.
    pub fn list(&self, key: &str) -> Result<Vec<String>> {
        Ok(self
            .get(key)?
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect())
    }

    pub fn list_of<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.list(key)?
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{s}`")))
            })
            .collect()
    }

    /// Every key with its resolved value, sorted by key.
    pub fn canonical_text(&self) -> String {
        let mut keys: Vec<&str> = SCHEMA.iter().map(|(k, _)| *k).collect();
        keys.sort_unstable();
        let mut out = String::new();
        for k in keys {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(self.get(k).expect("schema key"));
            out.push('\n');
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Keys set explicitly, in sorted order.
    pub fn explicit(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
