//! Flat `key = value` experiment configuration.

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exclusion::SimParams;
use crate::field::MollifierKind;

const KEYS: [&str; 11] = [
    "epsilon_list",
    "gamma",
    "window",
    "horizon",
    "replicas",
    "master_seed",
    "hermite_indices",
    "mollifier",
    "n_list",
    "sample_times",
    "out_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub epsilon_list: Vec<f64>,
    pub gamma: f64,
    pub window: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub master_seed: u64,
    pub hermite_indices: Vec<usize>,
    pub mollifier: MollifierKind,
    pub n_list: Vec<usize>,
    /// Macroscopic sample times, sorted, first entry 0.
    pub sample_times: Vec<f64>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    /// The desk-scale configuration: `ε ∈ {0.08, 0.04}`, `W = 20`,
    /// `T = 0.25`, 400 replicas, 33 sample times.
    fn default() -> Self {
        Self {
            epsilon_list: vec![0.08, 0.04],
            gamma: 1.0,
            window: 20.0,
            horizon: 0.25,
            replicas: 400,
            master_seed: 20_240_901,
            hermite_indices: vec![1, 2, 3],
            mollifier: MollifierKind::Bump,
            n_list: vec![2, 4, 8, 16],
            sample_times: uniform_times(0.25, 33),
            out_dir: PathBuf::from("results"),
        }
    }
}

/// `count` equally spaced times on `[0, horizon]`.
pub fn uniform_times(horizon: f64, count: usize) -> Vec<f64> {
    let k = count.max(2) - 1;
    (0..=k).map(|i| horizon * i as f64 / k as f64).collect()
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse list entry {s:?}")))
        })
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    /// Parse config text. Blank lines and `#` comments are ignored; keys
    /// not given keep their default. `sample_times` is either a count of
    /// equally spaced times or an explicit comma-separated list.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut times_spec: Option<String> = None;
        let mut seen = std::collections::BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
            match key {
                "epsilon_list" => cfg.epsilon_list = list(key, value)?,
                "gamma" => cfg.gamma = scalar(key, value)?,
                "window" => cfg.window = scalar(key, value)?,
                "horizon" => cfg.horizon = scalar(key, value)?,
                "replicas" => cfg.replicas = scalar(key, value)?,
                "master_seed" => cfg.master_seed = scalar(key, value)?,
                "hermite_indices" => cfg.hermite_indices = list(key, value)?,
                "mollifier" => {
                    cfg.mollifier = MollifierKind::parse(value).ok_or_else(|| {
                        Error::Config(format!(
                            "mollifier: expected bump or polybump, got {value:?}"
                        ))
                    })?
                }
                "n_list" => cfg.n_list = list(key, value)?,
                "sample_times" => times_spec = Some(value.to_string()),
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                _ => unreachable!(),
            }
        }
        cfg.sample_times = match times_spec {
            Some(spec) if !spec.contains(',') && spec.parse::<usize>().is_ok() => {
                uniform_times(cfg.horizon, spec.parse().unwrap())
            }
            Some(spec) => list("sample_times", &spec)?,
            None => uniform_times(cfg.horizon, 33),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.epsilon_list.is_empty() {
            return bad("epsilon_list is empty".into());
        }
        for &eps in &self.epsilon_list {
            self.params(eps)
                .map_err(|e| Error::Config(format!("epsilon {eps}: {e}")))?;
        }
        if self.replicas < 2 {
            return bad(format!(
                "replicas = {} but at least 2 are needed for standard errors",
                self.replicas
            ));
        }
        if self.hermite_indices.is_empty() || self.hermite_indices.contains(&0) {
            return bad("hermite_indices must be non-empty and 1-based".into());
        }
        if let Some(&n) = self.hermite_indices.iter().max() {
            if n > crate::basis::MAX_HERMITE_ORDER {
                return bad(format!(
                    "hermite index {n} exceeds {}",
                    crate::basis::MAX_HERMITE_ORDER
                ));
            }
        }
        if self.n_list.contains(&0) {
            return bad("n_list entries must be positive".into());
        }
        let t = &self.sample_times;
        if t.len() < 2 || t[0] != 0.0 {
            return bad("sample_times needs at least two times starting at 0".into());
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sample_times must be strictly increasing".into());
        }
        if *t.last().unwrap() > self.horizon * (1.0 + 1e-12) {
            return bad(format!(
                "sample time {} beyond horizon {}",
                t.last().unwrap(),
                self.horizon
            ));
        }
        Ok(())
    }

    pub fn params(&self, epsilon: f64) -> Result<SimParams> {
        SimParams::new(epsilon, self.gamma, self.window, self.horizon)
    }

    /// Canonical text form: every key in fixed order, shortest round-trip floats.
    pub fn canonical(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let lines = [
            (
                "epsilon_list",
                join(self.epsilon_list.iter().map(f64::to_string).collect()),
            ),
            ("gamma", self.gamma.to_string()),
            ("window", self.window.to_string()),
            ("horizon", self.horizon.to_string()),
            ("replicas", self.replicas.to_string()),
            ("master_seed", self.master_seed.to_string()),
            (
                "hermite_indices",
                join(self.hermite_indices.iter().map(usize::to_string).collect()),
            ),
            ("mollifier", self.mollifier.as_str().to_string()),
            (
                "n_list",
                join(self.n_list.iter().map(usize::to_string).collect()),
            ),
            (
                "sample_times",
                join(self.sample_times.iter().map(f64::to_string).collect()),
            ),
            ("out_dir", self.out_dir.display().to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Hex sha256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_canonical_text() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.sample_times.len(), 33);
        let again = ExperimentConfig::parse(&cfg.canonical()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn parses_every_key() {
        let text = "\
# tiny
epsilon_list = 0.25
gamma = 0.5
window = 4
horizon = 0.1
replicas = 2
master_seed = 9
hermite_indices = 1, 2
mollifier = polybump
n_list = 2,4
sample_times = 5
out_dir = /tmp/x
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.epsilon_list, vec![0.25]);
        assert_eq!(cfg.mollifier, MollifierKind::PolyBump);
        for (a, b) in cfg.sample_times.iter().zip([0.0, 0.025, 0.05, 0.075, 0.1]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(cfg.params(0.25).unwrap().sites, 16);
        let explicit = ExperimentConfig::parse("horizon = 1\nsample_times = 0, 0.5, 1").unwrap();
        assert_eq!(explicit.sample_times, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_bad_input_with_precise_messages() {
        let err = |t: &str| ExperimentConfig::parse(t).unwrap_err().to_string();
        assert!(err("speed = 3").contains("unknown key"));
        assert!(err("gamma = 1\ngamma = 2").contains("duplicate"));
        assert!(err("replicas = 1").contains("at least 2"));
        assert!(err("mollifier = box").contains("bump or polybump"));
        assert!(err("gamma = 10").contains("epsilon"));
        assert!(err("sample_times = 0, 0.3, 0.2").contains("increasing"));
        assert!(err("sample_times = 0, 1").contains("beyond horizon"));
        assert!(err("n_list = 2, x").contains("n_list"));
        assert!(err("no equals sign").contains("line 1"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.master_seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
