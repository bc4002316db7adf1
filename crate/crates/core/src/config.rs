//! Experiment configuration: JSON in, fully resolved parameters out.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::sampling::{ModelParams, WeightDistribution};
use crate::statistics::parse_statistic;

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "LMSTAB_WORKERS";

const KNOWN: &[&str] = &["n", "d", "p", "lambda", "dist", "stat", "replicas", "seed", "workers", "mode", "k", "out"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Clt,
    Variance,
    Stabilization,
    Gamma,
    BoundPipeline,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Clt, Mode::Variance, Mode::Stabilization, Mode::Gamma, Mode::BoundPipeline];

    pub fn key(&self) -> &'static str {
        match self {
            Mode::Clt => "clt",
            Mode::Variance => "variance",
            Mode::Stabilization => "stabilization",
            Mode::Gamma => "gamma",
            Mode::BoundPipeline => "bound-pipeline",
        }
    }

    fn from_key(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.key() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub stat: Option<String>,
    pub replicas: usize,
    pub seed: u64,
    pub workers: usize,
    pub mode: Mode,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Exponential with mean `n` for the nearest-face statistics, unit weights
/// otherwise.
pub fn default_dist(stat: Option<&str>, n: usize) -> WeightDistribution {
    match stat {
        Some(s) if s == "nn" || s.starts_with("nn-alpha") => WeightDistribution::Exponential { mean: n as f64 },
        _ => WeightDistribution::UNWEIGHTED,
    }
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
    errors: Vec<String>,
}

impl Fields<'_> {
    fn uint(&mut self, key: &str) -> Option<u64> {
        let v = self.map.get(key)?;
        match v.as_u64() {
            Some(x) => Some(x),
            None => {
                self.errors.push(format!("{key}: expected a nonnegative integer, got {v}"));
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v = self.map.get(key)?;
        match v.as_f64() {
            Some(x) => Some(x),
            None => {
                self.errors.push(format!("{key}: expected a number, got {v}"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key)?;
        match v.as_str() {
            Some(x) => Some(x.to_string()),
            None => {
                self.errors.push(format!("{key}: expected a string, got {v}"));
                None
            }
        }
    }

    fn require<T>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        if v.is_none() && !self.map.contains_key(key) {
            self.errors.push(format!("{key}: missing"));
        }
        v
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        match value {
            Value::Object(map) => Self::resolve(&map),
            other => Err(Error::Config(vec![format!("expected a JSON object, got {other}")])),
        }
    }

    /// Validates every field, reporting all problems at once, and fills
    /// defaults for `p` (1, the complete complex), `dist`, `workers`, `mode`.
    pub fn resolve(map: &Map<String, Value>) -> Result<Self> {
        let mut f = Fields { map, errors: Vec::new() };
        for key in map.keys() {
            if !KNOWN.contains(&key.as_str()) {
                f.errors.push(format!("{key}: unknown field"));
            }
        }
        let n = f.uint("n");
        let n = f.require("n", n);
        let d = f.uint("d");
        let d = f.require("d", d);
        let p = f.float("p");
        let lambda = f.float("lambda");
        let mode = match f.string("mode") {
            None => Mode::default(),
            Some(m) => Mode::from_key(&m).unwrap_or_else(|| {
                let keys: Vec<&str> = Mode::ALL.iter().map(Mode::key).collect();
                f.errors.push(format!("mode: unknown mode {m:?}; expected one of {}", keys.join(", ")));
                Mode::default()
            }),
        };
        let stat = f.string("stat");
        let stat = if mode == Mode::Gamma { stat } else { f.require("stat", stat) };
        if let Some(s) = &stat {
            if let Err(e) = parse_statistic(s) {
                f.errors.push(format!("stat: {e}"));
            }
        }
        let replicas = f.uint("replicas");
        let replicas = f.require("replicas", replicas);
        if replicas.is_some_and(|r| r < 2) {
            f.errors.push("replicas: must be >= 2".into());
        }
        let seed = f.uint("seed");
        let seed = f.require("seed", seed);
        let workers = f.uint("workers");
        if workers == Some(0) {
            f.errors.push("workers: must be >= 1".into());
        }
        let k = f.uint("k");
        let out = f.string("out").map(PathBuf::from);
        let dist = match map.get("dist") {
            None => None,
            Some(Value::String(s)) => s.parse().map_err(|e: Error| f.errors.push(format!("dist: {e}"))).ok(),
            Some(v) => serde_json::from_value::<WeightDistribution>(v.clone())
                .map_err(|e| f.errors.push(format!("dist: {e}")))
                .and_then(|d| d.validate().map(|_| d).map_err(|e| f.errors.push(format!("dist: {e}"))))
                .ok(),
        };

        let p = match (n, p, lambda) {
            (Some(n), Some(p), Some(l)) => {
                let implied = n as f64 * p;
                if (implied - l).abs() > 1e-12 * l.abs().max(1.0) {
                    f.errors.push(format!("lambda: {l} inconsistent with n * p = {implied}"));
                }
                Some(p)
            }
            (_, Some(p), None) => Some(p),
            (Some(n), None, Some(l)) => Some(l / n as f64),
            (_, None, None) if !map.contains_key("p") && !map.contains_key("lambda") => Some(1.0),
            _ => None,
        };
        let params = match (n, d, p) {
            (Some(n), Some(d), Some(p)) => {
                let dist = dist.unwrap_or_else(|| default_dist(stat.as_deref(), n as usize));
                ModelParams::new(n as usize, d as usize, p, dist)
                    .map_err(|e| f.errors.push(format!("model: {e}")))
                    .ok()
            }
            _ => None,
        };
        if !f.errors.is_empty() {
            return Err(Error::Config(f.errors));
        }
        Ok(Self {
            params: params.expect("validated"),
            stat,
            replicas: replicas.expect("validated") as usize,
            seed: seed.expect("validated"),
            workers: workers.map(|w| w as usize).unwrap_or_else(default_workers),
            mode,
            k: k.map(|k| k as usize),
            out,
        })
    }

    /// Every field, defaults included; `resolve` of this value reproduces `self`.
    pub fn to_value(&self) -> Value {
        let mut map = self.reproducible_map();
        map.insert("workers".into(), self.workers.into());
        if let Some(out) = &self.out {
            map.insert("out".into(), out.to_string_lossy().into_owned().into());
        }
        Value::Object(map)
    }

    /// Fields that determine the results; omits `workers` and `out`.
    pub fn reproducible_echo(&self) -> Value {
        Value::Object(self.reproducible_map())
    }

    fn reproducible_map(&self) -> Map<String, Value> {
        let mut map = Map::new();
        map.insert("n".into(), self.params.n.into());
        map.insert("d".into(), self.params.d.into());
        map.insert("p".into(), self.params.p.into());
        map.insert("lambda".into(), self.params.lambda().into());
        map.insert("dist".into(), serde_json::to_value(self.params.dist).expect("dist serializes"));
        if let Some(s) = &self.stat {
            map.insert("stat".into(), s.clone().into());
        }
        map.insert("replicas".into(), self.replicas.into());
        map.insert("seed".into(), self.seed.into());
        map.insert("mode".into(), self.mode.key().into());
        if let Some(k) = self.k {
            map.insert("k".into(), k.into());
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves() {
        let c = ExperimentConfig::from_json_str(r#"{"n":50,"d":1,"p":1.0,"stat":"nn","replicas":10,"seed":7}"#)
            .unwrap();
        assert_eq!(c.params.dist, WeightDistribution::Exponential { mean: 50.0 });
        assert_eq!(c.mode, Mode::Clt);
        assert!(c.workers >= 1);
        let again = ExperimentConfig::resolve(c.to_value().as_object().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn lambda_and_p() {
        let base = r#""n":100,"d":2,"stat":"isolated","replicas":4,"seed":1"#;
        let c = ExperimentConfig::from_json_str(&format!("{{{base},\"lambda\":1.0}}")).unwrap();
        assert_eq!(c.params.p, 0.01);
        assert!(ExperimentConfig::from_json_str(&format!("{{{base},\"lambda\":1.0,\"p\":0.01}}")).is_ok());
        assert!(ExperimentConfig::from_json_str(&format!("{{{base},\"lambda\":1.1,\"p\":0.01}}")).is_err());
    }

    #[test]
    fn all_problems_reported() {
        let err = ExperimentConfig::from_json_str(r#"{"n":"x","d":1,"p":1.0,"stat":"nn","seed":1,"colour":3}"#)
            .unwrap_err();
        let Error::Config(list) = err else { panic!("{err}") };
        assert!(list.iter().any(|e| e.starts_with("n:")), "{list:?}");
        assert!(list.iter().any(|e| e.starts_with("colour:")), "{list:?}");
        assert!(list.iter().any(|e| e.starts_with("replicas:")), "{list:?}");
    }
}
