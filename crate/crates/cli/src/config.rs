//! `key=value` experiment files for `qlms-run`.
//!
//! ```text
//! # comment
//! M=4
//! mu=0.05
//! iterations=2000
//! noise_power=0
//! seed=7
//! true_weights=1+0i+0j+0k;0+1i+0j+0k;0+0i+1j+0k;0+0i+0j+1k
//! ```

use std::collections::HashMap;

use hrcalc::qlms::ExperimentConfig;
use hrcalc::{Error, Quaternion, Result};

const KEYS: [&str; 6] = ["M", "mu", "iterations", "noise_power", "seed", "true_weights"];

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn number<T: std::str::FromStr>(map: &HashMap<&str, &str>, key: &str) -> Result<T> {
    let raw = map.get(key).ok_or_else(|| bad(format!("missing key `{key}`")))?;
    raw.parse().map_err(|_| bad(format!("`{key}` has invalid value {raw:?}")))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(bad(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if map.insert(key, value.trim()).is_some() {
            return Err(bad(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }

    let filter_length: usize = number(&map, "M")?;
    let seed: u64 = number(&map, "seed")?;
    let true_weights = match map.get("true_weights") {
        Some(raw) => raw
            .split(';')
            .map(|s| s.trim().parse::<Quaternion>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| bad(format!("true_weights: {e}")))?,
        None => ExperimentConfig::random_true_weights(filter_length, seed),
    };
    let cfg = ExperimentConfig {
        filter_length,
        true_weights,
        noise_power: number(&map, "noise_power")?,
        step_size: number(&map, "mu")?,
        iterations: number(&map, "iterations")?,
        rng_seed: seed,
    };
    cfg.validate()?;
    Ok(cfg)
}
