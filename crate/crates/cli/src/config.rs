//! Optional TOML settings file. Flags override it; it overrides the
//! built-in defaults.
//!
//! ```toml
//! [sampler]
//! c_max = 5
//! subsample = 1e-4
//!
//! [train]
//! k = 50
//! xi_mode = "exact"
//!
//! [sg]
//! epochs = 15
//!
//! [eval]
//! rare_max = 5
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub sg: SgSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub c_max: Option<usize>,
    pub subsample: Option<f64>,
    pub neg_ratio: Option<f64>,
    pub min_count: Option<u64>,
    pub unigram_power: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub k: Option<usize>,
    pub tau_u: Option<f64>,
    pub tau_v: Option<f64>,
    pub tau_hu: Option<f64>,
    pub tau_hv: Option<f64>,
    pub max_sweeps: Option<usize>,
    pub tol: Option<f64>,
    pub xi_mode: Option<String>,
    pub parent_schedule: Option<String>,
    pub oov_policy: Option<String>,
    pub resample_negatives: Option<bool>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgSection {
    pub k: Option<usize>,
    pub lr: Option<f64>,
    pub epochs: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub rare_max: Option<u64>,
    pub rare_mode: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
