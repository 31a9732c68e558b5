//! TOML run configuration. Unknown keys are rejected so typos fail loudly
//! instead of silently running with defaults.

use super::IoError;
use crate::assignment::{EngineParams, PreprocessOptions};
use crate::choice::{DecisionModel, ModelConfig};
use crate::pat::{Pat, PenaltyParams, Weight};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub paths: Paths,
    #[serde(default)]
    pub penalties: Penalties,
    #[serde(default)]
    pub assignment: Assignment,
    #[serde(default)]
    pub preprocessing: Preprocessing,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Directory holding the network CSV files.
    pub network: PathBuf,
    pub demand: PathBuf,
    pub output: PathBuf,
    /// Artifact cache directory; defaults to `<output>/cache`.
    #[serde(default)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Penalties {
    /// Seconds added per vehicle-to-vehicle transfer.
    pub transfer_penalty: u32,
    pub wait_weight: f64,
    pub walk_weight: f64,
    pub buffer_weight: f64,
    /// Seconds of perceived delay a passenger tolerates over the best option.
    pub delay_tolerance: u32,
}

impl Default for Penalties {
    fn default() -> Penalties {
        Penalties {
            transfer_penalty: 300,
            wait_weight: 0.5,
            walk_weight: 1.0,
            buffer_weight: 0.5,
            delay_tolerance: 300,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Assignment {
    pub model: String,
    pub beta: f64,
    pub multiplier: u32,
    pub seed: u64,
    pub remove_cycles: bool,
    /// Worker threads for destination batches; absent means logical cores.
    /// Thread count never changes results, only wall time.
    pub threads: Option<usize>,
    /// Build missing preprocessing artifacts during `assign` instead of
    /// failing.
    pub auto_preprocess: bool,
    /// Emit phase timings as a JSON line instead of text.
    pub timing_json: bool,
}

impl Default for Assignment {
    fn default() -> Assignment {
        Assignment {
            model: "logit".into(),
            beta: 1.0,
            multiplier: 100,
            seed: 0,
            remove_cycles: true,
            threads: None,
            auto_preprocess: false,
            timing_json: false,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Preprocessing {
    pub avg_degree_limit: f64,
    pub max_transfer_time: u32,
}

impl Default for Preprocessing {
    fn default() -> Preprocessing {
        let defaults = PreprocessOptions::default();
        Preprocessing {
            avg_degree_limit: defaults.avg_degree_limit,
            max_transfer_time: defaults.max_transfer_time,
        }
    }
}

pub fn load_config(path: &Path) -> Result<Config, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    toml::from_str(&text).map_err(|e| IoError::Config {
        file: path.to_path_buf(),
        source: Box::new(e),
    })
}

impl Config {
    pub fn penalty_params(&self) -> Result<PenaltyParams, IoError> {
        let weight = |value: f64, name: &str| {
            Weight::from_f64(value)
                .map_err(|e| IoError::ConfigValue(format!("penalties.{name}: {e}")))
        };
        Ok(PenaltyParams {
            transfer_penalty: Pat::from_seconds(self.penalties.transfer_penalty),
            wait_weight: weight(self.penalties.wait_weight, "wait_weight")?,
            walk_weight: weight(self.penalties.walk_weight, "walk_weight")?,
            buffer_weight: weight(self.penalties.buffer_weight, "buffer_weight")?,
            delay_tolerance: Pat::from_seconds(self.penalties.delay_tolerance),
        })
    }

    pub fn engine_params(&self) -> Result<EngineParams, IoError> {
        let model: DecisionModel = self
            .assignment
            .model
            .parse()
            .map_err(|e| IoError::ConfigValue(format!("assignment.model: {e}")))?;
        let model = ModelConfig::new(model, self.assignment.beta)
            .map_err(|e| IoError::ConfigValue(format!("assignment.beta: {e}")))?;
        Ok(EngineParams {
            penalties: self.penalty_params()?,
            multiplier: self.assignment.multiplier,
            model,
            seed: self.assignment.seed,
            remove_cycles: self.assignment.remove_cycles,
        })
    }

    pub fn preprocess_options(&self) -> PreprocessOptions {
        PreprocessOptions {
            avg_degree_limit: self.preprocessing.avg_degree_limit,
            max_transfer_time: self.preprocessing.max_transfer_time,
        }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.paths
            .cache
            .clone()
            .unwrap_or_else(|| self.paths.output.join("cache"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn full_config_parses() {
        let f = write_config(
            r#"
[paths]
network = "net"
demand = "demand.csv"
output = "out"

[penalties]
transfer_penalty = 120
wait_weight = 0.5
walk_weight = 2.0
buffer_weight = 1.0
delay_tolerance = 600

[assignment]
model = "kirchhoff"
beta = 2.0
multiplier = 1000
seed = 42
remove_cycles = false

[preprocessing]
avg_degree_limit = 8.0
max_transfer_time = 1800
"#,
        );
        let cfg = load_config(f.path()).unwrap();
        let params = cfg.engine_params().unwrap();
        assert_eq!(params.multiplier, 1000);
        assert_eq!(params.seed, 42);
        assert!(!params.remove_cycles);
        assert_eq!(params.penalties.delay_tolerance, Pat::from_seconds(600));
        assert_eq!(cfg.preprocess_options().max_transfer_time, 1800);
        assert_eq!(cfg.cache_dir(), PathBuf::from("out/cache"));
    }

    #[test]
    fn sections_other_than_paths_are_optional() {
        let f = write_config("[paths]\nnetwork = \"n\"\ndemand = \"d\"\noutput = \"o\"\n");
        let cfg = load_config(f.path()).unwrap();
        let params = cfg.engine_params().unwrap();
        assert_eq!(params.multiplier, 100);
        assert_eq!(params.penalties.wait_weight.as_f64(), 0.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let f = write_config(
            "[paths]\nnetwork = \"n\"\ndemand = \"d\"\noutput = \"o\"\n[assignment]\nmodle = \"logit\"\n",
        );
        assert!(matches!(load_config(f.path()), Err(IoError::Config { .. })));
    }

    #[test]
    fn negative_weight_is_rejected() {
        let f = write_config(
            "[paths]\nnetwork = \"n\"\ndemand = \"d\"\noutput = \"o\"\n[penalties]\nwait_weight = -1.0\n",
        );
        let cfg = load_config(f.path()).unwrap();
        assert!(matches!(
            cfg.engine_params(),
            Err(IoError::ConfigValue(_))
        ));
    }
}
