//! Run configuration: a flat JSON object with dotted keys
//! (`{"snn.tau": 31.0, "decoder.zero_hz": 1.0}`). Unknown keys are
//! rejected. Precedence per value: built-in default < config file < CLI
//! flag. Every command emits the fully resolved map next to its outputs
//! so a run can be reproduced from the artifact alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CmdError, CmdResult};

/// Every key a config file may set, with its role.
pub const KNOWN_KEYS: &[&str] = &[
    "data.n",
    "data.separation",
    "data.seed",
    "encoder.tau",
    "encoder.normalize",
    "snn.arch",
    "snn.tau",
    "snn.eta",
    "snn.epochs",
    "snn.gamma",
    "snn.beta",
    "snn.fc1_mean",
    "snn.p_conn",
    "snn.hidden_scale",
    "snn.seed",
    "snn.k_folds",
    "grid.taus",
    "grid.etas",
    "grid.epochs",
    "grid.gammas",
    "grid.betas",
    "grid.fc1_means",
    "grid.p_conns",
    "grid.hidden_scales",
    "grid.seeds",
    "quant.finetune",
    "quant.finetune_epochs",
    "emulator.base_efficacy",
    "emulator.gabab_efficacy",
    "emulator.tau_m_s",
    "emulator.tau_ampa_s",
    "emulator.tau_gabaa_s",
    "emulator.tau_gabab_s",
    "emulator.v_th",
    "emulator.refractory_s",
    "emulator.trial_duration_s",
    "emulator.pre_buffer_s",
    "emulator.post_buffer_s",
    "emulator.sim_dt_s",
    "emulator.mismatch_cv_weight",
    "emulator.mismatch_cv_tau",
    "emulator.mismatch_seed",
    "emulator.trials",
    "decoder.zero_hz",
    "decoder.diff_hz",
    "decoder.offset_hz",
    "decoder.offset_step_hz",
    "decoder.limit_hz",
    "decoder.window_s",
    "baseline.c_grid",
    "baseline.max_iter",
    "baseline.tol",
    "baseline.k_folds",
    "baseline.seed",
    "jobs",
];

/// Resolved flat configuration.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, Value>,
}

impl RunConfig {
    /// Load from an optional JSON file; a missing argument yields an empty
    /// (all-defaults) configuration.
    pub fn load(path: Option<&Path>) -> CmdResult<RunConfig> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CmdError::io(path, e))?;
        let parsed: Value = serde_json::from_str(&text)
            .map_err(|e| CmdError::Config(format!("{}: {e}", path.display())))?;
        let Value::Object(map) = parsed else {
            return Err(CmdError::Config(format!(
                "{}: config must be a flat JSON object",
                path.display()
            )));
        };
        let mut values = BTreeMap::new();
        for (key, value) in map {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CmdError::Config(format!("unknown config key `{key}`")));
            }
            values.insert(key, value);
        }
        Ok(RunConfig { values })
    }

    pub fn set(&mut self, key: &str, value: Value) {
        debug_assert!(KNOWN_KEYS.contains(&key), "unknown key {key}");
        self.values.insert(key.to_string(), value);
    }

    pub fn set_f64(&mut self, key: &str, v: f64) {
        self.set(key, serde_json::json!(v));
    }

    pub fn set_u64(&mut self, key: &str, v: u64) {
        self.set(key, serde_json::json!(v));
    }

    pub fn set_str(&mut self, key: &str, v: &str) {
        self.set(key, Value::String(v.to_string()));
    }

    pub fn set_bool(&mut self, key: &str, v: bool) {
        self.set(key, Value::Bool(v));
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CmdResult<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CmdError::Config(format!("`{key}` must be a number"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> CmdResult<u64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .ok_or_else(|| CmdError::Config(format!("`{key}` must be a non-negative integer"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CmdResult<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CmdResult<bool> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| CmdError::Config(format!("`{key}` must be a boolean"))),
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> CmdResult<String> {
        match self.values.get(key) {
            None => Ok(default.to_string()),
            Some(v) => v
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| CmdError::Config(format!("`{key}` must be a string"))),
        }
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> CmdResult<Vec<f64>> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| CmdError::Config(format!("`{key}` must be numbers")))
                })
                .collect(),
            Some(_) => Err(CmdError::Config(format!("`{key}` must be an array"))),
        }
    }

    pub fn u64_list_or(&self, key: &str, default: &[u64]) -> CmdResult<Vec<u64>> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_u64()
                        .ok_or_else(|| CmdError::Config(format!("`{key}` must be non-negative integers")))
                })
                .collect(),
            Some(_) => Err(CmdError::Config(format!("`{key}` must be an array"))),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> CmdResult<Vec<usize>> {
        let d: Vec<u64> = default.iter().map(|&v| v as u64).collect();
        Ok(self.u64_list_or(key, &d)?.into_iter().map(|v| v as usize).collect())
    }

    /// The resolved map as a JSON object.
    pub fn as_json(&self) -> Value {
        Value::Object(self.values.clone().into_iter().collect())
    }
}

/// Write the resolved config sidecar `<out>.config.json`.
pub fn write_config_sidecar(out_path: &Path, config: &RunConfig) -> CmdResult<PathBuf> {
    let mut sidecar = out_path.as_os_str().to_owned();
    sidecar.push(".config.json");
    let sidecar = PathBuf::from(sidecar);
    let text = serde_json::to_string_pretty(&config.as_json())
        .map_err(|e| CmdError::Numeric(e.to_string()))?;
    fs::write(&sidecar, text + "\n").map_err(|e| CmdError::io(&sidecar, e))?;
    Ok(sidecar)
}
