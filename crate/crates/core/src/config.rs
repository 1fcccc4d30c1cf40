//! Plain-text `key = value` experiment files.
//!
//! ```text
//! # comment
//! alpha = 1
//! c_tilde = 0.6
//! n_cells = 1000
//! left.rho_n = 1.2
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fvm::{FvmError, Grid1D, SolverConfig};
use crate::state::{ModelParams, PrimitiveState, StateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error(transparent)]
    Params(#[from] StateError),
    #[error(transparent)]
    Solver(#[from] FvmError),
}

const STATE_FIELDS: [&str; 4] = ["rho_n", "rho_s", "u_n", "u_s"];
const SCALAR_KEYS: [&str; 9] = [
    "alpha",
    "c_tilde",
    "x_min",
    "x_max",
    "n_cells",
    "t_final",
    "cfl",
    "fixed_ratio",
    "output_every",
];

/// Raw key/value pairs; later assignments override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    SCALAR_KEYS.contains(&key)
        || key
            .split_once('.')
            .is_some_and(|(side, f)| (side == "left" || side == "right") && STATE_FIELDS.contains(&f))
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            map.set(k.trim(), v.trim())?;
        }
        Ok(map)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !known(key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        if value.is_empty() {
            return Err(ConfigError::BadValue { key: key.to_string(), value: String::new() });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue { key: key.to_string(), value: v.to_string() })
            })
            .transpose()
    }

    fn state(&self, side: &'static str) -> Result<PrimitiveState, ConfigError> {
        let mut a = [0.0; 4];
        for (slot, field) in a.iter_mut().zip(STATE_FIELDS) {
            let key = format!("{side}.{field}");
            *slot = self.parsed(&key)?.ok_or(ConfigError::Missing(key))?;
        }
        Ok(PrimitiveState::from_array(a))
    }

    pub fn experiment(&self) -> Result<Experiment, ConfigError> {
        let params = ModelParams::new(
            self.parsed("alpha")?.unwrap_or(1.0),
            self.parsed("c_tilde")?.unwrap_or(0.6),
        )?;
        let grid = Grid1D::new(
            self.parsed("x_min")?.unwrap_or(-1.0),
            self.parsed("x_max")?.unwrap_or(1.0),
            self.parsed("n_cells")?.unwrap_or(1000),
        )?;
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            cfl: self.parsed("cfl")?.unwrap_or(defaults.cfl),
            fixed_ratio: self.parsed("fixed_ratio")?,
            t_final: self.parsed("t_final")?.unwrap_or(defaults.t_final),
            output_every: self.parsed("output_every")?.unwrap_or(defaults.output_every),
            branch_policy: defaults.branch_policy,
        };
        solver.validate()?;
        Ok(Experiment { params, grid, solver, left: self.state("left")?, right: self.state("right")? })
    }
}

/// A fully specified Riemann run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub params: ModelParams,
    pub grid: Grid1D,
    pub solver: SolverConfig,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
}

impl Experiment {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        ConfigMap::parse(text)?.experiment()
    }
}
