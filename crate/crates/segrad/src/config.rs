//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use segrad_core::experiments::{scenario_by_name, InitialPiece, Outcome, Scenario};
use segrad_core::pde::{Habitat, Orientation, SystemKind};
use segrad_core::{Error, ModelParams, PiecewiseCapacity};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub half_length: f64,
    pub dx: f64,
    #[serde(default)]
    pub orientation: Orientation,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            half_length: 40.0,
            dx: 0.1,
            orientation: Orientation::ForestLeft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub system: SystemKind,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Outcome>,
    pub params: ModelParams,
    pub caps: PiecewiseCapacity,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub initial: Vec<InitialPiece>,
}

fn default_name() -> String {
    "run".into()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        RunConfig {
            name: s.name.clone(),
            system: s.system,
            t_end: s.t_end,
            dt: s.dt,
            snapshot_every: None,
            out: None,
            expected: Some(s.expected),
            params: s.params,
            caps: s.habitat.caps,
            grid: GridSettings {
                half_length: s.half_length,
                dx: s.dx,
                orientation: s.habitat.orientation,
            },
            initial: s.initial.clone(),
        }
    }

    pub fn packaged(name: &str) -> Result<Self, CliError> {
        scenario_by_name(name)
            .map(|s| Self::from_scenario(&s))
            .ok_or_else(|| CliError::Config(unknown_scenario(name)))
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            name: self.name.clone(),
            params: self.params,
            habitat: Habitat::new(self.caps, self.grid.orientation),
            system: self.system,
            initial: self.initial.clone(),
            t_end: self.t_end,
            dt: self.dt,
            dx: self.grid.dx,
            half_length: self.grid.half_length,
            expected: self.expected.unwrap_or(Outcome::TwoFrontSegregation),
        }
    }

    /// Checks every precondition the commands rely on.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        {
            return Err(CliError::Config(
                "name must be nonempty and use only [A-Za-z0-9_.-]".into(),
            ));
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Config("snapshot_every must be positive".into()));
            }
        }
        self.params.validate_for_solver()?;
        self.scenario().validate()?;
        self.scenario().grid()?;
        Ok(())
    }
}

pub fn unknown_scenario(name: &str) -> String {
    format!(
        "unknown scenario `{name}`; valid names: {}",
        segrad_core::experiments::SCENARIO_NAMES.join(", ")
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
