//! Run configuration: JSON file values, overridden by command-line flags,
//! on top of figure-preset defaults.

use std::path::PathBuf;

use meson_eff::MesonParams;
use serde::{Deserialize, Serialize};

use crate::parse::{Figure, ParseError, SystemPreset, TimeUnit};

pub const DEFAULT_SEED: u64 = meson_eff::bell::DEFAULT_SEED;

/// The `system` field: a preset tag or explicit widths and `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Preset(String),
    Explicit { gamma_s: f64, gamma_l: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

/// Everything a config file or the global flags may set. Unset fields fall
/// through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub system: Option<SystemSpec>,
    pub gamma_s: Option<f64>,
    pub gamma_l: Option<f64>,
    pub delta: Option<f64>,
    pub time_unit: Option<String>,
    #[serde(default)]
    pub grid: GridSpec,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn parse_config(text: &str) -> Result<ConfigLayer, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Domain(format!("config: {e}")))
}

impl ConfigLayer {
    /// `self` with every field that `over` sets replaced.
    pub fn overlay(mut self, over: ConfigLayer) -> ConfigLayer {
        if over.system.is_some() {
            self.system = over.system;
        }
        self.gamma_s = over.gamma_s.or(self.gamma_s);
        self.gamma_l = over.gamma_l.or(self.gamma_l);
        self.delta = over.delta.or(self.delta);
        self.time_unit = over.time_unit.or(self.time_unit);
        self.grid.t_min = over.grid.t_min.or(self.grid.t_min);
        self.grid.t_max = over.grid.t_max.or(self.grid.t_max);
        self.grid.steps = over.grid.steps.or(self.grid.steps);
        self.output_path = over.output_path.or(self.output_path);
        self.seed = over.seed.or(self.seed);
        self
    }

    pub fn from_figure(fig: Figure) -> ConfigLayer {
        let (t_min, t_max, steps) = fig.grid();
        ConfigLayer {
            system: Some(SystemSpec::Preset(fig.system().as_str().into())),
            grid: GridSpec {
                t_min: Some(t_min),
                t_max: Some(t_max),
                steps: Some(steps),
            },
            ..ConfigLayer::default()
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, ParseError> {
        let domain = |e: meson_eff::Error| ParseError::Domain(e.to_string());
        let base = match &self.system {
            None => SystemPreset::Kaon.params(),
            Some(SystemSpec::Preset(tag)) => tag.parse::<SystemPreset>()?.params(),
            Some(SystemSpec::Explicit { gamma_s, gamma_l, delta }) => {
                MesonParams::new(*gamma_s, *gamma_l, *delta, "custom").map_err(domain)?
            }
        };
        let params = if self.gamma_s.is_some() || self.gamma_l.is_some() || self.delta.is_some() {
            MesonParams::new(
                self.gamma_s.unwrap_or(base.gamma_s()),
                self.gamma_l.unwrap_or(base.gamma_l()),
                self.delta.unwrap_or(base.delta()),
                "custom",
            )
            .map_err(domain)?
        } else {
            base
        };
        let time_unit = match &self.time_unit {
            Some(u) => u.parse()?,
            None => TimeUnit::Dm,
        };
        let grid = Grid::new(
            self.grid.t_min.unwrap_or(0.0),
            self.grid.t_max.unwrap_or(10.0),
            self.grid.steps.unwrap_or(1001),
        )?;
        Ok(RunConfig {
            params,
            time_unit,
            grid,
            output_path: self.output_path.clone(),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Inclusive, evenly spaced time grid in the configured unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(t_min: f64, t_max: f64, steps: usize) -> Result<Self, ParseError> {
        if !(t_min.is_finite() && t_max.is_finite()) || t_min < 0.0 || t_min >= t_max {
            return Err(ParseError::Domain(format!(
                "grid needs 0 <= t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if !(2..=10_000_000).contains(&steps) {
            return Err(ParseError::Domain(format!("grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self { t_min, t_max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.t_max - self.t_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.t_max } else { self.t_min + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: MesonParams,
    pub time_unit: TimeUnit,
    pub grid: Grid,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    /// A time in the configured unit, converted to `Δm` units.
    pub fn to_dm(&self, t: f64) -> Result<f64, ParseError> {
        match self.time_unit {
            TimeUnit::Dm => Ok(t),
            TimeUnit::TauS => self.params.tau_s_to_dm(t).ok_or_else(no_lifetime),
        }
    }

    /// A `Δm`-unit time expressed in the configured unit.
    pub fn from_dm(&self, t: f64) -> Result<f64, ParseError> {
        match self.time_unit {
            TimeUnit::Dm => Ok(t),
            TimeUnit::TauS => self.params.dm_to_tau_s(t).ok_or_else(no_lifetime),
        }
    }
}

fn no_lifetime() -> ParseError {
    ParseError::Domain("tau-s units need gamma_s > 0".into())
}
