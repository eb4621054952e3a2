//! Optional `key = value` configuration file.
//!
//! Recognised keys: `eps_geom`, `eps_branch` (absolute length),
//! `direction_floor`, `seed`. Command-line flags override file values.

use std::path::Path;

use orthoglide::ManipulatorParams;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "ORTHOGLIDE_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub eps_geom: Option<f64>,
    pub eps_branch: Option<f64>,
    pub direction_floor: Option<f64>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Values from `over` win where set.
    pub fn merged(&self, over: &Config) -> Config {
        Config {
            eps_geom: over.eps_geom.or(self.eps_geom),
            eps_branch: over.eps_branch.or(self.eps_branch),
            direction_floor: over.direction_floor.or(self.direction_floor),
            seed: over.seed.or(self.seed),
        }
    }

    pub fn params(&self, leg_length: f64) -> Result<ManipulatorParams, CliError> {
        let base = ManipulatorParams::new(leg_length)?;
        let params = ManipulatorParams::with_tolerances(
            leg_length,
            self.eps_geom.unwrap_or(base.eps_geom()),
            self.eps_branch.unwrap_or(base.eps_branch()),
        )?;
        Ok(match self.direction_floor {
            Some(f) => params.with_direction_floor(f)?,
            None => params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lines() {
        let c = Config::parse("eps_geom = 1e-10\neps_branch=2e-9\nseed = 42\n").unwrap();
        assert_eq!(c.eps_geom, Some(1e-10));
        assert_eq!(c.eps_branch, Some(2e-9));
        assert_eq!(c.seed, Some(42));
        assert_eq!(c.direction_floor, None);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Config::parse("eps = 1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Config::parse("eps_geom = 1e-10\nseed = 1").unwrap();
        let flags = Config {
            seed: Some(7),
            ..Default::default()
        };
        let m = file.merged(&flags);
        assert_eq!(m.seed, Some(7));
        assert_eq!(m.eps_geom, Some(1e-10));
    }

    #[test]
    fn defaults_scale_eps_branch_with_l() {
        let p = Config::default().params(200.0).unwrap();
        assert_eq!(p.eps_geom(), 1e-9);
        assert_eq!(p.eps_branch(), 200.0 * 1e-9);
        assert!(Config {
            eps_geom: Some(0.1),
            ..Default::default()
        }
        .params(1.0)
        .is_err());
    }
}
