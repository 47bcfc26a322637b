//! The main JSON configuration file. Every section is optional and falls back
//! to its defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::ControllerConfig;
use crate::error::{Error, Result};
use crate::power::PowerConfig;
use crate::segment::FilterConfig;
use crate::sim::CameraSpec;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub filter: FilterConfig,
    pub controller: ControllerConfig,
    pub power: PowerConfig,
    /// Overrides the scenario's camera when present.
    pub camera: Option<CameraSpec>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        self.controller.validate()?;
        self.power.validate()?;
        if let Some(c) = &self.camera {
            c.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::Windowing;

    #[test]
    fn empty_object_is_all_defaults() {
        assert_eq!(Config::from_json("{}").unwrap(), Config::default());
    }

    #[test]
    fn sections_override_selectively() {
        let cfg = Config::from_json(
            r#"{"filter": {"windowing": "sliding"}, "controller": {"cooldown": 5.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.filter.windowing, Windowing::Sliding);
        assert_eq!(cfg.filter.bear_threshold, 0.7);
        assert_eq!(cfg.controller.cooldown, 5.0);
        assert_eq!(cfg.controller.spray_duration, 1.0);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err =
            Config::from_json("{\n\"filter\": {\n  \"segment_length\": \"ten\"\n}}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(Config::from_json(r#"{"filtr": {}}"#).is_err());
    }
}
