use serde::{Deserialize, Serialize};

use super::Error;
use crate::domain::Connectivity;
use crate::planners::Limits;
use crate::reward::SynthParams;
use crate::risk::{RiskError, RiskModel};

/// Planner configuration, stored as JSON. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub connectivity: Connectivity,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub risk: RiskModel,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub synth: SynthParams,
    /// Tie-breaking is always deterministic; `false` is rejected.
    #[serde(default = "always")]
    pub deterministic: bool,
}

fn default_gamma() -> f64 {
    1.0
}

fn always() -> bool {
    true
}

impl Default for Config {
    fn default() -> Self {
        Self {
            connectivity: Connectivity::default(),
            gamma: default_gamma(),
            risk: RiskModel::default(),
            limits: Limits::default(),
            synth: SynthParams::default(),
            deterministic: true,
        }
    }
}

impl Config {
    pub fn from_json(text: &str, file: &str) -> Result<Self, Error> {
        let cfg: Config = serde_json::from_str(text).map_err(|source| Error::Json {
            file: file.to_owned(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invariant("gamma", "must lie in [0, 1]"));
        }
        if !self.deterministic {
            return Err(Error::invariant(
                "deterministic",
                "non-deterministic tie-breaking is not supported",
            ));
        }
        if !(self.synth.standoff.is_finite() && self.synth.standoff >= 0.0) {
            return Err(Error::invariant(
                "synth.standoff",
                "must be a non-negative number",
            ));
        }
        if let Some(f) = self.synth.falloff {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::invariant("synth.falloff", "must be positive"));
            }
        }
        self.risk.validate().map_err(|e| match e {
            RiskError::InvalidParameter { key, reason } => {
                Error::invariant(format!("risk.{key}"), reason)
            }
            other => Error::invariant("risk", other),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(Config::from_json("{}", "c").unwrap(), Config::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Config::from_json(r#"{"gama": 0.5}"#, "c").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("unknown field"));
        let nested = r#"{"risk": {"state_elements": [{"kind": "visibility", "weight": 1, "radius": 2, "extra": 1}],
            "path_elements": [], "w_states": 1, "w_path": 1, "risk_floor": 1e-6}}"#;
        assert!(Config::from_json(nested, "c").is_err());
    }

    #[test]
    fn invariant_errors_name_key() {
        let err = Config::from_json(r#"{"gamma": 1.5}"#, "c").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let mut cfg = Config::default();
        cfg.risk.w_states = -1.0;
        let err = Config::from_json(&cfg.to_json(), "c").unwrap_err();
        assert!(err.to_string().contains("risk.w_states"), "{err}");
        let err = Config::from_json(r#"{"deterministic": false}"#, "c").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn round_trip() {
        let mut cfg = Config {
            gamma: 0.7,
            connectivity: Connectivity::Full,
            ..Config::default()
        };
        cfg.limits.max_time = None;
        cfg.synth.falloff = Some(3.5);
        assert_eq!(Config::from_json(&cfg.to_json(), "c").unwrap(), cfg);
    }
}
