//! Tool configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shieldnn_core::sim::{SimConfig, SpawnRegion};
use shieldnn_core::synthesis::SynthesisConfig;
use shieldnn_core::{BarrierParams, LieContext, VehicleParams, VerifyConfig};

use crate::error::{CliError, Result};

pub const CONFIG_SCHEMA: &str = "shieldnn/config/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolConfig {
    #[serde(default = "config_schema")]
    pub schema: String,
    pub vehicle: VehicleParams,
    pub barrier: BarrierParams,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub synthesis: SynthesisConfig,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub spawn: SpawnRegion,
}

fn config_schema() -> String {
    CONFIG_SCHEMA.to_owned()
}

impl ToolConfig {
    /// Vehicle `l_f = l_r = 2`, `δ_f,max = π/4`, `v_max = 20`; barrier
    /// `r̄ = 4`, `σ = 0.48`.
    pub fn reference() -> Self {
        Self::from_context(&LieContext::reference())
    }

    pub fn from_context(ctx: &LieContext) -> Self {
        Self {
            schema: config_schema(),
            vehicle: ctx.vehicle,
            barrier: ctx.barrier,
            verify: VerifyConfig::default(),
            synthesis: SynthesisConfig::default(),
            sim: SimConfig::default(),
            spawn: SpawnRegion::default(),
        }
    }

    pub fn context(&self) -> LieContext {
        LieContext::new(self.vehicle, self.barrier)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|source| CliError::Json {
            path: path.to_owned(),
            source,
        })?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(CliError::Schema {
                path: path.to_owned(),
                expected: CONFIG_SCHEMA,
                found: cfg.schema,
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = ToolConfig::reference();
        let p = Path::new("mem");
        let back = ToolConfig::parse(&cfg.to_json(), p).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json(), cfg.to_json());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = r#"{
            "vehicle": {"l_f": 2.0, "l_r": 2.0, "delta_f_max": 0.7853981633974483, "v_max": 20.0},
            "barrier": {"r_bar": 4.0, "sigma": 0.48}
        }"#;
        let cfg = ToolConfig::parse(text, Path::new("mem")).unwrap();
        assert_eq!(cfg, ToolConfig::reference());
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&ToolConfig::reference().to_json()).unwrap();
        v["vehicle"]["mass"] = 1200.0.into();
        assert!(ToolConfig::parse(&v.to_string(), Path::new("mem")).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&ToolConfig::reference().to_json()).unwrap();
        v["extra"] = 1.into();
        assert!(ToolConfig::parse(&v.to_string(), Path::new("mem")).is_err());
    }

    #[test]
    fn invalid_sigma_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&ToolConfig::reference().to_json()).unwrap();
        v["barrier"]["sigma"] = 1.5.into();
        assert!(ToolConfig::parse(&v.to_string(), Path::new("mem")).is_err());
    }
}
