//! Configuration file handling. Files may be TOML or JSON; the format is
//! chosen by extension, falling back to trying both.

use serde::Deserialize;

use crate::CmdError;

pub const DEFAULT_PRECISION_BITS: u32 = iqcf_core::numerics::DEFAULT_PRECISION_BITS;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_CACHE_PATH: &str = "iqcf_cache.json";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    precision_bits: Option<u32>,
    tolerance: Option<f64>,
    cache_path: Option<String>,
    format: Option<String>,
}

/// Resolved configuration: defaults overridden by an optional file, with the
/// cache path further overridable by `IQCF_CACHE`.
#[derive(Clone, Debug)]
pub struct Config {
    /// Working precision for float-mode expansions, >= 64.
    pub precision_bits: u32,
    /// Comparison tolerance for reference-table matching, in (0, 1e-6].
    pub tolerance: f64,
    /// Parameter cache location.
    pub cache_path: String,
    /// "full" prints round-trip floats; "pretty" rounds for humans.
    pub pretty: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            precision_bits: DEFAULT_PRECISION_BITS,
            tolerance: DEFAULT_TOLERANCE,
            cache_path: DEFAULT_CACHE_PATH.to_string(),
            pretty: false,
        }
    }
}

impl Config {
    pub fn load(path: Option<&str>) -> Result<Config, CmdError> {
        let mut cfg = Config::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CmdError::Input(format!("cannot read config {}: {}", path, e)))?;
            let raw = parse_raw(path, &text)?;
            if let Some(v) = raw.precision_bits {
                cfg.precision_bits = v;
            }
            if let Some(v) = raw.tolerance {
                cfg.tolerance = v;
            }
            if let Some(v) = raw.cache_path {
                cfg.cache_path = v;
            }
            if let Some(v) = raw.format {
                cfg.pretty = match v.as_str() {
                    "pretty" => true,
                    "full" => false,
                    other => {
                        return Err(CmdError::Input(format!(
                            "config format must be \"full\" or \"pretty\", got {:?}",
                            other
                        )))
                    }
                };
            }
        }
        if let Ok(v) = std::env::var("IQCF_CACHE") {
            if !v.is_empty() {
                cfg.cache_path = v;
            }
        }
        if cfg.precision_bits < 64 {
            return Err(CmdError::Input(format!(
                "precision_bits must be at least 64, got {}",
                cfg.precision_bits
            )));
        }
        if !(cfg.tolerance > 0.0 && cfg.tolerance <= 1e-6) {
            return Err(CmdError::Input(format!(
                "tolerance must lie in (0, 1e-6], got {}",
                cfg.tolerance
            )));
        }
        Ok(cfg)
    }
}

fn parse_raw(path: &str, text: &str) -> Result<RawConfig, CmdError> {
    let lower = path.to_ascii_lowercase();
    if lower.ends_with(".json") {
        return serde_json::from_str(text)
            .map_err(|e| CmdError::Input(format!("invalid JSON config: {}", e)));
    }
    if lower.ends_with(".toml") {
        return toml::from_str(text)
            .map_err(|e| CmdError::Input(format!("invalid TOML config: {}", e)));
    }
    serde_json::from_str(text)
        .or_else(|_| toml::from_str(text))
        .map_err(|e| CmdError::Input(format!("config is neither valid JSON nor TOML: {}", e)))
}
