//! Run configuration files and the bundled presets.

use std::path::{Path, PathBuf};

use hmts_core::sim::{Mode, ScenarioConfig};
use serde::Deserialize;

pub const PRESETS: &[(&str, &str)] = &[
    ("paper_fig3", include_str!("../presets/paper_fig3.toml")),
    ("paper_fig4_grid", include_str!("../presets/paper_fig4_grid.toml")),
    ("paper_homogeneous", include_str!("../presets/paper_homogeneous.toml")),
    ("paper_heterogeneous", include_str!("../presets/paper_heterogeneous.toml")),
];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Full threshold table replacing the bundled one.
    pub thresholds: Option<PathBuf>,
    pub weather_cdf: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub scenario: Option<ScenarioConfig>,
    pub pair: Option<PairConfig>,
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub snr1: f64,
    pub snr2: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

/// Error raised while reading or validating a configuration.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))
    }

    /// Loads a file, or a bundled preset when `spec` names one (an
    /// extension such as `.toml` or `.cfg` is ignored for presets).
    pub fn load(spec: &str) -> Result<Self, ConfigError> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            return Self::parse(&text, spec);
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
        match PRESETS.iter().find(|(n, _)| *n == name) {
            Some((n, text)) => Self::parse(text, n),
            None => Err(ConfigError(format!(
                "config '{spec}' is neither a file nor a preset ({})",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}
