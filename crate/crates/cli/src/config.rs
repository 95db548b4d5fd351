use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// Settings for a run. Missing file keys keep their defaults; command-line
/// flags are applied on top of the file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub window_radius: u32,
    /// Overrides the default polynomial degree bound.
    pub degree_bound: Option<usize>,
    pub max_pairs: usize,
    pub max_degree: u32,
    pub samples: usize,
    pub seed: u64,
    pub trials: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window_radius: 4,
            degree_bound: None,
            max_pairs: 10_000,
            max_degree: 40,
            samples: 200_000,
            seed: 0xD1FF,
            trials: 1_000,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        RunConfig::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            ("window_radius", self.window_radius as u64),
            ("degree_bound", self.degree_bound.unwrap_or(1) as u64),
            ("max_pairs", self.max_pairs as u64),
            ("max_degree", self.max_degree as u64),
            ("samples", self.samples as u64),
            ("trials", self.trials as u64),
        ];
        match checks.iter().find(|(_, v)| *v == 0) {
            Some((k, _)) => Err(format!("{k} must be positive")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_override_defaults() {
        let cfg = RunConfig::from_toml("window_radius = 2\nformat = \"json\"\n").unwrap();
        assert_eq!(cfg.window_radius, 2);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.max_pairs, 10_000);
    }

    #[test]
    fn rejects_zero_and_unknown_keys() {
        assert!(RunConfig::from_toml("samples = 0").is_err());
        assert!(RunConfig::from_toml("radius = 3").is_err());
    }
}
