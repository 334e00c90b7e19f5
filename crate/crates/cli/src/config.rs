//! Run configuration: command-line flags merged over an optional TOML
//! config file, with the resolved values echoed into every report.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::{BackendArg, CliError};

/// Keys accepted in the optional config file. Every one of them can be
/// overridden on the command line.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub backend: Option<String>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
}

/// Where the resolved seed came from, recorded for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Flag,
    ConfigFile,
    Environment,
    Default,
}

impl SeedSource {
    fn name(self) -> &'static str {
        match self {
            SeedSource::Flag => "flag",
            SeedSource::ConfigFile => "config-file",
            SeedSource::Environment => "environment",
            SeedSource::Default => "default",
        }
    }
}

/// Fully resolved run settings shared by every subcommand.
#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub seed_source: SeedSource,
    pub jobs: usize,
    pub backend_default: BackendArg,
    pub config_path: Option<String>,
}

impl RunConfig {
    /// Precedence: flag, then config file, then `TREESURGEON_SEED`, then a
    /// fixed default. Jobs default to the available parallelism.
    pub fn resolve(
        seed_flag: Option<u64>,
        jobs_flag: Option<usize>,
        config_path: Option<&Path>,
    ) -> Result<Self, CliError> {
        let file = match config_path {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        let (seed, seed_source) = if let Some(s) = seed_flag {
            (s, SeedSource::Flag)
        } else if let Some(s) = file.seed {
            (s, SeedSource::ConfigFile)
        } else if let Some(s) = seed_from_env()? {
            (s, SeedSource::Environment)
        } else {
            (0, SeedSource::Default)
        };
        let jobs = jobs_flag
            .or(file.jobs)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
            .max(1);
        let backend_default = match file.backend.as_deref() {
            None => BackendArg::Auto,
            Some("auto") => BackendArg::Auto,
            Some("enum") => BackendArg::Enum,
            Some("det") => BackendArg::Det,
            Some("both") => BackendArg::Both,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config backend must be auto|enum|det|both, got {other:?}"
                )))
            }
        };
        Ok(RunConfig {
            seed,
            seed_source,
            jobs,
            backend_default,
            config_path: config_path.map(|p| p.display().to_string()),
        })
    }

    /// Per-command backend: explicit flag wins over the config default.
    pub fn backend(&self, flag: Option<BackendArg>) -> BackendArg {
        flag.unwrap_or(self.backend_default)
    }

    /// JSON block embedded in each report envelope.
    pub fn as_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "seed_source": self.seed_source.name(),
            "jobs": self.jobs,
            "backend_default": self.backend_default.name(),
            "config_file": self.config_path,
        })
    }
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var("TREESURGEON_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::usage(format!("TREESURGEON_SEED is not a valid seed: {raw:?}"))),
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file() {
        let dir = std::env::temp_dir().join("treesurgeon-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.toml");
        std::fs::write(&path, "seed = 7\njobs = 3\n").unwrap();
        let cfg = RunConfig::resolve(Some(11), None, Some(&path)).unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.seed_source, SeedSource::Flag);
        assert_eq!(cfg.jobs, 3);
        let cfg = RunConfig::resolve(None, Some(2), Some(&path)).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.seed_source, SeedSource::ConfigFile);
        assert_eq!(cfg.jobs, 2);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = std::env::temp_dir().join("treesurgeon-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.toml");
        std::fs::write(&path, "sede = 7\n").unwrap();
        assert!(RunConfig::resolve(None, None, Some(&path)).is_err());
    }
}
