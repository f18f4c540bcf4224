//! Command-line front end for `randcm-core`: configuration, orchestration and
//! byte-stable exports.

pub mod config;
pub mod export;
pub mod pipeline;

use std::fs;
use std::path::{Path, PathBuf};

use pipeline::{Artifact, RunError};

/// Environment variable overriding `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "RANDCM_OUTPUT_DIR";

pub fn output_dir(cfg: &config::RunConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => cfg.output_dir.clone(),
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<config::RunConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| {
        RunError::Config(config::ConfigError { line: 0, message: format!("cannot read {}: {e}", path.display()) })
    })?;
    config::RunConfig::parse(&text).map_err(RunError::Config)
}
