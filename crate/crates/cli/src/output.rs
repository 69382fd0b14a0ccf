//! Output directories and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const OUT_DIR_ENV: &str = "FRACSUB_OUT_DIR";
const DEFAULT_OUT: &str = "fracsub-out";

/// `explicit` (or the default directory name) resolved against
/// `$FRACSUB_OUT_DIR` when it is relative; created if missing.
pub fn out_dir(explicit: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = explicit.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let dir = match std::env::var_os(OUT_DIR_ENV) {
        Some(root) if dir.is_relative() && !root.is_empty() => PathBuf::from(root).join(dir),
        _ => dir,
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Everything needed to repeat a run: the resolved parameters, their hash
/// and the command line.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub fracsub_version: String,
    pub argv: Vec<String>,
    /// SHA-256 of `parameters` serialized as TOML.
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_file_sha256: Option<String>,
    pub seconds: f64,
    pub outputs: Vec<String>,
    pub parameters: toml::Table,
    pub results: toml::Table,
}

impl Manifest {
    pub fn new(command: &str, parameters: toml::Table) -> Self {
        let canonical = toml::to_string(&parameters).expect("parameters serialize");
        Self {
            command: command.into(),
            fracsub_version: env!("CARGO_PKG_VERSION").into(),
            argv: std::env::args().collect(),
            config_sha256: sha256_hex(canonical.as_bytes()),
            config_file: None,
            config_file_sha256: None,
            seconds: 0.0,
            outputs: Vec::new(),
            parameters,
            results: toml::Table::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = toml::to_string(self).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Serializes any value into a TOML table.
pub fn to_table<T: Serialize>(value: &T) -> toml::Table {
    toml::Table::try_from(value).expect("value serializes to a TOML table")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_hash_follows_parameters() {
        let mut p = toml::Table::new();
        p.insert("nu1".into(), 0.5.into());
        let a = Manifest::new("solve", p.clone());
        p.insert("nu1".into(), 0.6.into());
        let b = Manifest::new("solve", p);
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a.config_sha256, Manifest::new("table", a.parameters.clone()).config_sha256);
    }
}
