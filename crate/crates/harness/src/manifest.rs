//! Replay manifest written next to every run's outputs.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Object id of `data` as a git blob in a SHA-256 repository.
pub fn blob_hash(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", data.len()).as_bytes());
    h.update(data);
    hex::encode(h.finalize())
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: PathBuf,
    pub blob: String,
    pub bytes: u64,
}

impl FileHash {
    pub fn of(path: &Path) -> Result<Self, HarnessError> {
        let data = std::fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => HarnessError::MissingFile(path.to_path_buf()),
            _ => HarnessError::Io(e),
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            blob: blob_hash(&data),
            bytes: data.len() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub kind: String,
    /// SHA-256 of the resolved configuration as JSON.
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

impl Manifest {
    pub fn new<C: Serialize>(kind: &str, config: &C, seeds: &[u64]) -> Result<Self, HarnessError> {
        let value = serde_json::to_value(config)?;
        Ok(Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            kind: kind.to_string(),
            config_sha256: sha256_hex(serde_json::to_string(&value)?.as_bytes()),
            config: value,
            seeds: seeds.to_vec(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), HarnessError> {
        self.inputs.push(FileHash::of(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) -> Result<(), HarnessError> {
        self.outputs.push(FileHash::of(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_blob_matches_git() {
        // `git hash-object --object-format=sha256 /dev/null`
        assert_eq!(
            blob_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = Manifest::new("navigate", &serde_json::json!({"x": 1}), &[0]).unwrap();
        let b = Manifest::new("navigate", &serde_json::json!({"x": 2}), &[0]).unwrap();
        let c = Manifest::new("navigate", &serde_json::json!({"x": 1}), &[0]).unwrap();
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a.config_sha256, c.config_sha256);
    }

    #[test]
    fn missing_input_reported() {
        let mut m = Manifest::new("train", &(), &[0]).unwrap();
        assert!(matches!(
            m.add_input(Path::new("/nonexistent/dataset.csv")),
            Err(HarnessError::MissingFile(_))
        ));
    }
}
