//! Content-addressed cache of report bodies.
//!
//! Keys are SHA-256 digests of the canonical ring and module data, the
//! operation and the caps. Entries are written to a temporary file in the
//! cache directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

pub fn key(material: &Value) -> String {
    let bytes = serde_json::to_vec(&serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "material": material,
    }))
    .expect("key material serializes");
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
        }
        Ok(Self { dir })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn get(&self, key: &str) -> Option<Map<String, Value>> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, body: &Map<String, Value>) -> Result<(), CliError> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else {
            return Ok(());
        };
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        serde_json::to_writer(&mut tmp, body).map_err(|e| CliError::Io(e.to_string()))?;
        tmp.flush().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }

    pub fn get_or_compute(
        &self,
        material: &Value,
        compute: impl FnOnce() -> Result<Map<String, Value>, CliError>,
    ) -> Result<Map<String, Value>, CliError> {
        if self.dir.is_none() {
            return compute();
        }
        let k = key(material);
        if let Some(hit) = self.get(&k) {
            return Ok(hit);
        }
        let body = compute()?;
        self.put(&k, &body)?;
        Ok(body)
    }
}
