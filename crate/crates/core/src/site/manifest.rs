//! The build manifest: what was generated from which inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MANIFEST_NAME: &str = ".hypertwin-manifest.json";

/// Bumped whenever generated output changes for unchanged inputs.
pub const VERSION: &str = concat!("hypertwin/", env!("CARGO_PKG_VERSION"), "/1");

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    /// Hash of the output-affecting configuration.
    pub config: String,
    pub files: BTreeMap<String, FileRecord>,
    /// Hashes of generated files not tied to one source: index and assets.
    pub site: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// SHA-256 of the source text.
    pub hash: String,
    /// Hash of everything outside the file that its outputs depend on.
    pub resolution: String,
    /// Paths of the other files declaring names this file references.
    pub deps: BTreeSet<String>,
    /// Output path → SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    /// Reads the manifest in `out`; a missing file yields `None`.
    pub fn load(out: &Path) -> Result<Option<Manifest>> {
        let path = out.join(MANIFEST_NAME);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|source| Error::Manifest { path, source })
    }

    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        json
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
