// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Run manifests and the output directory they describe.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config_paths: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub timestamp_unix_s: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config_paths: BTreeMap::new(),
            seeds: Vec::new(),
            tolerances: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            outputs: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, path: &Path) -> &mut Self {
        self.config_paths
            .insert(key.to_string(), path.display().to_string());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }
}

/// Output directory. Every file written through it is recorded in the
/// manifest, and text files carry a first line pointing back to it.
pub struct OutDir {
    root: PathBuf,
    pub manifest: RunManifest,
}

impl OutDir {
    pub fn create(root: &Path, manifest: RunManifest) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|source| CliError::Write {
            path: root.display().to_string(),
            source,
        })?;
        Ok(OutDir {
            root: root.to_path_buf(),
            manifest,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn write_raw(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.to_string());
        }
        Ok(())
    }

    /// Writes `body` under a `# manifest: manifest.json` line.
    pub fn write_text(&mut self, name: &str, body: &str) -> CliResult<()> {
        self.write_raw(name, &format!("# manifest: {MANIFEST_NAME}\n{body}"))
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> CliResult<()> {
        let mut v = serde_json::to_value(value).map_err(|e| CliError::usage(e.to_string()))?;
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("manifest".into(), MANIFEST_NAME.into());
        }
        let text = serde_json::to_string_pretty(&v).map_err(|e| CliError::usage(e.to_string()))?;
        self.write_raw(name, &(text + "\n"))
    }

    pub fn finish(self) -> CliResult<()> {
        let text = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let path = self.path(MANIFEST_NAME);
        fs::write(&path, text + "\n").map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
        Ok(())
    }
}

/// CSV with a header row; values use the shortest round-trip formatting.
pub fn csv<R: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: R) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
