//! Data files: trajectory CSV, JSON documents and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};
use sqzent_core::esd::ConcurrenceTrajectory;
use sqzent_core::model::SimulationConfig;

use crate::error::CliError;

pub const TRAJECTORY_HEADER: [&str; 14] = [
    "t", "C", "C1tilde", "C2tilde", "rho11", "rho22", "rho33", "rho44", "re_rho14", "im_rho14", "re_rho23",
    "im_rho23", "trace", "min_eig",
];

/// Twelve significant digits in scientific notation; negative zero is
/// printed as zero.
pub fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn trajectory_csv(traj: &ConcurrenceTrajectory) -> String {
    let mut out = TRAJECTORY_HEADER.join(",");
    out.push('\n');
    for s in &traj.samples {
        let fields = [
            s.t,
            s.c,
            s.c1,
            s.c2,
            s.populations[0],
            s.populations[1],
            s.populations[2],
            s.populations[3],
            s.rho14.re,
            s.rho14.im,
            s.rho23.re,
            s.rho23.im,
            s.trace,
            s.min_eig,
        ];
        let line: Vec<String> = fields.iter().map(|&x| fmt12(x)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: SimulationConfig,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes files into one directory and remembers their hashes.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(OutputEntry { path: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(
        self,
        command: &str,
        config: &SimulationConfig,
        elapsed: Duration,
        notes: Vec<String>,
    ) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: *config,
            wall_clock_seconds: elapsed.as_secs_f64(),
            outputs: self.written,
            notes,
        };
        let path = self.root.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
