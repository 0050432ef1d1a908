//! One output directory per run, with a manifest listing every artifact.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub artifacts: &'a [Artifact],
    pub threads: usize,
    pub duration_seconds: f64,
}

pub struct RunDir {
    path: PathBuf,
    subcommand: String,
    artifacts: Vec<Artifact>,
    started: Instant,
}

impl RunDir {
    /// Creates `<out>/<subcommand>-seed<seed>`, clearing a previous run's
    /// files so the directory only holds this run's artifacts.
    pub fn create(config: &ExperimentConfig, subcommand: &str) -> Result<Self> {
        let path = config.out.join(format!("{subcommand}-seed{}", config.seed));
        if path.exists() {
            fs::remove_dir_all(&path).map_err(|e| CliError::io(&path, e))?;
        }
        fs::create_dir_all(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(Self {
            path,
            subcommand: subcommand.to_string(),
            artifacts: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path.join(name);
        fs::write(&target, bytes).map_err(|e| CliError::io(&target, e))?;
        self.artifacts.push(Artifact {
            file: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        log::info!("wrote {}", target.display());
        Ok(())
    }

    /// Writes a CSV table with a header row.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(name, e.into_error()))?;
        self.write(name, &bytes)
    }

    pub fn finish(self, config: &ExperimentConfig) -> Result<PathBuf> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: &self.subcommand,
            seed: config.seed,
            config,
            artifacts: &self.artifacts,
            threads: rayon::current_num_threads(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_vec_pretty(&manifest)?;
        let target = self.path.join(MANIFEST);
        fs::write(&target, json).map_err(|e| CliError::io(&target, e))?;
        Ok(self.path)
    }
}

/// Binary greyscale PGM (P5). Pixel rows are given bottom-up and written
/// top-down, so the image shows the second axis pointing up.
pub fn pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    for row in (0..height).rev() {
        out.extend_from_slice(&pixels[row * width..(row + 1) * width]);
    }
    out
}

/// Shortest round-trip formatting, so output only changes when values do.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
