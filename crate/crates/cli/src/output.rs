//! Atomic file output and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::Settings;
use crate::CliError;

/// Writes `bytes` to `path` through a temporary file and a rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Runtime(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Serializes rows of string cells as CSV.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Fixed-precision float formatting used for every CSV cell.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.10}")
}

#[derive(Serialize)]
struct Manifest<'a, E: Serialize> {
    subcommand: &'a str,
    config: &'a Settings,
    master_seed: Option<u64>,
    code_version: &'a str,
    /// Paths relative to the output directory.
    outputs: &'a [String],
    wall_clock_seconds: f64,
    details: E,
}

/// Collects outputs of one run and writes `manifest-<subcommand>.json` last.
pub struct Run<'a> {
    pub subcommand: &'a str,
    pub out_dir: PathBuf,
    pub settings: &'a Settings,
    started: Instant,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    pub fn new(subcommand: &'a str, out_dir: PathBuf, settings: &'a Settings) -> Self {
        Self {
            subcommand,
            out_dir,
            settings,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.out_dir.join(name), bytes)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        write_json(&self.out_dir.join(name), value)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn finish(self, details: impl Serialize) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(format!("manifest-{}.json", self.subcommand));
        write_json(
            &path,
            &Manifest {
                subcommand: self.subcommand,
                config: self.settings,
                master_seed: self.settings.seed,
                code_version: env!("CARGO_PKG_VERSION"),
                outputs: &self.outputs,
                wall_clock_seconds: self.started.elapsed().as_secs_f64(),
                details,
            },
        )?;
        Ok(path)
    }
}
