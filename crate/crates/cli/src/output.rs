//! Report envelope and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use boundary_lab::report::Table;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    EvaluationFailure,
    NotSatisfied,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::EvaluationFailure => 3,
            Status::NotSatisfied => 4,
        }
    }
}

/// What a subcommand hands back: its result, a flat table and a one-line summary.
pub struct Outcome {
    pub result: Value,
    pub table: Table,
    pub summary: String,
    pub status: Status,
}

/// The JSON document written for every invocation. It holds nothing that
/// varies between runs with the same arguments and seed.
#[derive(Serialize)]
pub struct Envelope<'a> {
    pub schema_version: u32,
    pub subcommand: &'a str,
    pub seed: u64,
    pub max_level: u32,
    pub tolerances: &'a std::collections::BTreeMap<String, f64>,
    pub arguments: Value,
    pub status: Status,
    pub exit_code: u8,
    pub result: &'a Value,
}

pub fn render_json(envelope: &Envelope) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(envelope)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// The table with `seed` and `subcommand` appended as metadata columns.
pub fn render_csv(table: &Table, subcommand: &str, seed: u64) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.header.iter().map(String::as_str).chain(["subcommand", "seed"]))?;
    let seed = seed.to_string();
    for row in &table.rows {
        w.write_record(row.iter().map(String::as_str).chain([subcommand, seed.as_str()]))?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `<dir>/<subcommand>-<timestamp>.<ext>` through a temporary file,
/// adding `-1`, `-2`, ... when the name is taken.
pub fn write_report(cfg: &RunConfig, subcommand: &str, bytes: &[u8]) -> Result<PathBuf> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let ext = match cfg.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
    let tmp = dir.join(format!(".{subcommand}-{stamp}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    let result = place(&tmp, dir, &format!("{subcommand}-{stamp}"), ext);
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn place(tmp: &Path, dir: &Path, stem: &str, ext: &str) -> Result<PathBuf> {
    for n in 0..1000 {
        let name = if n == 0 { format!("{stem}.{ext}") } else { format!("{stem}-{n}.{ext}") };
        let target = dir.join(name);
        // a hard link never replaces an existing file
        match fs::hard_link(tmp, &target) {
            Ok(()) => {
                fs::remove_file(tmp)?;
                return Ok(target);
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(_) if !target.exists() => {
                fs::rename(tmp, &target)?;
                return Ok(target);
            }
            Err(_) => continue,
        }
    }
    anyhow::bail!("no free report name for {stem} in {}", dir.display())
}
