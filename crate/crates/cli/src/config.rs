use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub const OUTPUT_DIR_ENV: &str = "PBLAB_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "pblab-reports";

/// Named tolerances and their defaults; overrides may only make them smaller.
pub const TOLERANCES: [(&str, f64); 6] = [
    ("equiv_plateau", 0.05),
    ("normality_plateau", 0.05),
    ("normality_failure_fraction", 0.01),
    ("cluster_diameter", 1e-3),
    ("cluster_convergence", 1e-3),
    ("stolz_round_trip", 1e-9),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub max_level: u32,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
}

/// Values gathered from flags; `None` falls back to the config file, then defaults.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_level: Option<u32>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerances: Vec<(String, f64)>,
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Self> {
        let mut from_file = Overrides::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            from_file = parse_file(&text)?;
        }
        let output_dir = flags
            .output_dir
            .or(from_file.output_dir)
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let mut tolerances: BTreeMap<String, f64> = TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (name, value) in from_file.tolerances.into_iter().chain(flags.tolerances) {
            let Some(default) = TOLERANCES.iter().find(|t| t.0 == name).map(|t| t.1) else {
                bail!("unknown tolerance {name:?}");
            };
            if !(value > 0.0 && value <= default) {
                bail!("tolerance {name} = {value} must lie in (0, {default}]; overrides may only tighten");
            }
            tolerances.insert(name, value);
        }
        let max_level = flags.max_level.or(from_file.max_level).unwrap_or(12);
        if max_level == 0 || max_level > boundary_lab::curves::MAX_LEVEL {
            bail!("max-level must lie in 1..={}", boundary_lab::curves::MAX_LEVEL);
        }
        Ok(Self {
            seed: flags.seed.or(from_file.seed).unwrap_or(0),
            max_level,
            output_dir,
            format: flags.format.or(from_file.format).unwrap_or(Format::Json),
            tolerances,
        })
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }
}

pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').context("expected name=value")?;
    let v: f64 = v.trim().parse().with_context(|| format!("bad tolerance value {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

/// Flat `key=value` lines; `#` starts a comment. Tolerances use `tol.<name>`.
fn parse_file(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected key=value", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "seed" => o.seed = Some(value.parse().context("seed")?),
            "max_level" => o.max_level = Some(value.parse().context("max_level")?),
            "output_dir" => o.output_dir = Some(PathBuf::from(value)),
            "format" => {
                o.format = Some(match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => bail!("config line {}: format must be json or csv", n + 1),
                })
            }
            _ => match key.strip_prefix("tol.") {
                Some(name) => o.tolerances.push((name.to_string(), value.parse().context("tolerance")?)),
                None => bail!("config line {}: unknown key {key:?}", n + 1),
            },
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_tolerances_only_tighten() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed = 9\nmax_level=10 # comment\ntol.cluster_diameter=1e-4\n").unwrap();
        let cfg = RunConfig::resolve(
            Some(&path),
            Overrides {
                seed: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((cfg.seed, cfg.max_level), (3, 10));
        assert_eq!(cfg.tol("cluster_diameter"), 1e-4);
        assert_eq!(cfg.tol("equiv_plateau"), 0.05);

        let loose = Overrides {
            tolerances: vec![("cluster_diameter".into(), 0.5)],
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, loose).is_err());
        let unknown = Overrides {
            tolerances: vec![("nope".into(), 0.5)],
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, unknown).is_err());
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(parse_file("seed 3").is_err());
        assert!(parse_file("colour=blue").is_err());
        assert!(parse_file("format=xml").is_err());
    }
}
