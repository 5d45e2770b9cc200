use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pblab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pblab"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("PBLAB_OUTPUT_DIR")
        .output()
        .expect("pblab runs")
}

fn reports(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries.map(|e| e.unwrap().path()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

fn only_report(dir: &Path) -> Value {
    let files = reports(dir);
    assert_eq!(files.len(), 1, "{files:?}");
    serde_json::from_slice(&fs::read(&files[0]).unwrap()).unwrap()
}

#[test]
fn metric_prints_the_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = pblab(dir.path(), &["metric", "--kind", "ph", "--z", "0.5,0", "--w", "-0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0.8");
    let report = only_report(dir.path());
    let name = reports(dir.path())[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with("metric-") && name.ends_with(".json"), "{name}");
    assert_eq!(report["subcommand"], "metric");
    assert_eq!(report["seed"], 0);
    assert_eq!(report["result"]["value"], 0.8);
}

#[test]
fn radius_and_horocycle_are_not_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let out = pblab(
        dir.path(),
        &["equiv", "--curve1", "radius:0", "--curve2", "horocycle:0", "--max-level", "12"],
    );
    assert_eq!(out.status.code(), Some(4));
    let report = only_report(dir.path());
    assert_eq!(report["result"]["verdict"], "not_equivalent");
    assert_eq!(report["status"], "not_satisfied");
    assert_eq!(report["result"]["levels"].as_array().unwrap().len(), 12);
}

#[test]
fn chords_are_equivalent_to_the_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = pblab(dir.path(), &["equiv", "--curve1", "radius:0", "--curve2", "chord:0:0.5236"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invalid_arguments_exit_2_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["bogus"][..],
        &["metric", "--z", "0.5,0", "--w", "2,0"],
        &["metric", "--z", "0.5,zero", "--w", "0,0"],
        &["equiv", "--curve1", "radius:0", "--curve2", "spiral:0"],
        &["equiv", "--curve1", "radius:0", "--curve2", "radius:1"],
        &["normality", "--function", "sin"],
        &["stolz-map", "--alpha", "2", "--z", "0.5,0"],
    ] {
        let out = pblab(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    assert!(reports(dir.path()).is_empty());
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = pblab(dir.path(), &["bogus"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn tolerances_may_only_tighten() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["equiv", "--curve1", "radius:0", "--curve2", "radius:0"];
    let loose = pblab(dir.path(), &[&base[..], &["--tol", "equiv_plateau=0.5"]].concat());
    assert_eq!(loose.status.code(), Some(2));
    let unknown = pblab(dir.path(), &[&base[..], &["--tol", "nonsense=1e-3"]].concat());
    assert_eq!(unknown.status.code(), Some(2));
    let tight = pblab(dir.path(), &[&base[..], &["--tol", "equiv_plateau=0.01"]].concat());
    assert_eq!(tight.status.code(), Some(0));
    let report = only_report(dir.path());
    assert_eq!(report["tolerances"]["equiv_plateau"], 0.01);
    assert_eq!(report["result"]["thresholds"]["plateau_ratio"], 1.01);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out_dir = dir.path().join("reports");
    fs::write(&conf, "seed = 11\nmax_level = 6\nformat = csv\n").unwrap();
    let out = pblab(
        &out_dir,
        &["equiv", "--curve1", "radius:0", "--curve2", "chord:0:0.3", "--config", conf.to_str().unwrap(), "--seed", "5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let files = reports(&out_dir);
    assert_eq!(files.len(), 1);
    let text = fs::read_to_string(&files[0]).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "level,value,forward,backward,curve1,curve2,subcommand,seed");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",equiv,5")));
    assert!(rows[0].starts_with("1,"));
}

#[test]
fn environment_names_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pblab"))
        .args(["metric", "--kind", "h", "--z", "0,0", "--w", "0,0"])
        .env("PBLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(only_report(dir.path())["result"]["value"], 0.0);
}

#[test]
fn repeated_runs_give_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["lemma6", "--alpha", "0.8", "--beta", "0.4", "--samples", "300", "--seed", "3"];
    assert_eq!(pblab(a.path(), &args).status.code(), Some(0));
    assert_eq!(pblab(b.path(), &args).status.code(), Some(0));
    let read = |d: &Path| fs::read(&reports(d)[0]).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(only_report(a.path())["seed"], 3);
}

#[test]
fn curves_round_trip_through_the_exchange_format() {
    let dir = tempfile::tempdir().unwrap();
    let exported = dir.path().join("chord.json");
    let reports_dir = dir.path().join("r");
    let out = pblab(
        &reports_dir,
        &["curve-dist", "--curve1", "chord:0:0.4", "--curve2", "radius:0", "--level", "8", "--export", exported.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let file = format!("file:{}", exported.display());
    let out = pblab(&reports_dir, &["frechet", "--curve1", "chord:0:0.4", "--curve2", &file, "--level", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value: f64 = stdout.trim().strip_prefix("frechet = ").unwrap().parse().unwrap();
    assert!(value < 1e-6, "{value}");
}

#[test]
fn check_style_subcommands_report_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32); 6] = [
        (&["normality", "--function", "identity", "--r", "0.5", "--max-level", "8"], 0),
        (&["normality", "--function", "square_exp", "--r", "0.5", "--max-level", "10"], 4),
        (&["decay", "--function", "saginjan_h", "--profile", "log-e"], 4),
        (&["decay", "--function", "square_exp", "--profile", "pure:2"], 0),
        (&["family", "--function", "saginjan_h", "--r1", "0.2"], 0),
        (&["family", "--function", "square_exp", "--r1", "0.5"], 4),
    ];
    for (args, code) in cases {
        let out = pblab(dir.path(), args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn csv_rows_carry_their_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = pblab(
        dir.path(),
        &["--format", "csv", "cluster", "--function", "saginjan_h", "--r", "0.2", "--shells", "6"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&reports(dir.path())[0]).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for (k, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("{},", k + 1)), "{row}");
    }
}
