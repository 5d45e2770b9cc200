//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Criteria 1-8 call the library suites in-process under a runtime limit;
//! criterion 9 runs `pblab selftest` twice and compares the JSON bytes.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use boundary_lab::selftest::{self, CriterionResult};
use boundary_lab::Result;

const SEED: u64 = 20_240_601;

struct Line {
    id: u32,
    name: String,
    pass: bool,
    detail: String,
}

fn timed(id: u32, limit_s: u64, run: impl FnOnce() -> Result<CriterionResult>) -> Line {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(limit_s);
    match outcome {
        Ok(c) => {
            let failed: Vec<&String> = c
                .metrics
                .iter()
                .filter(|(_, v)| v.get("pass") == Some(&serde_json::Value::Bool(false)))
                .map(|(k, _)| k)
                .collect();
            let mut detail = format!("{:.2}s of {limit_s}s", elapsed.as_secs_f64());
            if !failed.is_empty() {
                detail.push_str(&format!("; failing checks: {failed:?}"));
            }
            if !in_time {
                detail.push_str("; over the runtime limit");
            }
            Line {
                id,
                name: c.name,
                pass: c.pass && in_time,
                detail,
            }
        }
        Err(e) => Line {
            id,
            name: format!("criterion {id}"),
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn run_selftest(bin: &str, dir: &Path) -> std::result::Result<Vec<u8>, String> {
    let out = Command::new(bin)
        .args(["selftest", "--seed", &SEED.to_string(), "--format", "json", "--output-dir"])
        .arg(dir)
        .env_remove("PBLAB_OUTPUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let reports: Vec<_> = fs::read_dir(dir).map_err(|e| e.to_string())?.collect::<std::result::Result<_, _>>().map_err(|e| e.to_string())?;
    match reports.as_slice() {
        [one] => fs::read(one.path()).map_err(|e| e.to_string()),
        other => Err(format!("expected one report, found {}", other.len())),
    }
}

fn determinism(suite_start: Instant) -> Line {
    let bin = env!("CARGO_BIN_EXE_pblab");
    let start = Instant::now();
    let dirs = (tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir"));
    let runs = (run_selftest(bin, dirs.0.path()), run_selftest(bin, dirs.1.path()));
    let total = suite_start.elapsed();
    let (pass, mut detail) = match runs {
        (Ok(a), Ok(b)) if a == b => (true, format!("{} identical bytes", a.len())),
        (Ok(a), Ok(b)) => (false, format!("reports differ ({} vs {} bytes)", a.len(), b.len())),
        (Err(e), _) | (_, Err(e)) => (false, e),
    };
    let in_time = total <= Duration::from_secs(600);
    detail.push_str(&format!(
        "; two runs {:.2}s, whole suite {:.2}s of 600s",
        start.elapsed().as_secs_f64(),
        total.as_secs_f64()
    ));
    Line {
        id: 9,
        name: "CLI determinism".into(),
        pass: pass && in_time,
        detail,
    }
}

fn main() {
    let suite_start = Instant::now();
    let mut lines = vec![
        timed(1, 5, || Ok(selftest::metric_suite(SEED))),
        timed(2, 30, || Ok(selftest::disk_image_suite(SEED))),
        timed(3, 60, || selftest::equivalence_suite(SEED)),
        timed(4, 60, || selftest::lemma4_suite(SEED)),
        timed(5, 120, || selftest::normality_suite(SEED)),
        timed(6, 120, || selftest::consistency_suite(SEED)),
        timed(7, 60, || selftest::stolz_suite(SEED)),
        timed(8, 60, || selftest::decay_suite(SEED)),
    ];
    lines.push(determinism(suite_start));
    for l in &lines {
        println!(
            "acceptance criterion {} [{}] {}: {}",
            l.id,
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.detail
        );
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
