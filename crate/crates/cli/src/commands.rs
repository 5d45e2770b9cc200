use std::fs;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use boundary_lab::analysis::{
    cluster_estimate, normality_sup, p_indicator_t8, p_indicator_t9, renormalized_family_check, theorem10_check,
    AngleRegion, ClusterThresholds, FamilyVerdict, NormalityThresholds, PoleRegion, Region, Trend,
};
use boundary_lab::curves::{
    angle_contains, are_equivalent_with, build_lemma4_pair, directed_curve_distance, discrete_frechet, CurvilinearAngle,
    EquivalenceThresholds, Verdict,
};
use boundary_lab::functions::GalleryName;
use boundary_lab::geometry::{hyperbolic_distance, pseudo_hyperbolic_distance, spherical_distance, ExtendedComplex};
use boundary_lab::report::{num, Table, Tabular};
use boundary_lab::stolz::{
    decay_margin, lemma6_check, violation_threshold, DecayProfile, DecayVerdict, ProfileKind, StolzAngle, StolzMap,
};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{Outcome, Status};
use crate::parse;
use crate::{
    ClusterArgs, Command, CurvePairArgs, DecayArgs, EquivArgs, FamilyArgs, FunctionArgs, GalleryArgs, Lemma4Args,
    Lemma6Args, MetricArgs, MetricKindArg, NormalityArgs, PseqArgs, PseqMode, StolzMapArgs,
};

/// Runs a subcommand and returns its echoed arguments with the outcome.
pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<(Value, Outcome)> {
    fn go<A: Serialize>(args: &A, run: impl FnOnce(&A) -> Result<Outcome>) -> Result<(Value, Outcome)> {
        Ok((serde_json::to_value(args)?, run(args)?))
    }
    match command {
        Command::Metric(a) => go(a, metric),
        Command::CurveDist(a) => go(a, |a| curve_dist(a, cfg)),
        Command::Frechet(a) => go(a, |a| frechet(a, cfg)),
        Command::Equiv(a) => go(a, |a| equiv(a, cfg)),
        Command::Lemma4(a) => go(a, |a| lemma4(a, cfg)),
        Command::Normality(a) => go(a, |a| normality(a, cfg)),
        Command::Pseq(a) => go(a, pseq),
        Command::Cluster(a) => go(a, |a| cluster(a, cfg)),
        Command::Family(a) => go(a, family),
        Command::StolzMap(a) => go(a, |a| stolz_map(a, cfg)),
        Command::Lemma6(a) => go(a, |a| lemma6(a, cfg)),
        Command::Decay(a) => go(a, |a| decay(a, cfg)),
        Command::Gallery(a) => go(a, gallery),
        Command::Selftest(a) => go(a, |_| selftest(cfg)),
    }
}

fn outcome<T: Serialize>(result: &T, table: Table, summary: String, status: Status) -> Result<Outcome> {
    Ok(Outcome {
        result: serde_json::to_value(result)?,
        table,
        summary,
        status,
    })
}

fn verdict_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Plain notation for moderate magnitudes, scientific otherwise.
fn show(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn ok_if(pass: bool) -> Status {
    if pass {
        Status::Ok
    } else {
        Status::NotSatisfied
    }
}

fn level_or(level: Option<u32>, cfg: &RunConfig) -> Result<u32> {
    let level = level.unwrap_or(cfg.max_level);
    if level == 0 || level > boundary_lab::curves::MAX_LEVEL {
        bail!("level must lie in 1..={}", boundary_lab::curves::MAX_LEVEL);
    }
    Ok(level)
}

fn metric(a: &MetricArgs) -> Result<Outcome> {
    let value = match a.kind {
        MetricKindArg::Ph => pseudo_hyperbolic_distance(parse::disk_point(&a.z)?, parse::disk_point(&a.w)?),
        MetricKindArg::H => hyperbolic_distance(parse::disk_point(&a.z)?, parse::disk_point(&a.w)?),
        MetricKindArg::S => spherical_distance(parse::extended(&a.z)?, parse::extended(&a.w)?),
    };
    let mut t = Table::new(&["index", "value", "kind"]);
    t.push(["0".to_string(), num(value), verdict_name(&a.kind)]);
    outcome(&json!({ "value": value }), t, show(value), Status::Ok)
}

fn curve_dist(a: &CurvePairArgs, cfg: &RunConfig) -> Result<Outcome> {
    let level = level_or(a.level, cfg)?;
    let (c1, c2) = (parse::curve(&a.curve1)?, parse::curve(&a.curve2)?);
    let forward = directed_curve_distance(&c1, &c2, level)?;
    let backward = directed_curve_distance(&c2, &c1, level)?;
    if let Some(path) = &a.export {
        let text = serde_json::to_string_pretty(&c1.to_exchange(level))?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let value = forward.max(backward);
    let mut t = Table::new(&["level", "value", "forward", "backward"]);
    t.push([level.to_string(), num(value), num(forward), num(backward)]);
    let result = json!({
        "curve1": c1.spec(), "curve2": c2.spec(), "level": level,
        "forward": forward, "backward": backward, "value": value,
    });
    outcome(&result, t, format!("d(curve1 -> curve2) = {}\nd(curve2 -> curve1) = {}", show(forward), show(backward)), Status::Ok)
}

fn frechet(a: &CurvePairArgs, cfg: &RunConfig) -> Result<Outcome> {
    let level = level_or(a.level, cfg)?;
    let (c1, c2) = (parse::curve(&a.curve1)?, parse::curve(&a.curve2)?);
    let (p1, p2) = (c1.refine(level), c2.refine(level));
    let value = discrete_frechet(&p1.points, &p2.points)?;
    if let Some(path) = &a.export {
        fs::write(path, serde_json::to_string_pretty(&c1.to_exchange(level))?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut t = Table::new(&["level", "value", "samples1", "samples2"]);
    t.push([level.to_string(), num(value), p1.points.len().to_string(), p2.points.len().to_string()]);
    let result = json!({
        "curve1": c1.spec(), "curve2": c2.spec(), "level": level, "frechet": value,
        "samples1": p1.points.len(), "samples2": p2.points.len(),
    });
    outcome(&result, t, format!("frechet = {}", show(value)), Status::Ok)
}

fn equiv(a: &EquivArgs, cfg: &RunConfig) -> Result<Outcome> {
    let (c1, c2) = (parse::curve(&a.curve1)?, parse::curve(&a.curve2)?);
    let thresholds = EquivalenceThresholds {
        plateau_ratio: 1.0 + cfg.tol("equiv_plateau"),
        ..Default::default()
    };
    let v = are_equivalent_with(&c1, &c2, cfg.max_level, thresholds)?;
    let last = v.levels.last().map_or(f64::NAN, |l| l.value);
    let summary = format!("verdict: {}\nlast distance: {}", verdict_name(&v.verdict), show(last));
    outcome(&v, v.table(), summary, ok_if(v.verdict == Verdict::Equivalent))
}

fn lemma4(a: &Lemma4Args, cfg: &RunConfig) -> Result<Outcome> {
    let pair = build_lemma4_pair(a.theta, a.r, a.zigzags)?;
    let angle = CurvilinearAngle::new(Arc::new(pair.gamma1.clone()), a.r)?;
    let levels: Vec<u32> = (1..=cfg.max_level).collect();
    let outside: Vec<u32> = levels
        .iter()
        .copied()
        .filter(|&k| !pair.gamma2.refine(k).points.iter().all(|p| angle_contains(&angle, *p, k)))
        .collect();
    let frechet = (1..=a.zigzags)
        .map(|n| {
            let (g1, g2) = pair.prefix(n)?;
            Ok(discrete_frechet(&g1, &g2)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let increasing = frechet.windows(2).all(|w| w[1] > w[0]);
    let inside = outside.is_empty();
    let mut t = Table::new(&["zigzags", "frechet"]);
    for (n, f) in frechet.iter().enumerate() {
        t.push([(n + 1).to_string(), num(*f)]);
    }
    let result = json!({
        "markers": pair.markers,
        "gamma2_inside_angle": inside,
        "levels_checked": levels,
        "levels_outside": outside,
        "frechet": frechet,
        "frechet_increasing": increasing,
    });
    let summary = format!(
        "gamma2 inside angle: {inside}\nfrechet increasing: {increasing}\nlast frechet: {}",
        show(frechet.last().copied().unwrap_or(0.0))
    );
    outcome(&result, t, summary, ok_if(inside && increasing))
}

fn function(a: &FunctionArgs) -> Result<(parse::Function, Arc<boundary_lab::functions::Example1Schedule>)> {
    let schedule = parse::schedule(a.schedule.as_deref())?;
    Ok((parse::function(&a.function, &schedule)?, schedule))
}

fn normality(a: &NormalityArgs, cfg: &RunConfig) -> Result<Outcome> {
    let (f, _) = function(&a.function)?;
    let angle = CurvilinearAngle::new(Arc::new(parse::curve(&a.curve)?), a.r)?;
    let thresholds = NormalityThresholds {
        plateau: cfg.tol("normality_plateau"),
        failure_fraction: cfg.tol("normality_failure_fraction"),
        ..Default::default()
    };
    let rep = normality_sup(&f.handle, &angle, cfg.max_level, &thresholds)?;
    let status = match rep.verdict {
        Trend::Bounded => Status::Ok,
        _ if rep.failures as f64 > thresholds.failure_fraction * rep.evaluations as f64 => Status::EvaluationFailure,
        _ => Status::NotSatisfied,
    };
    let last = rep.levels.last().map_or(f64::NAN, |l| l.sup);
    let summary = format!("verdict: {}\nsup at level {}: {}", verdict_name(&rep.verdict), cfg.max_level, show(last));
    let result = json!({ "function_spec": f.spec, "report": rep });
    outcome(&result, rep.table(), summary, status)
}

const SEQUENCE_FAILURE_FRACTION: f64 = 0.01;

fn pseq(a: &PseqArgs) -> Result<Outcome> {
    let (f, schedule) = function(&a.function)?;
    let seq = parse::sequence(&a.sequence, &schedule)?;
    let too_many = |failures: usize, n: usize| failures as f64 > SEQUENCE_FAILURE_FRACTION * n as f64;
    match a.mode {
        PseqMode::T8 => {
            let rep = p_indicator_t8(&f.handle, &seq)?;
            let status = if too_many(rep.failures, seq.len()) { Status::EvaluationFailure } else { Status::Ok };
            let summary = format!("indicator: {}", rep.indicator);
            outcome(&json!({ "function_spec": f.spec, "report": rep }), rep.table(), summary, status)
        }
        PseqMode::T9 => {
            let radii = parse::radii(&a.radii, seq.len(), &schedule)?;
            let rep = p_indicator_t9(&f.handle, &seq, &radii)?;
            let status = if rep.trend == Trend::Inconclusive && rep.failures > 0 {
                Status::EvaluationFailure
            } else {
                Status::Ok
            };
            let summary = format!("trend: {}", verdict_name(&rep.trend));
            outcome(&json!({ "function_spec": f.spec, "report": rep }), rep.table(), summary, status)
        }
        PseqMode::T10 => {
            let seq_b = parse::sequence(&a.sequence_b, &schedule)?;
            let alpha = match a.alpha.as_str() {
                "boundary" => ExtendedComplex::from_complex(schedule.boundary_value()),
                other => parse::extended(other)?,
            };
            let rep = theorem10_check(&f.handle, &seq, &seq_b, alpha, a.delta)?;
            let summary = format!(
                "conditions: (i) {} (ii) {} (iii) {}\nflagged: {}",
                rep.condition_i, rep.condition_ii, rep.condition_iii, rep.flagged
            );
            outcome(&json!({ "function_spec": f.spec, "report": rep }), rep.table(), summary, Status::Ok)
        }
    }
}

fn cluster(a: &ClusterArgs, cfg: &RunConfig) -> Result<Outcome> {
    let (f, schedule) = function(&a.function)?;
    let curve = Arc::new(parse::curve(&a.curve)?);
    let theta = curve.endpoint_angle();
    let region: Box<dyn Region> = match a.stolz {
        Some(alpha) => Box::new(StolzAngle::new(theta, alpha)?),
        None => {
            let angle = AngleRegion::new(CurvilinearAngle::new(curve, a.r)?, a.level);
            if a.with_poles {
                Box::new(PoleRegion { angle, schedule })
            } else {
                Box::new(angle)
            }
        }
    };
    let thresholds = ClusterThresholds {
        diameter: cfg.tol("cluster_diameter"),
        convergence: cfg.tol("cluster_convergence"),
        ..Default::default()
    };
    let est = cluster_estimate(&f.handle, region.as_ref(), theta, a.shells, &thresholds)?;
    let limit = match est.limit_candidate {
        Some(ExtendedComplex::Infinity) => "inf".to_string(),
        Some(ExtendedComplex::Finite { re, im }) => format!("{},{}", show(re), show(im)),
        None => "none".to_string(),
    };
    let summary = format!(
        "limit candidate: {limit}\nlast diameter: {}",
        show(est.diameters.last().copied().unwrap_or(f64::NAN))
    );
    let status = ok_if(!est.inconclusive);
    outcome(&json!({ "function_spec": f.spec, "report": est }), est.table(), summary, status)
}

fn family(a: &FamilyArgs) -> Result<Outcome> {
    let (f, schedule) = function(&a.function)?;
    let ws = parse::sequence(&a.w, &schedule)?;
    let c = match &a.c {
        Some(c) => parse::extended(c)?,
        None => f.handle.eval(*ws.last().expect("non-empty sequence"))?,
    };
    let rep = renormalized_family_check(&f.handle, &ws, a.r1, c)?;
    let status = match rep.verdict {
        FamilyVerdict::Converges => Status::Ok,
        FamilyVerdict::Inconclusive => Status::EvaluationFailure,
        FamilyVerdict::NotConverged => Status::NotSatisfied,
    };
    let summary = format!(
        "verdict: {}\nlast sup d_S: {}",
        verdict_name(&rep.verdict),
        show(rep.sup_ds.last().copied().unwrap_or(f64::NAN))
    );
    outcome(&json!({ "function_spec": f.spec, "report": rep }), rep.table(), summary, status)
}

#[derive(Serialize)]
struct StolzRow {
    input: [f64; 2],
    output: [f64; 2],
    closed_form: Option<[f64; 2]>,
    round_trip_error: f64,
}

fn xy(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn stolz_map(a: &StolzMapArgs, cfg: &RunConfig) -> Result<Outcome> {
    let map = StolzMap::new(a.theta, a.alpha)?;
    let one = Complex64::new(1.0, 0.0);
    let rotation = Complex64::from_polar(1.0, -a.theta);
    let tol = cfg.tol("stolz_round_trip");
    let mut rows = Vec::with_capacity(a.z.len());
    for s in &a.z {
        let p = parse::complex(s)?;
        let row = if a.inverse {
            let z = map.inverse(p)?;
            // compare 1 - w, which carries the information near the vertex
            let q = map.one_minus_forward(z)?;
            StolzRow {
                input: xy(p),
                output: xy(z),
                closed_form: None,
                round_trip_error: (q - (one - p)).norm() / (one - p).norm(),
            }
        } else {
            let w = map.forward(p)?;
            let v = map.vertex_offset(map.one_minus_forward(p)?)?;
            let exact = one - p * rotation;
            StolzRow {
                input: xy(p),
                output: xy(w),
                closed_form: Some(xy(map.closed_form(p)?)),
                round_trip_error: (v - exact).norm() / exact.norm(),
            }
        };
        rows.push(row);
    }
    let worst = rows.iter().map(|r| r.round_trip_error).fold(0.0, f64::max);
    let mut t = Table::new(&["index", "out_re", "out_im", "in_re", "in_im", "round_trip_error"]);
    for (i, r) in rows.iter().enumerate() {
        t.push([
            i.to_string(),
            num(r.output[0]),
            num(r.output[1]),
            num(r.input[0]),
            num(r.input[1]),
            num(r.round_trip_error),
        ]);
    }
    let summary = rows
        .iter()
        .map(|r| format!("{},{}", show(r.output[0]), show(r.output[1])))
        .collect::<Vec<_>>()
        .join("\n");
    let result = json!({
        "map": map, "exponent": map.exponent(), "inverse": a.inverse,
        "points": rows, "max_round_trip_error": worst, "tolerance": tol,
    });
    outcome(&result, t, summary, ok_if(worst <= tol))
}

fn lemma6(a: &Lemma6Args, cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rep = lemma6_check(a.alpha, a.beta, a.samples, &mut rng)?;
    let summary = format!("m = {}\nM = {}\npass: {}", show(rep.m_hat), show(rep.big_m_hat), rep.pass);
    outcome(&rep, rep.table(), summary, ok_if(rep.pass))
}

fn profile(s: &str, exponent: f64) -> Result<DecayProfile> {
    Ok(match s {
        "log-e" => DecayProfile::new(ProfileKind::LogE, exponent)?,
        "log-inv" => DecayProfile::new(ProfileKind::LogInv, exponent)?,
        _ => match s.split_once(':') {
            Some(("power", v)) => DecayProfile::new(ProfileKind::Power { s: v.parse()? }, exponent)?,
            Some(("pure", v)) => DecayProfile::pure_power(v.parse()?)?,
            _ => bail!("unknown profile {s:?}; expected log-e, log-inv, power:s or pure:E"),
        },
    })
}

fn decay(a: &DecayArgs, cfg: &RunConfig) -> Result<Outcome> {
    let (f, _) = function(&a.function)?;
    let curve = parse::curve(&a.curve)?;
    let level = level_or(a.level, cfg)?;
    let profile = profile(&a.profile, a.exponent)?;
    let table = decay_margin(&f.handle, &curve, &profile, level)?;
    let threshold = violation_threshold(&f.handle, &curve, &profile, level)?;
    let summary = format!(
        "verdict: {}\nmin margin: {}\nviolation threshold: {}",
        verdict_name(&table.verdict),
        show(table.min_margin),
        threshold.map_or("none".to_string(), show)
    );
    let result = json!({ "function_spec": f.spec, "report": table, "violation_threshold": threshold });
    outcome(&result, table.table(), summary, ok_if(table.verdict == DecayVerdict::Satisfied))
}

fn gallery(a: &GalleryArgs) -> Result<Outcome> {
    let schedule = parse::schedule(a.schedule.as_deref())?;
    if let Some(path) = &a.dump_schedule {
        fs::write(path, schedule.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let names: Vec<String> = match &a.name {
        Some(n) => vec![n.clone()],
        None => GalleryName::ALL.iter().map(|g| g.as_str().to_string()).collect(),
    };
    let points = a.z.iter().map(|s| parse::disk_point(s)).collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["index", "function", "z_re", "z_im", "f_re", "f_im", "spherical_derivative", "lehto_virtanen"]);
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for name in &names {
        let f = parse::function(name, &schedule)?;
        for (i, z) in points.iter().enumerate() {
            let value = f.handle.eval(*z)?;
            let fsharp = f.handle.spherical_derivative(*z)?;
            let lv = f.handle.lehto_virtanen_value(*z)?;
            let shown = match value {
                ExtendedComplex::Infinity => "inf".to_string(),
                ExtendedComplex::Finite { re, im } => format!("{},{}", show(re), show(im)),
            };
            let (f_re, f_im) = match value {
                ExtendedComplex::Infinity => ("inf".to_string(), "inf".to_string()),
                ExtendedComplex::Finite { re, im } => (num(re), num(im)),
            };
            t.push([
                i.to_string(),
                name.clone(),
                num(z.value().re),
                num(z.value().im),
                f_re,
                f_im,
                num(fsharp),
                num(lv),
            ]);
            lines.push(format!("{name}({},{}) = {shown}", show(z.value().re), show(z.value().im)));
            entries.push(json!({
                "function": name, "spec": f.spec, "z": [z.value().re, z.value().im],
                "value": value, "spherical_derivative": fsharp, "lehto_virtanen": lv,
            }));
        }
    }
    outcome(&json!({ "values": entries }), t, lines.join("\n"), Status::Ok)
}

fn selftest(cfg: &RunConfig) -> Result<Outcome> {
    let rep = boundary_lab::selftest::run(cfg.seed)?;
    let summary = rep
        .criteria
        .iter()
        .map(|c| format!("criterion {} {}: {}", c.id, c.name, if c.pass { "pass" } else { "FAIL" }))
        .collect::<Vec<_>>()
        .join("\n");
    outcome(&rep, rep.table(), summary, ok_if(rep.pass))
}
