//! `pblab`: batch front end for the boundary laboratory.

mod commands;
mod config;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{Format, Overrides, RunConfig};
use output::{Envelope, Status};

#[derive(Parser, Debug)]
#[command(name = "pblab", version, about = "Boundary behaviour of meromorphic functions in the unit disk")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Deepest truncation level 2^-k examined.
    #[arg(long, global = true)]
    max_level: Option<u32>,
    /// Report directory (default: $PBLAB_OUTPUT_DIR, else ./pblab-reports).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tighten a named tolerance, e.g. --tol cluster_diameter=1e-4.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two points: pseudo-hyperbolic, hyperbolic or chordal.
    Metric(MetricArgs),
    /// Directed hyperbolic distances between two curves at one level.
    CurveDist(CurvePairArgs),
    /// Discrete Frechet distance between two refined curves.
    Frechet(CurvePairArgs),
    /// Equivalence verdict from the distance trend over levels 1..=max-level.
    Equiv(EquivArgs),
    /// The zigzag pair: inclusion in the angle and growing Frechet distance.
    Lemma4(Lemma4Args),
    /// Sup of (1-|z|^2) f#(z) over a curvilinear angle, by level.
    Normality(NormalityArgs),
    /// Indicators along point sequences.
    Pseq(PseqArgs),
    /// Cluster set estimate over shells approaching the endpoint.
    Cluster(ClusterArgs),
    /// Convergence of f composed with disk automorphisms to a constant.
    Family(FamilyArgs),
    /// The conformal map of a Stolz angle onto the disk, or its inverse.
    StolzMap(StolzMapArgs),
    /// Sampled distortion constants of the Stolz map.
    Lemma6(Lemma6Args),
    /// Margin of -log|f| against a decay profile along a curve.
    Decay(DecayArgs),
    /// Values of named functions at points.
    Gallery(GalleryArgs),
    /// Runs the built-in acceptance suite.
    Selftest(SelftestArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Metric(_) => "metric",
            Command::CurveDist(_) => "curve-dist",
            Command::Frechet(_) => "frechet",
            Command::Equiv(_) => "equiv",
            Command::Lemma4(_) => "lemma4",
            Command::Normality(_) => "normality",
            Command::Pseq(_) => "pseq",
            Command::Cluster(_) => "cluster",
            Command::Family(_) => "family",
            Command::StolzMap(_) => "stolz-map",
            Command::Lemma6(_) => "lemma6",
            Command::Decay(_) => "decay",
            Command::Gallery(_) => "gallery",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value = "ph")]
    pub kind: MetricKindArg,
    /// First point, re,im (or inf for the chordal metric).
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKindArg {
    /// Pseudo-hyperbolic.
    Ph,
    /// Hyperbolic.
    H,
    /// Chordal on the sphere.
    S,
}

#[derive(Args, Debug, Serialize)]
pub struct CurvePairArgs {
    /// kind:theta[:param] with kind radius|chord|hypercycle|horocycle, or file:path.json.
    #[arg(long, allow_hyphen_values = true)]
    pub curve1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub curve2: String,
    /// Refinement level (default: --max-level).
    #[arg(long)]
    pub level: Option<u32>,
    /// Also write curve1's samples at this level in the exchange format.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EquivArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub curve1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub curve2: String,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma4Args {
    /// Pseudo-hyperbolic deflection of the angle.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 8)]
    pub zigzags: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FunctionArgs {
    /// identity | zero | const:re,im | mobius:re,im[,phase] | gavrilov_g | saginjan_h
    /// | square_exp | example1_f0[:K] | example2_f1[:K]
    #[arg(long, allow_hyphen_values = true)]
    pub function: String,
    /// Pole schedule JSON for the example functions (default: the built-in schedule).
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct NormalityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value = "radius:0", allow_hyphen_values = true)]
    pub curve: String,
    /// Pseudo-hyperbolic deflection of the angle.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PseqMode {
    /// Large values of (1-|z|^2) f# along the sequence.
    T8,
    /// Sups of f# (1-|z|^2) over hyperbolic disks about the sequence.
    T9,
    /// Two sequences with different limits at vanishing hyperbolic distance.
    T10,
}

#[derive(Args, Debug, Serialize)]
pub struct PseqArgs {
    #[arg(long, value_enum)]
    pub mode: PseqMode,
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// radial:N[:theta] | poles:N | pole-adjacent:N
    #[arg(long, default_value = "poles:16")]
    pub sequence: String,
    /// t9 only: const:r | pole-diameters
    #[arg(long, default_value = "pole-diameters")]
    pub radii: String,
    /// t10 only: the second sequence.
    #[arg(long, default_value = "poles:20")]
    pub sequence_b: String,
    /// t10 only: the common limit, re,im | inf | boundary (the schedule's boundary value).
    #[arg(long, default_value = "boundary", allow_hyphen_values = true)]
    pub alpha: String,
    /// t10 only: separation of the second sequence.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value = "radius:0", allow_hyphen_values = true)]
    pub curve: String,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Add the pole disks of the schedule to the region.
    #[arg(long)]
    pub with_poles: bool,
    /// Use the Stolz angle of this half-angle at the curve's endpoint instead.
    #[arg(long)]
    pub stolz: Option<f64>,
    #[arg(long, default_value_t = 14)]
    pub shells: u32,
    /// Refinement level used for membership in the angle.
    #[arg(long, default_value_t = 18)]
    pub level: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// radial:N[:theta] | poles:N | pole-adjacent:N
    #[arg(long, default_value = "radial:20")]
    pub w: String,
    #[arg(long, default_value_t = 0.5)]
    pub r1: f64,
    /// Target constant re,im | inf (default: f at the last w).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct StolzMapArgs {
    /// Half-angle in (0, pi/2).
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Points re,im; repeat for several.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// Treat the points as images and map them back.
    #[arg(long)]
    pub inverse: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma6Args {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value = "radius:0", allow_hyphen_values = true)]
    pub curve: String,
    /// log-e | log-inv | power:s | pure:E (the bound t^-E)
    #[arg(long, default_value = "log-e")]
    pub profile: String,
    /// Exponent of t in the denominator, at least 1 (ignored for pure:E).
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
    /// Refinement level (default: --max-level).
    #[arg(long)]
    pub level: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct GalleryArgs {
    /// A function in the --function grammar; all gallery functions when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub name: Option<String>,
    /// Evaluation points re,im; repeat for several.
    #[arg(long, allow_hyphen_values = true, default_values_t = ["0,0".to_string(), "0.5,0".to_string(), "0.9,0".to_string()])]
    pub z: Vec<String>,
    #[arg(long)]
    pub schedule: Option<String>,
    /// Write the active pole schedule as JSON to this path.
    #[arg(long)]
    pub dump_schedule: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout with status 0, usage errors to stderr with 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    let name = cli.command.name();
    let flags = match flag_overrides(&cli.global) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let cfg = match RunConfig::resolve(cli.global.config.as_deref(), flags) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let (arguments, outcome) = match commands::dispatch(&cli.command, &cfg) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let exit_code = outcome.status.exit_code();
    let bytes = match cfg.format {
        Format::Json => output::render_json(&Envelope {
            schema_version: output::SCHEMA_VERSION,
            subcommand: name,
            seed: cfg.seed,
            max_level: cfg.max_level,
            tolerances: &cfg.tolerances,
            arguments,
            status: outcome.status,
            exit_code,
            result: &outcome.result,
        }),
        Format::Csv => output::render_csv(&outcome.table, name, cfg.seed),
    };
    let path = match bytes.and_then(|b| output::write_report(&cfg, name, &b)) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    println!("{}", outcome.summary);
    eprintln!("report: {}", path.display());
    if outcome.status != Status::Ok {
        eprintln!("status: {}", serde_json::to_value(outcome.status).unwrap_or_default().as_str().unwrap_or(""));
    }
    exit_code
}

fn flag_overrides(g: &GlobalArgs) -> anyhow::Result<Overrides> {
    Ok(Overrides {
        seed: g.seed,
        max_level: g.max_level,
        output_dir: g.output_dir.clone(),
        format: g.format,
        tolerances: g.tolerances.iter().map(|t| config::parse_tolerance(t)).collect::<anyhow::Result<_>>()?,
    })
}

/// Prints the error chain and maps it to an exit code: 3 when a function
/// evaluation overflowed, 2 for everything else.
fn fail(e: &anyhow::Error) -> u8 {
    eprintln!("error: {e:#}");
    match e.downcast_ref::<boundary_lab::Error>() {
        Some(boundary_lab::Error::EvaluationOverflow { .. }) => 3,
        _ => 2,
    }
}
