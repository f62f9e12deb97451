//! Command-line front end. Every command writes its outputs and a
//! `manifest.json` into `--out`; `replay` re-runs a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fullgroup::{ball_with_cap, fibonacci_generators, fibonacci_subshift, GeneratorSet, DEFAULT_BALL_CAP};
use crate::io::{spec_file_for, GeneratorsFile, MeasureFile, SpecFile};
use crate::points::Point;
use crate::randwalk::{
    an_report, convolution_powers, default_envelope_grid, default_tail_grid, entropy_envelope,
    max_displacement_tail, return_probability_suite, sample_orbit_walks, GroupDistribution, StepMeasure,
    DEFAULT_SUPPORT_CAP,
};
use crate::schreier::build_ball;
use crate::symbolic::{loglog_slope, Subshift, SubshiftSpec};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Parser, Debug)]
#[command(name = "fullgroup-lab", version, about = "Low-complexity subshifts, full-group cocycles and random-walk reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Word complexity table (n, rho); Toeplitz specs also get a slope fit.
    Complexity(ComplexityArgs),
    /// Admissible words of one length, one per line.
    Factors(FactorsArgs),
    /// Monte-Carlo orbit walks: per-trial summary, tail curve and fit.
    Walk(WalkArgs),
    /// Exact convolution powers with the A_n report and entropy envelope.
    Entropy(EntropyArgs),
    /// Return probabilities of the exact convolution powers.
    Returns(GroupArgs),
    /// Sphere sizes of the word-metric ball.
    Ball(GroupArgs),
    /// Schreier orbit-graph ball as DOT and adjacency CSV.
    Schreier(GroupArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityArgs {
    /// Spec file (JSON)
    #[arg(long)]
    pub spec: PathBuf,
    /// Largest word length
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Cap on enumerated factors per length
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FactorsArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Word length
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Where the subshift, point and generators come from.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Source {
    /// Generator file; defaults to the builtin Fibonacci generators
    #[arg(long)]
    pub gens: Option<PathBuf>,
    /// Spec file, used for the point (and the builtin generators when --gens is absent)
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Measure file; defaults to uniform on the generators and their inverses
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Steps per walk
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Largest convolution power
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Depth parameter L in d(n) = ceil(sqrt(L n ln n))
    #[arg(long, default_value_t = 9.0)]
    pub l: f64,
    /// Cap on support and ball sizes
    #[arg(long, default_value_t = DEFAULT_SUPPORT_CAP)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GroupArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Radius, or largest n for return probabilities
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory (defaults to the recorded one)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub spec_path: Option<PathBuf>,
    pub invocation: Command,
    pub outputs: Vec<String>,
    pub partial: bool,
}

/// Files written by a run and whether it stopped early.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub out: PathBuf,
    pub outputs: Vec<String>,
    pub partial: Option<Error>,
}

struct Writer {
    dir: PathBuf,
    format: Format,
    outputs: Vec<String>,
}

impl Writer {
    fn new(common: &Common) -> Result<Self> {
        std::fs::create_dir_all(&common.out)?;
        Ok(Writer {
            dir: common.out.clone(),
            format: common.format,
            outputs: Vec::new(),
        })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), body)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    /// Tabular output as `<stem>.csv` or `<stem>.json` (array of row objects).
    fn table(&mut self, stem: &str, headers: &[&str], rows: &[Vec<Value>]) -> Result<()> {
        match self.format {
            Format::Csv => {
                let mut body = headers.join(",");
                body.push('\n');
                for row in rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            Value::String(s) => s.clone(),
                            Value::Null => String::new(),
                            other => other.to_string(),
                        })
                        .collect();
                    let _ = writeln!(body, "{}", cells.join(","));
                }
                self.text(&format!("{stem}.csv"), &body)
            }
            Format::Json => {
                let objects: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            headers
                                .iter()
                                .map(|h| h.to_string())
                                .zip(row.iter().cloned())
                                .collect(),
                        )
                    })
                    .collect();
                self.json(&format!("{stem}.json"), &objects)
            }
        }
    }
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

struct Resolved {
    spec_path: Option<PathBuf>,
    subshift: Arc<Subshift>,
    point: Point,
    gens: GeneratorSet,
}

fn resolve_source(src: &Source) -> Result<Resolved> {
    let spec_override = src.spec.as_ref().map(|p| SpecFile::load(p)).transpose()?;
    let (spec_path, spec, gens) = match &src.gens {
        Some(path) => {
            let loaded = GeneratorsFile::load(path)?;
            (Some(loaded.spec_path), loaded.spec, loaded.gens)
        }
        None => {
            let (spec, subshift) = match &spec_override {
                Some(f) => (f.clone(), f.subshift()?),
                None => {
                    let s = fibonacci_subshift();
                    (spec_file_for(&s), s)
                }
            };
            let gens = fibonacci_generators(&subshift)?;
            (src.spec.clone(), spec, gens)
        }
    };
    let subshift = gens.subshift().clone();
    let point_spec = match spec_override {
        Some(f) => {
            if crate::symbolic::build_spec(&f.spec)? != *subshift.spec() {
                return Err(Error::SpecMismatch("--spec differs from the generators' spec".into()));
            }
            f
        }
        None => spec,
    };
    let point = point_spec.point(subshift.clone())?;
    Ok(Resolved {
        spec_path,
        subshift,
        point,
        gens,
    })
}

fn resolve_measure(path: &Option<PathBuf>, gens: &GeneratorSet) -> Result<StepMeasure> {
    match path {
        Some(p) => MeasureFile::load(p)?.resolve(gens),
        None => StepMeasure::uniform(gens),
    }
}

/// Make recorded paths independent of the working directory.
fn absolutize(cmd: &mut Command) -> Result<()> {
    let abs = |p: &mut PathBuf| -> Result<()> {
        if p.is_relative() {
            *p = std::env::current_dir()?.join(&*p);
        }
        Ok(())
    };
    let src = |s: &mut Source| -> Result<()> {
        if let Some(p) = s.gens.as_mut() {
            abs(p)?;
        }
        if let Some(p) = s.spec.as_mut() {
            abs(p)?;
        }
        Ok(())
    };
    match cmd {
        Command::Complexity(a) => abs(&mut a.spec),
        Command::Factors(a) => abs(&mut a.spec),
        Command::Walk(a) => {
            src(&mut a.source)?;
            a.measure.as_mut().map_or(Ok(()), abs)
        }
        Command::Entropy(a) => {
            src(&mut a.source)?;
            a.measure.as_mut().map_or(Ok(()), abs)
        }
        Command::Returns(a) | Command::Ball(a) | Command::Schreier(a) => {
            src(&mut a.source)?;
            a.measure.as_mut().map_or(Ok(()), abs)
        }
        Command::Replay(_) => Ok(()),
    }
}

fn common_mut(cmd: &mut Command) -> Option<&mut Common> {
    match cmd {
        Command::Complexity(a) => Some(&mut a.common),
        Command::Factors(a) => Some(&mut a.common),
        Command::Walk(a) => Some(&mut a.common),
        Command::Entropy(a) => Some(&mut a.common),
        Command::Returns(a) | Command::Ball(a) | Command::Schreier(a) => Some(&mut a.common),
        Command::Replay(_) => None,
    }
}

/// Run one command. A resource limit hit after some output was written is
/// returned in `RunOutcome::partial` rather than as an error.
pub fn run(command: Command) -> Result<RunOutcome> {
    if let Command::Replay(r) = &command {
        let manifest: RunManifest = serde_json::from_str(&crate::io::read_text(&r.manifest)?)?;
        let mut cmd = manifest.invocation;
        if let (Some(out), Some(common)) = (&r.out, common_mut(&mut cmd)) {
            common.out = out.clone();
        }
        return run(cmd);
    }
    let mut command = command;
    absolutize(&mut command)?;
    let (mut w, spec_path, partial) = match &command {
        Command::Complexity(a) => cmd_complexity(a)?,
        Command::Factors(a) => cmd_factors(a)?,
        Command::Walk(a) => cmd_walk(a)?,
        Command::Entropy(a) => cmd_entropy(a)?,
        Command::Returns(a) => cmd_returns(a)?,
        Command::Ball(a) => cmd_ball(a)?,
        Command::Schreier(a) => cmd_schreier(a)?,
        Command::Replay(_) => unreachable!("handled above"),
    };
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec_path,
        invocation: command.clone(),
        outputs: w.outputs.clone(),
        partial: partial.is_some(),
    };
    let outputs = w.outputs.clone();
    w.json(MANIFEST_NAME, &manifest)?;
    Ok(RunOutcome {
        out: w.dir,
        outputs,
        partial,
    })
}

type CmdResult = Result<(Writer, Option<PathBuf>, Option<Error>)>;

fn load_spec(path: &Path, cap: usize) -> Result<Arc<Subshift>> {
    let f = SpecFile::load(path)?;
    Ok(Subshift::with_enumeration_cap(crate::symbolic::build_spec(&f.spec)?, cap))
}

fn cmd_complexity(a: &ComplexityArgs) -> CmdResult {
    if a.n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    let s = load_spec(&a.spec, a.cap)?;
    let profile = s.complexity_profile(a.n)?;
    let mut w = Writer::new(&a.common)?;
    let rows: Vec<Vec<Value>> = (1..=a.n).map(|n| vec![json!(n), json!(profile[n])]).collect();
    w.table("complexity", &["n", "rho"], &rows)?;
    if let SubshiftSpec::Toeplitz(t) = s.spec() {
        let lo = 20.min(a.n / 2).max(1);
        if a.n > lo {
            let (slope, intercept) = loglog_slope(&s, lo..=a.n)?;
            w.json(
                "slope.json",
                &json!({
                    "n_min": lo,
                    "n_max": a.n,
                    "slope": slope,
                    "intercept": intercept,
                    "period": t.period(),
                    "holes": t.holes(),
                    "predicted_exponent": t.complexity_exponent(),
                    "coprime": t.is_coprime(),
                }),
            )?;
        }
    }
    Ok((w, Some(a.spec.clone()), None))
}

fn cmd_factors(a: &FactorsArgs) -> CmdResult {
    let s = load_spec(&a.spec, a.cap)?;
    let words = s.factors(a.n)?;
    let mut w = Writer::new(&a.common)?;
    let mut body = String::new();
    for word in words.iter() {
        let _ = writeln!(body, "{word}");
    }
    w.text(&format!("factors_{}.txt", a.n), &body)?;
    Ok((w, Some(a.spec.clone()), None))
}

fn cmd_walk(a: &WalkArgs) -> CmdResult {
    let r = resolve_source(&a.source)?;
    let m = resolve_measure(&a.measure, &r.gens)?;
    let sample = sample_orbit_walks(&m, &r.point, a.n, a.trials, a.seed)?;
    let mut w = Writer::new(&a.common)?;
    let rows: Vec<Vec<Value>> = (0..sample.trials())
        .map(|t| vec![json!(t), json!(sample.finals()[t]), json!(sample.max_abs()[t])])
        .collect();
    w.table("walks", &["trial", "final", "max_abs"], &rows)?;
    let traj: Vec<Vec<Value>> = sample
        .trajectory(0)
        .into_iter()
        .enumerate()
        .map(|(j, m)| vec![json!(j), json!(m)])
        .collect();
    w.table("trajectory", &["j", "m"], &traj)?;
    let mut steps = std::collections::BTreeMap::<i64, u64>::new();
    for t in 0..sample.trials() {
        if let Some(&d) = sample.increments(t).first() {
            *steps.entry(d as i64).or_default() += 1;
        }
    }
    let finals = sample.finals();
    let mean = finals.iter().sum::<i64>() as f64 / finals.len() as f64;
    let var = finals.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / finals.len() as f64;
    w.json(
        "summary.json",
        &json!({
            "n": a.n,
            "trials": a.trials,
            "seed": a.seed,
            "max_shift": sample.max_shift(),
            "first_step_counts": steps,
            "final_mean": float(mean),
            "final_variance": float(var),
        }),
    )?;
    match max_displacement_tail(&sample, &default_tail_grid()) {
        Ok(report) => {
            let rows: Vec<Vec<Value>> = report
                .rows
                .iter()
                .map(|row| vec![float(row.a), float(row.tail), float(row.envelope)])
                .collect();
            w.table("tail", &["a", "tail", "bound"], &rows)?;
            w.json("tail.json", &report)?;
        }
        Err(Error::InsufficientData(why)) => {
            let root = (a.n.max(1) as f64).sqrt();
            let rows: Vec<Vec<Value>> = default_tail_grid()
                .into_iter()
                .map(|x| {
                    let c = sample.max_abs().iter().filter(|&&m| m as f64 >= x * root).count();
                    vec![float(x), float(c as f64 / sample.trials() as f64), Value::Null]
                })
                .collect();
            w.table("tail", &["a", "tail", "bound"], &rows)?;
            w.json("tail.json", &json!({ "fit_error": why }))?;
        }
        Err(e) => return Err(e),
    }
    Ok((w, r.spec_path, None))
}

/// Convolution powers up to `n`, stopping at the first resource limit.
fn powers_until_limit(m: &StepMeasure, n: usize, cap: usize) -> Result<(Vec<GroupDistribution>, Option<Error>)> {
    let mut powers = convolution_powers(m, 0, cap)?;
    for _ in 0..n {
        match powers.last().expect("nonempty").convolve(m, cap) {
            Ok(d) => powers.push(d),
            Err(e @ Error::ResourceLimit { .. }) => return Ok((powers, Some(e))),
            Err(e) => return Err(e),
        }
    }
    Ok((powers, None))
}

fn cmd_entropy(a: &EntropyArgs) -> CmdResult {
    if a.n < 2 {
        return Err(Error::InvalidArgument("--n must be at least 2".into()));
    }
    let r = resolve_source(&a.source)?;
    let m = resolve_measure(&a.measure, &r.gens)?;
    let (powers, mut partial) = powers_until_limit(&m, a.n, a.cap)?;
    let reached = powers.len() - 1;
    let ball = match ball_with_cap(
        &GeneratorSet::new(
            r.subshift.clone(),
            m.names().iter().cloned().zip(m.atoms().iter().cloned()).collect(),
        )?,
        reached,
        a.cap,
    ) {
        Ok(b) => Some(b),
        Err(Error::ResourceLimit { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut w = Writer::new(&a.common)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for d in powers.iter().filter(|d| d.step() >= 2) {
        let rep = an_report(&r.subshift, &m, d, a.l, ball.as_ref())?;
        rows.push(vec![
            json!(rep.n),
            float(rep.entropy),
            float(rep.entropy / rep.n as f64),
            float(crate::randwalk::ratio_to_f64(&rep.mu_an)),
            json!(rep.an_size),
            float(rep.entropy_bound),
            float(rep.slack),
        ]);
        reports.push(rep);
    }
    w.table("entropy", &["n", "H", "H/n", "mu_n_An", "An_size", "bound", "slack"], &rows)?;
    w.json("an_reports.json", &reports)?;
    if reached >= 2 {
        match entropy_envelope(&r.subshift, &powers, &default_envelope_grid()) {
            Ok(env) => w.json("envelope.json", &env)?,
            Err(e @ Error::ResourceLimit { .. }) => partial = partial.or(Some(e)),
            Err(e) => return Err(e),
        }
    }
    Ok((w, r.spec_path, partial))
}

fn cmd_returns(a: &GroupArgs) -> CmdResult {
    if a.n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    let r = resolve_source(&a.source)?;
    let m = resolve_measure(&a.measure, &r.gens)?;
    let (powers, partial) = powers_until_limit(&m, 2 * a.n, a.cap)?;
    let mut w = Writer::new(&a.common)?;
    let reached = (powers.len() - 1) / 2;
    let rows: Vec<Vec<Value>> = if reached >= 1 {
        return_probability_suite(&powers, reached)?
            .into_iter()
            .map(|row| {
                vec![
                    json!(row.n),
                    json!(row.return_probability.to_string()),
                    float(crate::randwalk::ratio_to_f64(&row.return_probability)),
                    json!(row.max_probability.to_string()),
                    json!(row.identity_is_max),
                    json!(row.nonincreasing),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    w.table(
        "returns",
        &["n", "return_probability", "return_probability_f64", "max_probability", "identity_is_max", "nonincreasing"],
        &rows,
    )?;
    Ok((w, r.spec_path, partial))
}

fn cmd_ball(a: &GroupArgs) -> CmdResult {
    let r = resolve_source(&a.source)?;
    let b = ball_with_cap(&r.gens, a.n, a.cap)?;
    let mut w = Writer::new(&a.common)?;
    let mut total = 0;
    let rows: Vec<Vec<Value>> = b
        .sphere_sizes()
        .iter()
        .enumerate()
        .map(|(len, &c)| {
            total += c;
            let max_shift = b.iter().filter(|(_, l)| *l == len).map(|(g, _)| g.max_shift()).max().unwrap_or(0);
            vec![json!(len), json!(c), json!(total), json!(max_shift)]
        })
        .collect();
    w.table("ball", &["length", "sphere", "ball", "max_shift"], &rows)?;
    Ok((w, r.spec_path, None))
}

fn cmd_schreier(a: &GroupArgs) -> CmdResult {
    let r = resolve_source(&a.source)?;
    let b = build_ball(&r.point, &r.gens, a.n)?;
    let mut w = Writer::new(&a.common)?;
    w.text("schreier.dot", &b.to_dot())?;
    w.text("schreier.csv", &b.to_csv())?;
    w.json(
        "schreier.json",
        &json!({
            "radius": a.n,
            "vertices": b.vertices().len(),
            "edges": b.edges().len(),
            "lipschitz": b.is_lipschitz(),
            "symmetric": b.is_symmetric(),
            "path_with_loops": b.is_path_with_loops(),
        }),
    )?;
    Ok((w, r.spec_path, None))
}

/// Size the global thread pool from `FULLGROUP_LAB_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FULLGROUP_LAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("FULLGROUP_LAB_THREADS='{v}' is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Process entry point; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match run(cli.command) {
        Ok(outcome) => match outcome.partial {
            Some(e) => {
                eprintln!("partial results in {}: {e}", outcome.out.display());
                e.exit_code()
            }
            None => 0,
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
