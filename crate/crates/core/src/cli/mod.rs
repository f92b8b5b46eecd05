//! Command-line front end. Every subcommand writes plot-ready JSON and CSV
//! files into an output directory.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 unparsable input, 3 numerical
//! failure, 4 failed scenario check, 5 injection hypothesis violated,
//! 6 injection windows exhausted.

mod scenario;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{classify, track, DEFAULT_MARGIN, DEFAULT_RADIUS};
use crate::essrange::{estimate_we, WindowSchedule};
use crate::galerkin::{compress_sequence, inject_spurious, GalerkinError, InjectionPlan, SubspaceBasis, WindowPolicy};
use crate::linalg::ComplexMatrix;
use crate::numrange::{nr_boundary, ClipBox, ConvexRegion, SupportFunction, DEFAULT_ANGLES};
use crate::operators::{advdiff_constant, advdiff_gaussian, DiffOp1D, ModelKind, ModelSpec, OperatorModel};
use crate::truncation1d::{truncated_spectrum, truncation_we, TruncationSchedule};

pub use scenario::{RunManifest, ScenarioCheck, SCENARIOS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("scenario check failed: {0}")]
    Check(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("windows exhausted: {0}")]
    Exhausted(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Check(_) => 4,
            CliError::Hypothesis(_) => 5,
            CliError::Exhausted(_) => 6,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GalerkinError> for CliError {
    fn from(e: GalerkinError) -> Self {
        match e {
            GalerkinError::HypothesisViolated { .. } => CliError::Hypothesis(e.to_string()),
            GalerkinError::WindowExhausted { .. } => CliError::Exhausted(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "specpol", version, about = "Numerical ranges, essential numerical ranges and spectral pollution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Boundary of the numerical range of a matrix.
    Numrange(NumrangeArgs),
    /// Window estimate of the essential numerical range of a model.
    Essrange(EssrangeArgs),
    /// Spectra of Galerkin compressions onto leading subspaces.
    Galerkin(GalerkinArgs),
    /// Spectra of Dirichlet truncations of a differential operator.
    Truncate(TruncateArgs),
    /// Construct a spurious eigenvalue near a target.
    Inject(InjectArgs),
    /// Track eigenvalues across levels and classify accumulation points.
    Classify(ClassifyArgs),
    /// Run a named scenario end to end.
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Clip box `re_min,re_max,im_min,im_max`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    clip: Option<Vec<f64>>,
    /// Number of support directions.
    #[arg(long, default_value_t = DEFAULT_ANGLES)]
    angles: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NumrangeArgs {
    /// Dense matrix JSON file `{"rows","cols","entries":[[re,im],...]}`.
    #[arg(long, conflicts_with = "model")]
    matrix: Option<PathBuf>,
    /// Built-in model: name, `ellipse-block:N`, JSON string, or JSON file.
    #[arg(long)]
    model: Option<String>,
    /// Leading dimension taken from an infinite model.
    #[arg(long, default_value_t = 20)]
    dim: usize,
    /// `json`, `csv` or `both`.
    #[arg(long, default_value = "both")]
    format: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EssrangeArgs {
    #[arg(long)]
    model: String,
    /// Window start indices.
    #[arg(long, value_delimiter = ',', conflicts_with = "blocks")]
    starts: Option<Vec<usize>>,
    /// Window width for `--starts`.
    #[arg(long, default_value_t = 64)]
    width: usize,
    /// First block of each window (block models).
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
    #[arg(long, default_value_t = 100)]
    blocks_per_window: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GalerkinArgs {
    #[arg(long)]
    model: String,
    /// Subspace sizes: number of leading blocks (block models) or leading
    /// coordinates.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TruncateArgs {
    /// `advdiff-const` or `advdiff-gauss`.
    #[arg(long)]
    model: String,
    /// Interval half-widths.
    #[arg(long = "s", value_delimiter = ',', required = true)]
    s_values: Vec<f64>,
    #[arg(long)]
    density: Option<f64>,
    /// Fixed node count for every interval.
    #[arg(long)]
    nodes: Option<usize>,
    /// Recompute at twice the nodes and flag unstable eigenvalues.
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct InjectArgs {
    #[arg(long)]
    model: String,
    /// Target `re,im`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, required = true)]
    target: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Dimension parameter of `V`: leading blocks for block models, leading
    /// coordinates otherwise.
    #[arg(long, default_value_t = 10)]
    vdim: usize,
    #[arg(long, default_value_t = 16)]
    width: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Spectrum CSV from `truncate` or `galerkin`.
    #[arg(long)]
    spectra: PathBuf,
    /// Region JSON.
    #[arg(long)]
    region: PathBuf,
    /// CSV `re,im` of known eigenvalues; points inside the region and absent
    /// from it become pollution candidates.
    #[arg(long)]
    exact: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// One of: ellipse-family, delay, diag-empty, ex1, advdiff-const,
    /// advdiff-gauss, airy.
    name: String,
    /// JSON config file, or a single `key=value` override.
    #[arg(long)]
    config: Option<String>,
    /// `key=value` overrides; values are JSON where they parse as JSON.
    #[arg(long = "set")]
    set: Vec<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Files written by one command, in order.
pub(crate) struct Outputs {
    dir: PathBuf,
    pub(crate) files: Vec<String>,
}

impl Outputs {
    pub(crate) fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub(crate) fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub(crate) fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.dir.join(name)).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub(crate) fn with_writer(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
    ) -> Result<(), CliError> {
        let mut file = std::io::BufWriter::new(fs::File::create(self.dir.join(name))?);
        f(&mut file)?;
        file.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub(crate) fn fmt(x: f64) -> String {
    x.to_string()
}

pub(crate) fn clip_from(values: &Option<Vec<f64>>, default: ClipBox) -> Result<ClipBox, CliError> {
    match values {
        None => Ok(default),
        Some(v) if v.len() == 4 && v[0] < v[1] && v[2] < v[3] && v.iter().all(|x| x.is_finite()) => {
            Ok(ClipBox::new(v[0], v[1], v[2], v[3]))
        }
        Some(v) => Err(CliError::Usage(format!("--clip needs re_min<re_max,im_min<im_max, got {v:?}"))),
    }
}

/// Model from a name, `ellipse-block:N`, a JSON string, or a JSON file.
pub(crate) fn parse_model_spec(text: &str) -> Result<ModelSpec, CliError> {
    let trimmed = text.trim();
    let json = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else if Path::new(trimmed).is_file() {
        fs::read_to_string(trimmed)?
    } else if let Some(n) = trimmed.strip_prefix("ellipse-block:") {
        let n: usize = n.parse().map_err(|_| CliError::Parse(format!("bad block index in '{trimmed}'")))?;
        format!(r#"{{"kind":"ellipse-block","params":{{"n":{n}}}}}"#)
    } else {
        format!(r#"{{"kind":{},"params":{{}}}}"#, serde_json::Value::String(trimmed.to_string()))
    };
    serde_json::from_str(&json).map_err(|e| CliError::Parse(format!("model '{trimmed}': {e}")))
}

fn build_model(text: &str) -> Result<OperatorModel, CliError> {
    parse_model_spec(text)?
        .build()
        .ok_or_else(|| CliError::Usage(format!("'{text}' is a finite matrix, not an infinite model")))
}

fn diffop_by_name(name: &str) -> Result<DiffOp1D, CliError> {
    match name {
        "advdiff-const" => Ok(advdiff_constant()),
        "advdiff-gauss" => Ok(advdiff_gaussian()),
        other => Err(CliError::Parse(format!("unknown differential operator '{other}'"))),
    }
}

/// Boundary polyline rows `theta, s, re, im`.
pub(crate) fn boundary_rows(sf: &SupportFunction) -> Vec<Vec<String>> {
    (0..sf.len())
        .filter_map(|j| {
            let p = sf.boundary_points[j]?;
            Some(vec![fmt(sf.angles[j]), fmt(sf.support[j]), fmt(p.re), fmt(p.im)])
        })
        .collect()
}

fn cmd_numrange(a: &NumrangeArgs) -> Result<Vec<String>, CliError> {
    let m: ComplexMatrix = match (&a.matrix, &a.model) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        }
        (None, Some(model)) => parse_model_spec(model)?.matrix(a.dim),
        (None, None) => return Err(CliError::Usage("numrange needs --matrix or --model".into())),
    };
    let clip = clip_from(&a.common.clip, ClipBox::default())?;
    let sf = nr_boundary(&m, a.common.angles, 1e-8).map_err(numeric)?;
    let mut out = Outputs::new(&a.common.out)?;
    let (json, csv) = match a.format.as_str() {
        "json" => (true, false),
        "csv" => (false, true),
        "both" => (true, true),
        other => return Err(CliError::Usage(format!("unknown format '{other}'"))),
    };
    if csv {
        out.csv("boundary.csv", &["theta", "s", "re", "im"], &boundary_rows(&sf))?;
    }
    if json {
        out.json("region.json", &ConvexRegion::from_support(sf, clip))?;
    }
    Ok(out.files)
}

fn cmd_essrange(a: &EssrangeArgs) -> Result<Vec<String>, CliError> {
    let op = build_model(&a.model)?;
    let clip = clip_from(&a.common.clip, ClipBox::default())?;
    let sched = match (&a.starts, &a.blocks) {
        (Some(starts), _) => WindowSchedule::new(starts.clone(), a.width, clip),
        (None, Some(blocks)) => WindowSchedule::blocks(blocks, a.blocks_per_window, clip),
        (None, None) => crate::essrange::default_schedule(&op, clip),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?
    .with_angles(a.common.angles);
    let est = estimate_we(&op, &sched).map_err(numeric)?;
    let mut out = Outputs::new(&a.common.out)?;
    out.json("estimate.json", &est)?;
    Ok(out.files)
}

fn leading_basis(op: &OperatorModel, size: usize) -> SubspaceBasis {
    if op.kind() == ModelKind::Block2x2 {
        SubspaceBasis::blocks(size)
    } else {
        SubspaceBasis::coordinates(op.first_index(), size)
    }
}

fn cmd_galerkin(a: &GalerkinArgs) -> Result<Vec<String>, CliError> {
    let op = build_model(&a.model)?;
    if a.sizes.contains(&0) {
        return Err(CliError::Usage("subspace sizes must be positive".into()));
    }
    let bases: Vec<SubspaceBasis> = a.sizes.iter().map(|&n| leading_basis(&op, n)).collect();
    let mut run = compress_sequence(&op, &bases)?;
    for (level, &n) in run.levels.iter_mut().zip(&a.sizes) {
        level.n = n;
    }
    let mut out = Outputs::new(&a.out)?;
    out.with_writer("spectra.csv", |w| run.write_csv(w).map_err(|e| CliError::Io(e.to_string())))?;
    Ok(out.files)
}

fn cmd_truncate(a: &TruncateArgs) -> Result<Vec<String>, CliError> {
    let op = diffop_by_name(&a.model)?;
    let mut sched = TruncationSchedule::new(a.s_values.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(d) = a.density {
        sched = sched.with_density(d);
    }
    if let Some(n) = a.nodes {
        sched = sched.with_nodes(n);
    }
    let clip = clip_from(&a.common.clip, ClipBox::new(-10.0, 100.0, -30.0, 30.0))?;
    let run = truncated_spectrum(&op, &sched, a.refine).map_err(numeric)?;
    let region = truncation_we(&op, clip).map_err(numeric)?;
    let mut out = Outputs::new(&a.common.out)?;
    out.with_writer("spectra.csv", |w| run.write_csv(w).map_err(numeric))?;
    out.json("region.json", &region)?;
    Ok(out.files)
}

fn cmd_inject(a: &InjectArgs) -> Result<Vec<String>, CliError> {
    let op = build_model(&a.model)?;
    let [re, im] = a.target[..] else {
        return Err(CliError::Usage(format!("--target needs re,im, got {:?}", a.target)));
    };
    if a.vdim == 0 {
        return Err(CliError::Usage("--vdim must be positive".into()));
    }
    let lambda = Complex64::new(re, im);
    let policy = WindowPolicy {
        width: a.width,
        clip: clip_from(&a.common.clip, ClipBox::default())?,
        ..WindowPolicy::default()
    };
    let v = leading_basis(&op, a.vdim);
    let inj = inject_spurious(&op, &v, lambda, a.eps, &policy)?;
    let plan = InjectionPlan {
        targets: vec![lambda],
        epsilon: a.eps,
        disks: vec![lambda],
        achieved: vec![inj],
    };
    let mut out = Outputs::new(&a.common.out)?;
    out.json("plan.json", &plan)?;
    Ok(out.files)
}

/// Levels of a spectrum CSV with a `s` or `n` column; rows flagged
/// `retained=false` are skipped.
pub(crate) fn read_levels(path: &Path) -> Result<Vec<(f64, Vec<Complex64>)>, CliError> {
    let parse = |e: csv::Error| CliError::Parse(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(parse)?;
    let headers = rdr.headers().map_err(parse)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let level_col = col("s")
        .or_else(|| col("n"))
        .ok_or_else(|| CliError::Parse("spectrum CSV needs an 's' or 'n' column".into()))?;
    let (re_col, im_col) = match (col("re"), col("im")) {
        (Some(r), Some(i)) => (r, i),
        _ => return Err(CliError::Parse("spectrum CSV needs 're' and 'im' columns".into())),
    };
    let keep_col = col("retained");
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, (f64, Vec<Complex64>)> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse)?;
        let num = |k: usize| -> Result<f64, CliError> {
            rec[k].parse::<f64>().map_err(|_| CliError::Parse(format!("not a number: '{}'", &rec[k])))
        };
        if let Some(k) = keep_col {
            if &rec[k] == "false" {
                continue;
            }
        }
        let key = rec[level_col].to_string();
        let z = Complex64::new(num(re_col)?, num(im_col)?);
        if !groups.contains_key(&key) {
            order.push(key.clone());
            groups.insert(key.clone(), (num(level_col)?, Vec::new()));
        }
        groups.get_mut(&key).expect("inserted").1.push(z);
    }
    Ok(order.into_iter().map(|k| groups.remove(&k).expect("present")).collect())
}

fn read_points(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let parse = |e: csv::Error| CliError::Parse(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(parse)?;
    let mut points = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        let (re, im) = rec.map_err(parse)?;
        points.push(Complex64::new(re, im));
    }
    Ok(points)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Vec<String>, CliError> {
    let levels = read_levels(&a.spectra)?;
    let region_text = fs::read_to_string(&a.region)?;
    let region: ConvexRegion =
        serde_json::from_str(&region_text).map_err(|e| CliError::Parse(format!("{}: {e}", a.region.display())))?;
    let exact = a.exact.as_deref().map(read_points).transpose()?;
    let points = track(&levels, a.radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = classify(&points, &region, a.region.display().to_string(), exact.as_deref(), a.margin);
    let mut out = Outputs::new(&a.out)?;
    out.json("report.json", &report)?;
    Ok(out.files)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("SPECPOL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SPECPOL_THREADS must be a positive integer, got '{value}'")))?;
    // A pool may already exist when `run` is called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Vec<String>, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Numrange(a) => cmd_numrange(a),
        Command::Essrange(a) => cmd_essrange(a),
        Command::Galerkin(a) => cmd_galerkin(a),
        Command::Truncate(a) => cmd_truncate(a),
        Command::Inject(a) => cmd_inject(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Scenario(a) => scenario::cmd_scenario(&a.name, a.config.as_deref(), &a.set, &a.out_dir),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(files) => {
            for f in files {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            eprintln!("specpol: {e}");
            e.exit_code()
        }
    }
}
