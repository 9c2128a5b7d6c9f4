//! The `tempered` command line: distance queries, figure data and experiments.
//!
//! Every subcommand writes CSV (or a JSON array of the same records with `--json`) to
//! `--out` or standard output. Exit codes: 0 on success, 1 on a usage error, 2 on a
//! numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diffapprox::{relative_error_histogram, SmoothingConfig};
use crate::embed::{
    compare_geometries, generate_dataset, DatasetSource, EmbedConfig, GeometryKind,
};
use crate::error::Error;
use crate::hypmodels::{fractional_point, DiskPoint, Model};
use crate::talgebra::{log_t, Temperature};
use crate::tcalculus::{
    const_t_derivative_solution, t_derivative, t_geodesic_point, t_integral_numeric, t_length,
    Curve, DERIVATIVE_STEP,
};
use crate::temparam::CoSimplexPoint;
use crate::tgeometry::{
    sample_balls, sample_bisector, t_funk_cosimplex, t_funk_domain, t_hilbert_cosimplex,
    t_hilbert_raw, BallKind, ConvexDomain, DEFAULT_RESOLUTION, IN_EQUALITY_REGION, ON_BISECTOR,
};

const DEFAULT_DELTA_STR: &str = "0.02";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tempered",
    version,
    about = "Tempered Funk/Hilbert geometry toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tempered Hilbert (or Funk) distance between two positive vectors.
    Dist(DistArgs),
    /// Nested tempered Hilbert balls on a grid over the 2-simplex.
    Balls(BallsArgs),
    /// Bisector and t-triangle-equality region of two sites on the 2-simplex.
    Bisector(BisectorArgs),
    /// Histogram of the relative error of the differentiable Hilbert distance.
    ApproxError(ApproxArgs),
    /// Final embedding losses of a dataset in the four geometries.
    Embed(EmbedArgs),
    /// Numerical checks of the tempered calculus.
    CalculusCheck(CalculusArgs),
    /// Fractional points along tempered Klein and Poincaré geodesics.
    Models(ModelsArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Emit a JSON array instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Metric {
    Hilbert,
    Funk,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_parser = parse_vector, allow_negative_numbers = true)]
    pub p: Vector,
    #[arg(long, value_parser = parse_vector, allow_negative_numbers = true)]
    pub q: Vector,
    /// Use the vectors as given instead of normalizing them to the co-simplex.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, value_enum, default_value_t = Metric::Hilbert)]
    pub metric: Metric,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Surface {
    /// Co-density coordinates on the simplex.
    Hilbert,
    /// Constrained natural coordinates.
    Nh,
}

#[derive(Debug, Args)]
pub struct BallsArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Centre as a positive 3-vector (normalized); defaults to the barycentre.
    #[arg(long, value_parser = parse_vector)]
    pub center: Option<Vector>,
    #[arg(long, value_parser = parse_vector, default_value = "0.5,1,2")]
    pub radius_list: Vector,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Surface::Hilbert)]
    pub surface: Surface,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BisectorArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_parser = parse_vector, default_value = "0.2,0.3,0.5")]
    pub p: Vector,
    #[arg(long, value_parser = parse_vector, default_value = "0.6,0.3,0.1")]
    pub q: Vector,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long, default_value_t = 1.2, allow_negative_numbers = true)]
    pub t: f64,
    /// Smoothing factor of the tempered log-sum-exp.
    #[arg(long = "T", default_value_t = 10.0)]
    pub smoothing: f64,
    /// Mismatched max temperature `1 − δ`; a bare `--delta` uses the default mismatch.
    #[arg(long, default_value_t = 0.0, num_args = 0..=1, default_missing_value = DEFAULT_DELTA_STR)]
    pub delta: f64,
    /// Dimension of the sampled co-simplex points.
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DatasetKind {
    Points,
    Er,
    Ba,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Flat `key = value` file of flags; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DatasetKind::Er)]
    pub dataset: DatasetKind,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Edge probability of the Erdős–Rényi graph.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Attachment count of the Barabási–Albert graph.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Ambient dimension of the random points.
    #[arg(long, default_value_t = 50)]
    pub ambient_dim: usize,
    #[arg(long, value_parser = parse_dims, default_value = "3,5,8")]
    pub dims: Dims,
    /// Temperature of the tempered Hilbert geometry.
    #[arg(long, default_value_t = 1.2, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Initial smoothing factor for the Hilbert geometries.
    #[arg(long = "T")]
    pub smoothing: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CalculusArgs {
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub t: f64,
    /// Cell counts for the numeric t-integral of 1/x on [1, 2].
    #[arg(long, value_parser = parse_dims, default_value = "10,100,1000,10000")]
    pub cells: Dims,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelChoice {
    Klein,
    Poincare,
    Both,
}

#[derive(Debug, Args)]
pub struct ModelsArgs {
    #[arg(long, value_parser = parse_vector, default_value = "0.8,1,1.2", allow_negative_numbers = true)]
    pub t_list: Vector,
    #[arg(long, value_parser = parse_vector, default_value = "0.2,0.5")]
    pub alphas: Vector,
    /// Start point in the unit disk.
    #[arg(long, value_parser = parse_vector, default_value = "0,0", allow_negative_numbers = true)]
    pub r: Vector,
    /// End point in the unit disk.
    #[arg(long, value_parser = parse_vector, default_value = "0.8,0.3", allow_negative_numbers = true)]
    pub s: Vector,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
    #[command(flatten)]
    pub output: Output,
}

/// A comma-separated list of reals.
pub type Vector = Vec<f64>;
/// A comma-separated list of positive integers.
pub type Dims = Vec<usize>;

fn parse_vector(s: &str) -> Result<Vector, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    s.split(',')
        .map(|x| match x.trim().parse::<usize>() {
            Ok(0) => Err("entries must be positive".to_string()),
            Ok(v) => Ok(v),
            Err(e) => Err(format!("`{x}`: {e}")),
        })
        .collect()
}

fn temperature(t: f64) -> Result<Temperature, CliError> {
    Temperature::new(t).map_err(|e| CliError::Usage(e.to_string()))
}

/// Writes `rows` as CSV with a header, or as a JSON array.
fn emit<T: Serialize>(rows: &[T], output: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    if output.json {
        serde_json::to_writer_pretty(&mut buf, rows)?;
        buf.push(b'\n');
    } else {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        drop(w);
    }
    match &output.out {
        Some(path) => fs::write(path, buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct DistRow {
    metric: &'static str,
    t: f64,
    value: f64,
}

fn dist(args: &DistArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let (p, q) = (&args.p, &args.q);
    let value = if args.raw {
        if p.len() != q.len() {
            return Err(Error::Dimension {
                op: "dist",
                left: p.len(),
                right: q.len(),
            }
            .into());
        }
        if let Some(v) = p.iter().chain(q).find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::domain("dist", format!("entry {v} is not positive")).into());
        }
        match args.metric {
            Metric::Hilbert => t_hilbert_raw(p, q, temp),
            Metric::Funk => {
                let hi = p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| a.ln() - b.ln())
                    .fold(f64::NEG_INFINITY, f64::max);
                temp.log_exp(hi)
            }
        }
    } else {
        let (p, q) = (
            CoSimplexPoint::from_raw(p, temp)?,
            CoSimplexPoint::from_raw(q, temp)?,
        );
        match args.metric {
            Metric::Hilbert => t_hilbert_cosimplex(&p, &q)?,
            Metric::Funk => t_funk_cosimplex(&p, &q)?,
        }
    };
    if args.output.json {
        let row = DistRow {
            metric: match args.metric {
                Metric::Hilbert => "hilbert",
                Metric::Funk => "funk",
            },
            t: args.t,
            value,
        };
        return emit(&[row], &args.output, stdout);
    }
    let line = format!("{value}\n");
    match &args.output.out {
        Some(path) => fs::write(path, line)?,
        None => stdout.write_all(line.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct CellRow {
    x: f64,
    y: f64,
    value: f64,
}

fn three_point(v: &[f64], temp: Temperature) -> Result<CoSimplexPoint, CliError> {
    if v.len() != 3 {
        return Err(CliError::Usage(format!(
            "simplex sites need 3 components, got {}",
            v.len()
        )));
    }
    Ok(CoSimplexPoint::from_raw(v, temp)?)
}

fn balls(args: &BallsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let center = match &args.center {
        Some(c) => three_point(c, temp)?,
        None => CoSimplexPoint::uniform(3, temp)?,
    };
    let kind = match args.surface {
        Surface::Hilbert => BallKind::HilbertDomain,
        Surface::Nh => BallKind::NhSurface,
    };
    let cells = sample_balls(&center, &args.radius_list, args.grid, kind)?;
    let rows: Vec<CellRow> = cells
        .into_iter()
        .map(|c| CellRow {
            x: c.x,
            y: c.y,
            value: c.value,
        })
        .collect();
    emit(&rows, &args.output, stdout)
}

#[derive(Serialize)]
struct BisectorRow {
    x: f64,
    y: f64,
    bisector: u8,
    equality: u8,
}

fn bisector(args: &BisectorArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let (p, q) = (three_point(&args.p, temp)?, three_point(&args.q, temp)?);
    let sample = sample_bisector(&p, &q, args.grid)?;
    let rows: Vec<BisectorRow> = sample
        .cells
        .iter()
        .filter(|c| c.value != 0.0)
        .map(|c| {
            let code = c.value as u8;
            BisectorRow {
                x: c.x,
                y: c.y,
                bisector: code & ON_BISECTOR,
                equality: (code & IN_EQUALITY_REGION) >> 1,
            }
        })
        .collect();
    emit(&rows, &args.output, stdout)
}

#[derive(Serialize)]
struct BinRow {
    bin: f64,
    count: u64,
}

fn approx_error(args: &ApproxArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let cfg = SmoothingConfig::new(args.smoothing, args.delta)?;
    let hist = relative_error_histogram(args.pairs, args.d, temp, cfg, args.seed)?;
    let rows: Vec<BinRow> = hist
        .bins
        .iter()
        .zip(&hist.counts)
        .map(|(&bin, &count)| BinRow { bin, count })
        .collect();
    emit(&rows, &args.output, stdout)
}

/// Turns `key = value` lines into `--key value` arguments.
fn config_args(path: &PathBuf) -> Result<Vec<OsString>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config {}:{}: expected key = value",
                path.display(),
                no + 1
            )));
        };
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(CliError::Usage("config files cannot nest".into()));
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={value}").into()),
        }
    }
    Ok(out)
}

fn embed(args: &EmbedArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let source = match args.dataset {
        DatasetKind::Points => DatasetSource::RandomPoints {
            n: args.n,
            ambient_dim: args.ambient_dim,
        },
        DatasetKind::Er => DatasetSource::ErdosRenyi {
            n: args.n,
            p: args.p,
        },
        DatasetKind::Ba => DatasetSource::BarabasiAlbert {
            n: args.n,
            m: args.m,
        },
    };
    let data = generate_dataset(&source, args.seed)?;
    let defaults = EmbedConfig::default();
    let config = EmbedConfig {
        iters: args.iters.unwrap_or(defaults.iters),
        restarts: args.restarts.unwrap_or(defaults.restarts),
        learning_rate: args.lr.unwrap_or(defaults.learning_rate),
        smoothing: args.smoothing.unwrap_or(defaults.smoothing),
        seed: args.seed,
        ..defaults
    };
    let rows = compare_geometries(&data, &args.dims, &GeometryKind::all(temp), &config)?;
    emit(&rows, &args.output, stdout)
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    t: f64,
    param: f64,
    value: f64,
    expected: f64,
    abs_error: f64,
}

impl CheckRow {
    fn new(check: &'static str, t: f64, param: f64, value: f64, expected: f64) -> Self {
        CheckRow {
            check,
            t,
            param,
            value,
            expected,
            abs_error: (value - expected).abs(),
        }
    }
}

fn calculus_check(args: &CalculusArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let temp = temperature(args.t)?;
    let t = args.t;
    let mut rows = Vec::new();
    for x in [0.5, 1.0, 2.0, 4.0] {
        let d = t_derivative(|u| temp.log(u), x, temp, DERIVATIVE_STEP)?;
        rows.push(CheckRow::new("t_derivative_log_t", t, x, d, 1.0 / x));
    }
    let k = 0.7;
    let f = const_t_derivative_solution(k, temp);
    for x in [0.25, 0.5, 1.0] {
        rows.push(CheckRow::new(
            "constant_t_derivative",
            t,
            x,
            t_derivative(&f, x, temp, DERIVATIVE_STEP)?,
            k,
        ));
    }
    let exact = log_t(2.0, temp)?;
    for &n in &args.cells {
        let v = t_integral_numeric(|x| 1.0 / x, 1.0, 2.0, temp, n)?;
        rows.push(CheckRow::new("t_integral_inv_x", t, n as f64, v, exact));
    }
    let disk = ConvexDomain::unit_ball(2);
    let (r, s) = (vec![-0.2, 0.1], vec![0.5, 0.3]);
    let n = 100_000;
    let length = t_length(&disk, &Curve::segment(r.clone(), s.clone()), temp, n)?;
    rows.push(CheckRow::new(
        "ray_t_length",
        t,
        n as f64,
        length,
        t_funk_domain(&disk, &r, &s, temp)?,
    ));
    let xi = vec![0.6, -0.8];
    for tau in [0.25, 0.5, 1.0] {
        let x = t_geodesic_point(&disk, &r, &xi, tau, temp)?;
        rows.push(CheckRow::new(
            "geodesic_unit_speed",
            t,
            tau,
            t_funk_domain(&disk, &r, &x, temp)?,
            tau,
        ));
    }
    emit(&rows, &args.output, stdout)
}

#[derive(Serialize)]
struct ModelRow {
    model: &'static str,
    t: f64,
    alpha: f64,
    x: f64,
    y: f64,
}

fn models(args: &ModelsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.r.len() != 2 || args.s.len() != 2 {
        return Err(CliError::Usage(
            "--r and --s must be points of the plane".into(),
        ));
    }
    let (r, s) = (
        DiskPoint::new(args.r.clone())?,
        DiskPoint::new(args.s.clone())?,
    );
    let chosen: &[Model] = match args.model {
        ModelChoice::Klein => &[Model::Klein],
        ModelChoice::Poincare => &[Model::Poincare],
        ModelChoice::Both => &[Model::Klein, Model::Poincare],
    };
    let mut rows = Vec::new();
    for &model in chosen {
        for &t in &args.t_list {
            let temp = temperature(t)?;
            for &alpha in &args.alphas {
                let x = fractional_point(&r, &s, alpha, temp, model)?;
                rows.push(ModelRow {
                    model: model.name(),
                    t,
                    alpha,
                    x: x.coords()[0],
                    y: x.coords()[1],
                });
            }
        }
    }
    emit(&rows, &args.output, stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Dist(a) => dist(a, stdout),
        Command::Balls(a) => balls(a, stdout),
        Command::Bisector(a) => bisector(a, stdout),
        Command::ApproxError(a) => approx_error(a, stdout),
        Command::Embed(a) => embed(a, stdout),
        Command::CalculusCheck(a) => calculus_check(a, stdout),
        Command::Models(a) => models(a, stdout),
    }
}

/// Inserts the entries of an `embed --config` file right after the subcommand, so that
/// flags given on the command line override them.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(sub) = argv.iter().position(|a| a == "embed") else {
        return Ok(argv);
    };
    let mut path = None;
    for (i, a) in argv.iter().enumerate().skip(sub + 1) {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let extra = config_args(&path)?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

fn subcommand_help(argv: &[OsString]) -> String {
    let mut cmd = Cli::command();
    let name = argv.iter().skip(1).find_map(|a| {
        let a = a.to_string_lossy();
        cmd.get_subcommands()
            .any(|s| s.get_name() == a)
            .then(|| a.into_owned())
    });
    match name.and_then(|n| cmd.find_subcommand_mut(&n).cloned()) {
        Some(mut sub) => sub.render_help().to_string(),
        None => cmd.render_help().to_string(),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let expanded = match expand_config(argv.clone()) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::command()
        .args_override_self(true)
        .try_get_matches_from(&expanded)
    {
        Ok(m) => match <Cli as clap::FromArgMatches>::from_arg_matches(&m) {
            Ok(cli) => cli,
            Err(e) => {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
        },
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}\n{}", e.render(), subcommand_help(&argv));
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Numerical(_) = e {
                let inputs: Vec<_> = argv.iter().skip(1).map(|a| a.to_string_lossy()).collect();
                let _ = writeln!(stderr, "inputs: {}", inputs.join(" "));
            }
            e.exit_code()
        }
    }
}
