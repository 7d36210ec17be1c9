//! Command-line front end. Reports go to stdout as `key=value` lines; a
//! failure prints one `error=<kind> reason=<message>` line on stderr and
//! exits with 2 (bad input or configuration) or 3 (numerical failure).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::benchgen::{demo_system, random_rayleigh_system, GeneratorSpec};
use crate::error::{Error, Result};
use crate::io::{
    model_from_json, model_to_json, read_samples, write_bode, write_samples,
    write_singular_values, write_sweep, BodeRow, Model,
};
use crate::linalg::{rank_from_sigmas, singular_values, Truncation, DEFAULT_RANK_TOL};
use crate::loewner_fo::{build_fo_loewner, fo_sylvester_residuals, identify_fo, FoMode};
use crate::loewner_so::{build_so_loewner, identify_so_reduced, so_sylvester_residuals, REALIFY_TOL};
use crate::paramfit::{grid_search, ParamGrid, Spacing, DEFAULT_GRID_SIZE, DEFAULT_OBJECTIVE_TOL};
use crate::sampling::{
    conjugate_close, log_imaginary_points, logspace, partition, sample_transfer,
    PartitionStrategy, SampleSet,
};
use crate::systems::{DampingParams, TransferFunction};

#[derive(Debug, Parser)]
#[command(name = "soloewner", version, about = "Loewner identification of Rayleigh-damped second-order systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Identify a model from frequency samples and write it as JSON.
    Identify(IdentifyArgs),
    /// Write the relative singular values of the Loewner matrices.
    Rank(RankArgs),
    /// Grid search for the damping coefficients.
    Sweep(SweepArgs),
    /// Frequency response of a model, optionally against a second one.
    Eval(EvalArgs),
    /// Random Rayleigh-damped model.
    Gen(GenArgs),
    /// The two-mass demo model and its samples.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Samples CSV (`s_re,s_im,h_re,h_im`).
    #[arg(long, value_name = "PATH")]
    pub samples: PathBuf,
    /// Add the conjugate of every sample first.
    #[arg(long)]
    pub close_conjugates: bool,
    #[arg(long, value_name = "interleave|half", default_value = "interleave")]
    pub partition: PartitionStrategy,
}

#[derive(Debug, Args)]
pub struct DampingArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl DampingArgs {
    fn optional(&self) -> Result<Option<DampingParams>> {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => DampingParams::new(a, b).map(Some),
            (None, None) => Ok(None),
            _ => Err(Error::MissingDamping),
        }
    }

    fn required(&self) -> Result<DampingParams> {
        self.optional()?.ok_or(Error::MissingDamping)
    }
}

#[derive(Debug, Args)]
pub struct TruncArgs {
    /// Fixed reduced order.
    #[arg(long, conflicts_with = "tol")]
    pub order: Option<usize>,
    /// Relative singular-value cutoff.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl TruncArgs {
    fn mode(&self, default_tol: f64) -> Truncation {
        match self.order {
            Some(r) => Truncation::Order(r),
            None => Truncation::Tolerance(self.tol.unwrap_or(default_tol)),
        }
    }
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub input: SampleArgs,
    #[command(flatten)]
    pub damping: DampingArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// Real realization (needs conjugate-closed data).
    #[arg(long)]
    pub real: bool,
    /// Classical first-order Loewner model instead; damping is ignored.
    #[arg(long)]
    pub first_order: bool,
    /// Model JSON destination.
    #[arg(long, value_name = "PATH", default_value = "model.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: SampleArgs,
    #[command(flatten)]
    pub damping: DampingArgs,
    /// Cutoff used for the reported ranks.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    /// Directory for `sv_fo.csv` and `sv_so.csv`.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: SampleArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[arg(long, value_name = "A:B")]
    pub alpha_range: String,
    #[arg(long, value_name = "A:B")]
    pub beta_range: String,
    /// Grid shape, alpha values by beta values.
    #[arg(long, value_name = "NxM")]
    pub grid: Option<String>,
    /// Force logarithmic spacing (otherwise chosen from the ranges).
    #[arg(long)]
    pub log_grid: bool,
    /// Test share of the samples.
    #[arg(long, default_value_t = 0.2)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sweep CSV destination.
    #[arg(long, value_name = "PATH", default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model JSON; give it twice to add the pointwise error column.
    #[arg(long, value_name = "PATH", required = true, num_args = 1, action = clap::ArgAction::Append)]
    pub model: Vec<PathBuf>,
    #[command(flatten)]
    pub freq: FreqArgs,
    /// Bode CSV destination.
    #[arg(long, value_name = "PATH", default_value = "bode.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[arg(long, default_value_t = 0.1)]
    pub wmin: f64,
    #[arg(long, default_value_t = 10.0)]
    pub wmax: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

impl FreqArgs {
    fn validate(&self) -> Result<()> {
        if !(self.wmin > 0.0 && self.wmin.is_finite() && self.wmax.is_finite() && self.wmin <= self.wmax) {
            return Err(Error::Parse(format!(
                "frequency range [{}, {}] must satisfy 0 < wmin <= wmax",
                self.wmin, self.wmax
            )));
        }
        if self.points == 0 {
            return Err(Error::Parse("--points must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of degrees of freedom.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.02)]
    pub beta: f64,
    /// Model JSON destination.
    #[arg(long, value_name = "PATH", default_value = "model.json")]
    pub out: PathBuf,
    /// Also write samples of the model here.
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
    #[command(flatten)]
    pub freq: FreqArgs,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Number of samples.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.1)]
    pub wmin: f64,
    #[arg(long, default_value_t = 10.0)]
    pub wmax: f64,
    /// Samples CSV destination.
    #[arg(long, value_name = "PATH", default_value = "samples.csv")]
    pub out: PathBuf,
    /// Also write the demo model JSON here.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}

/// Parses `args` (program name first), executes the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = writeln!(err, "error=usage reason={}", first_line(&text));
            }
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error={} reason={}", e.kind(), e);
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

fn first_line(text: &str) -> &str {
    text.lines()
        .map(|l| l.trim_start_matches("error: ").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("invalid arguments")
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Identify(a) => identify(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Demo(a) => demo(a, out),
    }
}

fn load_samples(args: &SampleArgs) -> Result<SampleSet> {
    let file = File::open(&args.samples)
        .map_err(|e| Error::Io(format!("{}: {e}", args.samples.display())))?;
    let data = read_samples(file)?;
    if args.close_conjugates {
        conjugate_close(&data)
    } else {
        Ok(data)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

fn relative(sigmas: &[f64]) -> Vec<f64> {
    match sigmas.first() {
        Some(&s1) if s1 > 0.0 => sigmas.iter().map(|s| s / s1).collect(),
        _ => Vec::new(),
    }
}

/// Largest `|H(s) - h| / max(|h|, tiny)` over the samples.
fn max_residual<T: TransferFunction + ?Sized>(model: &T, data: &SampleSet) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in data.samples() {
        let h = model.transfer(s.point)?;
        worst = worst.max((h - s.value).norm() / s.value.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

fn identify(args: &IdentifyArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_samples(&args.input)?;
    let pd = partition(&data, args.input.partition)?;
    let mode = args.trunc.mode(DEFAULT_RANK_TOL);
    let (model, trunc, syl) = if args.first_order {
        if args.real {
            return Err(Error::Parse("--real applies to second-order models only".into()));
        }
        let pair = build_fo_loewner(&pd)?;
        let syl = fo_sylvester_residuals(&pair);
        let trunc = crate::linalg::truncate_pencil(&pair.l, &pair.ls, mode)?;
        let sys = identify_fo(&pair, FoMode::Reduced(mode))?;
        (Model::Fo(sys), trunc, syl)
    } else {
        let params = args.damping.required()?;
        let sd = build_so_loewner(&pd, params)?;
        let syl = so_sylvester_residuals(&sd)?;
        let (sys, trunc) = if args.real {
            let (sys, trunc) = identify_so_reduced(&sd.realified()?, mode)?;
            (sys.into_real(REALIFY_TOL)?, trunc)
        } else {
            identify_so_reduced(&sd, mode)?
        };
        (Model::So(sys), trunc, syl)
    };
    let residual = max_residual(&model, &data)?;
    if !residual.is_finite() {
        return Err(Error::NonFiniteResult("model residual".into()));
    }
    write_text(&args.out, &model_to_json(&model)?)?;
    writeln!(out, "kind={}", if args.first_order { "fo" } else { "so" })?;
    writeln!(out, "samples={}", data.len())?;
    writeln!(out, "order={}", model.order())?;
    if let Some((r_row, r_col)) = trunc.rank_mismatch {
        writeln!(out, "rank_mismatch={r_row},{r_col}")?;
    }
    writeln!(out, "sigma_rel={}", join(&relative(&trunc.sigmas_row)))?;
    writeln!(out, "max_rel_residual={residual:?}")?;
    writeln!(out, "sylvester_l={:?}", syl.0)?;
    writeln!(out, "sylvester_ls={:?}", syl.1)?;
    writeln!(out, "model={}", args.out.display())?;
    Ok(())
}

fn rank(args: &RankArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(Error::InvalidTolerance(args.tol));
    }
    let params = args.damping.optional()?;
    let data = load_samples(&args.input)?;
    let pd = partition(&data, args.input.partition)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;

    let pair = build_fo_loewner(&pd)?;
    let sv_fo = singular_values(&pair.l);
    let path = args.out.join("sv_fo.csv");
    write_singular_values(create(&path)?, &sv_fo)?;
    report_rank(out, "fo", &sv_fo, args.tol)?;

    if let Some(params) = params {
        let sd = build_so_loewner(&pd, params)?;
        let sv_so = singular_values(&sd.l);
        write_singular_values(create(&args.out.join("sv_so.csv"))?, &sv_so)?;
        report_rank(out, "so", &sv_so, args.tol)?;
    }
    Ok(())
}

fn report_rank(out: &mut dyn Write, tag: &str, sigmas: &[f64], tol: f64) -> Result<()> {
    let rank = rank_from_sigmas(sigmas, tol);
    writeln!(out, "rank_{tag}={rank}")?;
    if rank == 0 {
        writeln!(out, "note_{tag}=zero matrix, only sigma_1 written")?;
    } else if let Some(s2) = relative(sigmas).get(1) {
        writeln!(out, "sigma2_rel_{tag}={s2:?}")?;
    }
    Ok(())
}

fn parse_range(flag: &str, text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("--{flag} expects A:B with A <= B, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_grid(text: Option<&str>) -> Result<(usize, usize)> {
    let Some(text) = text else {
        return Ok((DEFAULT_GRID_SIZE, DEFAULT_GRID_SIZE));
    };
    let bad = || Error::Parse(format!("--grid expects NxM, got {text:?}"));
    let (n, m) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(bad());
    }
    Ok((n, m))
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let alpha = parse_range("alpha-range", &args.alpha_range)?;
    let beta = parse_range("beta-range", &args.beta_range)?;
    let (na, nb) = parse_grid(args.grid.as_deref())?;
    let spacing = args.log_grid.then_some(Spacing::Log);
    let grid = ParamGrid::from_ranges(alpha, beta, na, nb, spacing)?;
    let data = load_samples(&args.input)?;
    let mode = args.trunc.mode(DEFAULT_OBJECTIVE_TOL);
    let result = grid_search(&data, &grid, args.split, args.seed, mode)?;
    write_sweep(create(&args.out)?, &result)?;
    let failed = result.surface.iter().filter(|c| c.j.is_none()).count();
    writeln!(
        out,
        "alpha*={:?}, beta*={:?}, J={:?}",
        result.best_alpha, result.best_beta, result.best_j
    )?;
    writeln!(out, "cells={}", result.surface.len())?;
    writeln!(out, "failed={failed}")?;
    writeln!(out, "split_seed={}", result.split_seed)?;
    Ok(())
}

fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    model_from_json(&text)
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    args.freq.validate()?;
    if args.model.len() > 2 {
        return Err(Error::Parse("--model given more than twice".into()));
    }
    let model = load_model(&args.model[0])?;
    let reference = args.model.get(1).map(|p| load_model(p)).transpose()?;
    let freqs = logspace(args.freq.wmin, args.freq.wmax, args.freq.points);
    let mut rows = Vec::with_capacity(freqs.len());
    let (mut max_err, mut max_ref) = (0.0f64, 0.0f64);
    for w in freqs {
        let s = crate::Complex64::new(0.0, w);
        let h = model.transfer(s)?;
        let abs_err = match &reference {
            Some(r) => {
                let g = r.transfer(s)?;
                max_ref = max_ref.max(g.norm());
                Some((h - g).norm())
            }
            None => None,
        };
        if let Some(e) = abs_err {
            max_err = max_err.max(e);
        }
        rows.push(BodeRow { freq: w, h, abs_err });
    }
    write_bode(create(&args.out)?, &rows)?;
    writeln!(out, "points={}", rows.len())?;
    writeln!(out, "order={}", model.order())?;
    if reference.is_some() {
        writeln!(out, "max_abs_err={max_err:?}")?;
        writeln!(out, "max_rel_err={:?}", max_err / max_ref.max(f64::MIN_POSITIVE))?;
    }
    writeln!(out, "bode={}", args.out.display())?;
    Ok(())
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let params = DampingParams::new(args.alpha, args.beta)?;
    if args.samples.is_some() {
        args.freq.validate()?;
    }
    let sys = random_rayleigh_system(&GeneratorSpec::new(args.n, params, args.seed))?;
    let model = Model::So(sys);
    write_text(&args.out, &model_to_json(&model)?)?;
    writeln!(out, "order={}", model.order())?;
    writeln!(out, "model={}", args.out.display())?;
    if let Some(path) = &args.samples {
        let pts = log_imaginary_points(args.freq.wmin, args.freq.wmax, args.freq.points);
        write_samples(create(path)?, &sample_transfer(&model, &pts)?)?;
        writeln!(out, "samples={}", path.display())?;
    }
    Ok(())
}

fn demo(args: &DemoArgs, out: &mut dyn Write) -> Result<()> {
    FreqArgs {
        wmin: args.wmin,
        wmax: args.wmax,
        points: args.samples,
    }
    .validate()?;
    let sys = demo_system();
    let data = sample_transfer(&sys, &log_imaginary_points(args.wmin, args.wmax, args.samples))?;
    write_samples(create(&args.out)?, &data)?;
    writeln!(out, "samples={}", data.len())?;
    writeln!(out, "out={}", args.out.display())?;
    if let Some(path) = &args.model {
        write_text(path, &model_to_json(&Model::So(sys))?)?;
        writeln!(out, "model={}", path.display())?;
    }
    Ok(())
}
