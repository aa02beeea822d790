//! Command-line front end: enumeration, series extension, asymptotic analysis
//! and regression checks.
//!
//! Exit codes: 0 success, 2 usage error, 3 malformed input, 4 resource
//! limit, 5 verification failure, 1 anything else.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use twostack::analysis::{
    self, analysis_csv, extrapolate, gradient_estimator, lambda_estimator,
    linear_intercepts, quotient_ratios, ratios, ratios_with_tail, sensitivity_windows,
    window_sensitivity, AnalysisError, PipelineOptions, RatioSequence, ReferenceSeries,
    DEFAULT_WINDOW,
};
use twostack::approximant::{
    config_family, predict_ensemble, predict_ratios_ensemble, ApproximantError, DAConfig,
    DEFAULT_TRIM,
};
use twostack::enumerator::{
    achievable_series, increment_avoiding_series, EnumError, Limits, SeriesOptions,
    DEFAULT_START_LEN,
};
use twostack::series::{binomial_transform, inverse_binomial_transform, SeriesError};
use twostack::table::{EstimateTable, TableError};
use twostack::{real, Approx, Series};

pub mod manifest;
pub mod verify;

use manifest::RunManifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    ResourceLimit(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::ResourceLimit(_) => 4,
            CliError::Verification(_) => 5,
            CliError::Other(_) => 1,
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::ResourceLimit { .. } => CliError::ResourceLimit(e.to_string()),
            EnumError::TooLarge(_) | EnumError::InvalidShard(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ApproximantError> for CliError {
    fn from(e: ApproximantError) -> Self {
        match e {
            ApproximantError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            AnalysisError::NonPositiveReference(_) => CliError::Input(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "twostack", version, about = "Permutations sortable by two stacks in series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count achievable permutations exactly for n = 0..=N.
    Enumerate(EnumerateArgs),
    /// Binomial transform between increment-avoiding and full counts.
    Transform(TransformArgs),
    /// Predict further coefficients with an ensemble of differential approximants.
    Extend(ExtendArgs),
    /// Predict further ratios s_n/s_{n-1} with an ensemble of differential approximants.
    RatiosPredict(ExtendArgs),
    /// Ratio-method analysis of a series.
    Analyze(AnalyzeArgs),
    /// Recompute a shipped reference result and compare.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Counts {
    Achievable,
    IncrementAvoiding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Count increment-avoiding permutations and transform.
    Transform,
    /// Count every achievable permutation.
    Direct,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    /// Largest permutation length.
    #[arg(long)]
    n: usize,
    /// Shard prefix length [default: min(6, n - 1)].
    #[arg(long)]
    start_len: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "achievable")]
    counts: Counts,
    #[arg(long, value_enum, default_value = "transform")]
    method: Method,
    /// Most permutations one shard may store before giving up.
    #[arg(long)]
    max_stored: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    /// Increment-avoiding counts to all counts.
    Forward,
    /// All counts to increment-avoiding counts.
    Inverse,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    series: PathBuf,
    #[arg(long, value_enum, default_value = "forward")]
    direction: Direction,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtendArgs {
    #[arg(long)]
    series: PathBuf,
    /// Approximant orders to include.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    orders: Vec<usize>,
    /// Number of terms to predict.
    #[arg(long, default_value_t = 10)]
    predict: usize,
    /// Fraction dropped from each end before averaging.
    #[arg(long, default_value_t = DEFAULT_TRIM)]
    trim: f64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Ratios r_n, with the intercept extrapolation of μ.
    Ratios,
    /// Linear intercepts n r_n − (n−1) r_{n−1}.
    Intercepts,
    /// Gradient estimators of the exponent at a given μ.
    Gradient,
    /// Ratios of the quotient with a reference series.
    Quotient,
    /// Growth-rate ratio from two references sharing μ.
    Lambda,
    /// Amplitude, estimating μ and g first unless given.
    Amplitude,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, value_enum, default_value = "ratios")]
    mode: Mode,
    /// Exact coefficients, one per line.
    #[arg(long)]
    series: PathBuf,
    /// Predicted coefficients continuing the series (CSV).
    #[arg(long, conflicts_with = "ratio_tail")]
    tail: Option<PathBuf>,
    /// Predicted ratios continuing the series (CSV).
    #[arg(long)]
    ratio_tail: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    /// Extrapolate in 1/n^p [default: 2 for intercepts, 1 otherwise].
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    /// Abscissa exponent for the gradient step of the amplitude pipeline.
    #[arg(long, default_value_t = 1.0)]
    gradient_exponent: f64,
    /// Reference series (quotient), or the first reference (lambda).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Second reference series (lambda).
    #[arg(long)]
    reference2: Option<PathBuf>,
    /// Growth rate shared by the references.
    #[arg(long)]
    ref_mu: Option<f64>,
    /// Exponent of the reference (quotient).
    #[arg(long, allow_hyphen_values = true)]
    ref_g: Option<f64>,
    /// Exponent of the first reference (lambda).
    #[arg(long, allow_hyphen_values = true)]
    g_d: Option<f64>,
    /// Exponent of the second reference (lambda).
    #[arg(long, allow_hyphen_values = true)]
    g_p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of: all, coefficients-small, s19-prediction, transforms,
    /// series-predictions, ratio-predictions, forbidden-words.
    fixture: String,
    #[arg(long)]
    workers: Option<usize>,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("twostack: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Enumerate(a) => enumerate(a),
        Command::Transform(a) => transform(a),
        Command::Extend(a) => extend(a, false),
        Command::RatiosPredict(a) => extend(a, true),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn workers(w: Option<usize>) -> Result<usize, CliError> {
    match w {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => Ok(w),
        None => Ok(default_workers()),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_series(path: &Path) -> Result<Series, CliError> {
    let name = path.file_stem().map_or("series".into(), |s| s.to_string_lossy().into_owned());
    Series::parse(name, &read_text(path)?).map_err(|e: SeriesError| {
        CliError::Input(format!("{}: {e}", path.display()))
    })
}

fn read_table(path: &Path) -> Result<EstimateTable, CliError> {
    EstimateTable::parse_csv(&read_text(path)?)
        .map_err(|e: TableError| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes `body` to `out` with its JSON sidecar, or to stdout.
fn emit(body: &str, out: Option<&Path>, mut manifest: RunManifest, start: Instant) -> Result<(), CliError> {
    let Some(out) = out else {
        print!("{body}");
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Other(format!("{}: {e}", out.display()));
    fs::write(out, body).map_err(io)?;
    manifest = manifest.output(out);
    manifest.finish(start.elapsed());
    fs::write(RunManifest::sidecar_path(out), manifest.to_json()).map_err(io)?;
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Other(format!("thread pool: {e}")))
}

fn enumerate(a: EnumerateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let workers = workers(a.workers)?;
    let start_len = a.start_len.unwrap_or(DEFAULT_START_LEN);
    let mut limits = Limits::default();
    if let Some(m) = a.max_stored {
        limits.max_stored = m;
    }
    let opts = SeriesOptions {
        start_len,
        workers,
        via_increment_avoiding: a.method == Method::Transform,
        limits,
    };
    let (s, what) = match a.counts {
        Counts::Achievable => (achievable_series(a.n, &opts)?, "achievable"),
        Counts::IncrementAvoiding => (increment_avoiding_series(a.n, &opts)?, "increment-avoiding"),
    };
    let method = match a.method {
        Method::Transform => "transform",
        Method::Direct => "direct",
    };
    let manifest = RunManifest::new("enumerate", workers)
        .param("n", a.n)
        .param("start-len", start_len)
        .param("counts", what)
        .param("method", method)
        .param("max-stored", limits.max_stored);
    let body = s.to_file_string(&manifest.header());
    emit(&body, a.out.as_deref(), manifest, start)
}

fn transform(a: TransformArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let s = read_series(&a.series)?;
    let (t, dir) = match a.direction {
        Direction::Forward => (binomial_transform(&s), "forward"),
        Direction::Inverse => (inverse_binomial_transform(&s), "inverse"),
    };
    let manifest = RunManifest::new("transform", 1)
        .param("direction", dir)
        .input(&a.series);
    let body = t.to_file_string(&manifest.header());
    emit(&body, a.out.as_deref(), manifest, start)
}

fn configs(orders: &[usize], len: usize) -> Result<Vec<DAConfig>, CliError> {
    let mut out = Vec::new();
    for &o in orders {
        if !(DAConfig::MIN_ORDER..=DAConfig::MAX_ORDER).contains(&o) {
            return Err(CliError::Usage(format!(
                "order {o} outside {}..={}",
                DAConfig::MIN_ORDER,
                DAConfig::MAX_ORDER
            )));
        }
        out.extend(config_family(o, len));
    }
    Ok(out)
}

fn extend(a: ExtendArgs, ratios: bool) -> Result<(), CliError> {
    let start = Instant::now();
    let workers = workers(a.workers)?;
    if a.predict == 0 {
        return Err(CliError::Usage("--predict must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&a.trim) {
        return Err(CliError::Usage(format!("--trim {} outside [0, 0.5)", a.trim)));
    }
    let s = read_series(&a.series)?;
    let cfgs = configs(&a.orders, s.exact.len())?;
    let table = pool(workers)?.install(|| {
        if ratios {
            predict_ratios_ensemble(&s, &cfgs, a.predict, a.trim)
        } else {
            predict_ensemble(&s, &cfgs, a.predict, a.trim)
        }
    })?;
    let orders: Vec<String> = a.orders.iter().map(|o| o.to_string()).collect();
    let manifest = RunManifest::new(if ratios { "ratios-predict" } else { "extend" }, workers)
        .param("orders", orders.join(","))
        .param("predict", a.predict)
        .param("trim", a.trim)
        .param("approximants", cfgs.len())
        .input(&a.series);
    let body = table.to_csv(&manifest.header());
    emit(&body, a.out.as_deref(), manifest, start)
}

/// The series, its ratios, and the input files they came from.
fn analysis_input(a: &AnalyzeArgs) -> Result<(Series, RatioSequence, Vec<PathBuf>), CliError> {
    let exact = read_series(&a.series)?;
    let mut inputs = vec![a.series.clone()];
    if let Some(p) = &a.ratio_tail {
        let t = read_table(p)?;
        inputs.push(p.clone());
        let s = analysis::extend_with_ratios(&exact, &t);
        return Ok((s, ratios_with_tail(&exact, &t), inputs));
    }
    let mut s = exact;
    if let Some(p) = &a.tail {
        let t = read_table(p)?;
        inputs.push(p.clone());
        let mut tail = Vec::new();
        for row in &t.rows {
            if row.n < s.exact.len() + tail.len() {
                continue;
            }
            if row.n != s.exact.len() + tail.len() {
                return Err(CliError::Input(format!(
                    "{}: tail skips index {}",
                    p.display(),
                    s.exact.len() + tail.len()
                )));
            }
            tail.push(Approx {
                value: row.value.clone(),
                std_dev: row.std_dev.clone(),
            });
        }
        s = s.with_tail(tail);
    }
    let r = ratios(&s);
    Ok((s, r, inputs))
}

fn need<T: Copy>(v: Option<T>, flag: &str, mode: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--mode {mode} requires {flag}")))
}

fn fmt(x: &real::Real) -> String {
    real::format_sci(x, 10)
}

fn summarise(name: &str, t: &EstimateTable, window: usize, exponent: f64) -> Vec<String> {
    let mut lines = Vec::new();
    match extrapolate(t, window, exponent) {
        Ok(fit) => lines.push(format!(
            "{name} extrapolated in 1/n^{exponent} over {} points: {} (slope {})",
            fit.points,
            fmt(&fit.intercept),
            fmt(&fit.slope)
        )),
        Err(e) => lines.push(format!("{name}: {e}")),
    }
    for (w, fit) in window_sensitivity(t, &sensitivity_windows(window), exponent) {
        match fit {
            Ok(f) => lines.push(format!("  window {w:>3}: {}", fmt(&f.intercept))),
            Err(e) => lines.push(format!("  window {w:>3}: {e}")),
        }
    }
    lines
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (s, r, inputs) = analysis_input(&a)?;
    let mut manifest = RunManifest::new("analyze", 1).param("window", a.window);
    for p in &inputs {
        manifest = manifest.input(p);
    }
    let (body, summary) = match a.mode {
        Mode::Ratios => {
            let p = a.exponent.unwrap_or(2.0);
            manifest = manifest.param("mode", "ratios").param("exponent", p);
            let summary = summarise("mu from linear intercepts", &linear_intercepts(&r), a.window, p);
            (r.to_csv(&manifest.header()), summary)
        }
        Mode::Intercepts => {
            let p = a.exponent.unwrap_or(2.0);
            manifest = manifest.param("mode", "intercepts").param("exponent", p);
            let t = linear_intercepts(&r);
            let summary = summarise("mu", &t, a.window, p);
            (analysis_csv(&t, "l_n", &manifest.header()), summary)
        }
        Mode::Gradient => {
            let mu = need(a.mu, "--mu", "gradient")?;
            let p = a.exponent.unwrap_or(1.0);
            manifest = manifest.param("mode", "gradient").param("mu", mu).param("exponent", p);
            let t = gradient_estimator(&r, &real::from_f64(mu))?;
            let summary = summarise("g", &t, a.window, p);
            (analysis_csv(&t, "g_n", &manifest.header()), summary)
        }
        Mode::Quotient => {
            let path = a.reference.clone().ok_or_else(|| {
                CliError::Usage("--mode quotient requires --reference".into())
            })?;
            let ref_mu = need(a.ref_mu, "--ref-mu", "quotient")?;
            let ref_g = need(a.ref_g, "--ref-g", "quotient")?;
            let p = a.exponent.unwrap_or(1.0);
            let reference = ReferenceSeries::new(read_series(&path)?, ref_mu, ref_g)?;
            manifest = manifest
                .param("mode", "quotient")
                .param("ref-mu", ref_mu)
                .param("ref-g", ref_g)
                .param("exponent", p)
                .input(&path);
            let q = quotient_ratios(&s, &reference)?;
            let t = q.to_table();
            let mut summary = summarise("mu/mu_ref", &t, a.window, p);
            if let Ok(fit) = extrapolate(&t, a.window, p) {
                let mu = &fit.intercept * &real::from_f64(ref_mu);
                let g = &(&fit.slope / &fit.intercept) + &real::from_f64(ref_g);
                summary.push(format!("mu = {}, g = {}", fmt(&mu), fmt(&g)));
            }
            (analysis_csv(&t, "q_n", &manifest.header()), summary)
        }
        Mode::Lambda => {
            let (Some(p1), Some(p2)) = (a.reference.clone(), a.reference2.clone()) else {
                return Err(CliError::Usage("--mode lambda requires --reference and --reference2".into()));
            };
            let ref_mu = need(a.ref_mu, "--ref-mu", "lambda")?;
            let g_d = need(a.g_d, "--g-d", "lambda")?;
            let g_p = need(a.g_p, "--g-p", "lambda")?;
            let p = a.exponent.unwrap_or(1.0);
            let r1 = quotient_ratios(&s, &ReferenceSeries::new(read_series(&p1)?, ref_mu, g_d)?)?;
            let r2 = quotient_ratios(&s, &ReferenceSeries::new(read_series(&p2)?, ref_mu, g_p)?)?;
            manifest = manifest
                .param("mode", "lambda")
                .param("ref-mu", ref_mu)
                .param("g-d", g_d)
                .param("g-p", g_p)
                .param("exponent", p)
                .input(&p1)
                .input(&p2);
            let t = lambda_estimator(&r1, &r2, g_d, g_p)?;
            let mut summary = summarise("lambda", &t, a.window, p);
            if let Ok(fit) = extrapolate(&t, a.window, p) {
                summary.push(format!("mu = {}", fmt(&(&fit.intercept * &real::from_f64(ref_mu)))));
            }
            (analysis_csv(&t, "lambda_n", &manifest.header()), summary)
        }
        Mode::Amplitude => {
            let (m, body, summary) = amplitude(&a, &s, &r, manifest)?;
            manifest = m;
            (body, summary)
        }
    };
    match a.out.as_deref() {
        Some(out) => {
            emit(&body, Some(out), manifest, start)?;
            for l in summary {
                println!("{l}");
            }
        }
        None => {
            for l in summary {
                eprintln!("{l}");
            }
            print!("{body}");
        }
    }
    Ok(())
}

fn amplitude(
    a: &AnalyzeArgs,
    s: &Series,
    r: &RatioSequence,
    mut manifest: RunManifest,
) -> Result<(RunManifest, String, Vec<String>), CliError> {
    let opts = PipelineOptions {
        window: a.window,
        intercept_exponent: a.exponent.unwrap_or(2.0),
        gradient_exponent: a.gradient_exponent,
    };
    let mu = match a.mu {
        Some(mu) => real::from_f64(mu),
        None => extrapolate(&linear_intercepts(r), opts.window, opts.intercept_exponent)?.intercept,
    };
    let g = match a.g {
        Some(g) => real::from_f64(g),
        None => {
            extrapolate(&gradient_estimator(r, &mu)?, opts.window, opts.gradient_exponent)?.intercept
        }
    };
    let amp = analysis::amplitude_estimate(s, &mu, &g, opts.window)?;
    manifest = manifest
        .param("mode", "amplitude")
        .param("intercept-exponent", opts.intercept_exponent)
        .param("gradient-exponent", opts.gradient_exponent);
    if let Some(mu) = a.mu {
        manifest = manifest.param("mu", mu);
    }
    if let Some(g) = a.g {
        manifest = manifest.param("g", g);
    }
    let gamma = -(&g + &real::from_i64(1));
    let mut body = String::new();
    for h in manifest.header() {
        body.push_str(&format!("# {h}\n"));
    }
    body.push_str("quantity,value\n");
    for (k, v) in [("mu", &mu), ("g", &g), ("gamma", &gamma), ("a", &amp.a), ("A", &amp.big_a)] {
        body.push_str(&format!("{k},{}\n", real::format_csv(v)));
    }
    let summary = vec![format!(
        "mu = {}, g = {}, a = {}, A = a·Γ(g+1) = {}",
        fmt(&mu),
        fmt(&g),
        fmt(&amp.a),
        fmt(&amp.big_a)
    )];
    Ok((manifest, body, summary))
}

fn verify_cmd(a: VerifyArgs) -> Result<(), CliError> {
    let workers = workers(a.workers)?;
    let checks = pool(workers)?.install(|| verify::run(&a.fixture, workers))?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{}", c.line());
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("{} checks passed", checks.len());
    Ok(())
}
