//! Ratio-method analysis of a series assumed to behave as
//! `s_n ~ a · μ^n · n^g`, i.e. a generating function `A (1 − μz)^γ` with
//! `γ = −g − 1` and `A = a Γ(g + 1)`.
//!
//! Every "plot against `1/n` and read off the intercept" step is a least
//! squares line through the last `window` points of a table. Uncertainties
//! of approximate inputs are carried by first-order propagation.

use std::fmt::Write as _;

use thiserror::Error;

use crate::real::{self, Real};
use crate::series::Series;
use crate::table::{EstimateRow, EstimateTable};

/// Points used by default when extrapolating in `1/n`.
pub const DEFAULT_WINDOW: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series overlap has {overlap} points, need at least {needed}")]
    IndexMismatch { overlap: usize, needed: usize },
    #[error("extrapolation window is degenerate: {0}")]
    DegenerateWindow(String),
    #[error("Γ(g + 1) has a pole at g = {0}")]
    GammaPole(f64),
    #[error("reference series must be strictly positive (index {0})")]
    NonPositiveReference(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub n: usize,
    pub r: Real,
    pub std_dev: Real,
}

/// `r_n = s_n / s_{n−1}` for increasing `n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RatioSequence {
    pub rows: Vec<RatioRow>,
    /// Indices whose denominator was zero; no row is emitted for them.
    pub division_by_zero: Vec<usize>,
}

impl RatioSequence {
    pub fn get(&self, n: usize) -> Option<&RatioRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_table(&self) -> EstimateTable {
        EstimateTable::new(
            self.rows
                .iter()
                .map(|r| EstimateRow {
                    n: r.n,
                    value: r.r.clone(),
                    std_dev: r.std_dev.clone(),
                    samples: 1,
                })
                .collect(),
        )
    }

    /// `n,one_over_n,r_n,std_dev`, ready for plotting.
    pub fn to_csv(&self, header: &[String]) -> String {
        analysis_csv(&self.to_table(), "r_n", header)
    }
}

/// An analysis table as `n,one_over_n,<column>,std_dev`.
pub fn analysis_csv(t: &EstimateTable, column: &str, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").unwrap();
    }
    writeln!(out, "n,one_over_n,{column},std_dev").unwrap();
    for r in &t.rows {
        let inv = &real::from_i64(1) / &real::from_i64(r.n as i64);
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            real::format_csv(&inv),
            real::format_csv(&r.value),
            real::format_csv(&r.std_dev)
        )
        .unwrap();
    }
    out
}

fn abs(x: &Real) -> Real {
    if *x < real::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

fn hypot(a: &Real, b: &Real) -> Real {
    real::sqrt(&(a * a + b * b))
}

/// `σ(b/a)` from independent errors on `a` and `b`.
fn quotient_sd(q: &Real, a: &Real, sa: &Real, b: &Real, sb: &Real) -> Real {
    abs(q) * hypot(&(sa / a), &(sb / b))
}

fn ratios_of(values: &[(usize, Real, Real)]) -> RatioSequence {
    let mut seq = RatioSequence::default();
    for w in values.windows(2) {
        let ((_, a, sa), (n, b, sb)) = (&w[0], &w[1]);
        if *a == real::zero() {
            seq.division_by_zero.push(*n);
            continue;
        }
        let r = b / a;
        let std_dev = if *b == real::zero() {
            abs(&(sb / a))
        } else {
            quotient_sd(&r, a, sa, b, sb)
        };
        seq.rows.push(RatioRow { n: *n, r, std_dev });
    }
    seq
}

/// Ratios of successive coefficients, exact values first and then any
/// approximate tail.
pub fn ratios(s: &Series) -> RatioSequence {
    ratios_of(&s.values())
}

/// Ratios from the exact coefficients, continued by independently predicted
/// ratios for indices past the exact range.
pub fn ratios_with_tail(s: &Series, predicted: &EstimateTable) -> RatioSequence {
    let exact = Series::new(s.name.clone(), s.exact.clone());
    let mut seq = ratios(&exact);
    for row in &predicted.rows {
        if row.n >= s.exact.len() {
            seq.rows.push(RatioRow {
                n: row.n,
                r: row.value.clone(),
                std_dev: row.std_dev.clone(),
            });
        }
    }
    seq
}

/// Continues the exact coefficients with `s_n = s_{n−1} r_n` for predicted
/// ratios past the exact range; relative errors add in quadrature.
pub fn extend_with_ratios(s: &Series, predicted: &EstimateTable) -> Series {
    let mut tail = Vec::new();
    let Some(last) = s.exact.last() else {
        return s.clone();
    };
    let mut value = real::from_int(last);
    let mut rel2 = real::zero();
    let mut n = s.exact.len();
    for row in &predicted.rows {
        if row.n < n {
            continue;
        }
        if row.n != n {
            break;
        }
        value = &value * &row.value;
        let rel = &row.std_dev / &row.value;
        rel2 = &rel2 + &rel * &rel;
        tail.push(crate::series::Approx {
            value: value.clone(),
            std_dev: abs(&(&value * &real::sqrt(&rel2))),
        });
        n += 1;
    }
    Series::new(s.name.clone(), s.exact.clone()).with_tail(tail)
}

/// Consecutive pairs of rows.
fn pairs(r: &RatioSequence) -> impl Iterator<Item = (&RatioRow, &RatioRow)> {
    r.rows.windows(2).filter(|w| w[1].n == w[0].n + 1).map(|w| (&w[0], &w[1]))
}

/// `l_n = n r_n − (n−1) r_{n−1}`, which tends to `μ` with a `1/n²` error for
/// a pure algebraic singularity.
pub fn linear_intercepts(r: &RatioSequence) -> EstimateTable {
    EstimateTable::new(
        pairs(r)
            .map(|(p, c)| {
                let n = real::from_i64(c.n as i64);
                let m = real::from_i64(p.n as i64);
                EstimateRow {
                    n: c.n,
                    value: &n * &c.r - &m * &p.r,
                    std_dev: hypot(&(&n * &c.std_dev), &(&m * &p.std_dev)),
                    samples: 1,
                }
            })
            .collect(),
    )
}

/// `g_n = n(n−1)(r_{n−1} − r_n)/μ`, which tends to `g` when `μ` is right:
/// `r_n ≈ μ(1 + g/n)` gives `r_n − r_{n−1} ≈ −μg/(n(n−1))`.
pub fn gradient_estimator(r: &RatioSequence, mu: &Real) -> Result<EstimateTable, AnalysisError> {
    if *mu <= real::zero() {
        return Err(AnalysisError::InvalidParameter("mu must be positive".into()));
    }
    Ok(EstimateTable::new(
        pairs(r)
            .map(|(p, c)| {
                let f = &real::from_i64((c.n * p.n) as i64) / mu;
                EstimateRow {
                    n: c.n,
                    value: &f * &(&p.r - &c.r),
                    std_dev: abs(&f) * hypot(&p.std_dev, &c.std_dev),
                    samples: 1,
                }
            })
            .collect(),
    ))
}

/// A comparison series with known asymptotics.
#[derive(Clone, Debug)]
pub struct ReferenceSeries {
    pub series: Series,
    pub mu_ref: f64,
    pub g_ref: f64,
}

impl ReferenceSeries {
    pub fn new(series: Series, mu_ref: f64, g_ref: f64) -> Result<ReferenceSeries, AnalysisError> {
        for (n, v, _) in series.values() {
            if v <= real::zero() {
                return Err(AnalysisError::NonPositiveReference(n));
            }
        }
        Ok(ReferenceSeries {
            series,
            mu_ref,
            g_ref,
        })
    }
}

/// Fewest common indices a quotient analysis accepts.
pub const MIN_OVERLAP: usize = 5;

/// Ratios of `q_n = s_n / ref_n`; these tend to `μ/μ_ref` with slope
/// `(μ/μ_ref)(g − g_ref)` in `1/n`.
pub fn quotient_ratios(s: &Series, reference: &ReferenceSeries) -> Result<RatioSequence, AnalysisError> {
    let overlap = s.len().min(reference.series.len());
    if overlap < MIN_OVERLAP {
        return Err(AnalysisError::IndexMismatch {
            overlap,
            needed: MIN_OVERLAP,
        });
    }
    let q: Vec<(usize, Real, Real)> = (0..overlap)
        .map(|n| {
            let (a, sa) = s.value(n).unwrap();
            let (b, sb) = reference.series.value(n).unwrap();
            let v = &a / &b;
            let sd = if a == real::zero() {
                abs(&(&sa / &b))
            } else {
                quotient_sd(&v, &b, &sb, &a, &sa)
            };
            (n, v, sd)
        })
        .collect();
    Ok(ratios_of(&q))
}

/// `λ_n = n (r1(n) − r2(n)) / (g_p − g_d)` for quotient ratios `r1` against
/// a reference with exponent `g_d` and `r2` against one with `g_p`; both
/// references must share the growth rate. Tends to `λ = μ/μ_ref`.
pub fn lambda_estimator(
    r1: &RatioSequence,
    r2: &RatioSequence,
    g_d: f64,
    g_p: f64,
) -> Result<EstimateTable, AnalysisError> {
    if g_d == g_p {
        return Err(AnalysisError::InvalidParameter("g_d and g_p must differ".into()));
    }
    let denom = real::from_f64(g_p - g_d);
    Ok(EstimateTable::new(
        r1.rows
            .iter()
            .filter_map(|a| r2.get(a.n).map(|b| (a, b)))
            .map(|(a, b)| {
                let f = &real::from_i64(a.n as i64) / &denom;
                EstimateRow {
                    n: a.n,
                    value: &f * &(&a.r - &b.r),
                    std_dev: abs(&f) * hypot(&a.std_dev, &b.std_dev),
                    samples: 1,
                }
            })
            .collect(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    /// Value at `1/n^p = 0`.
    pub intercept: Real,
    pub slope: Real,
    pub points: usize,
}

/// Least-squares line of value against `1/n^exponent` over the last `window`
/// rows (all rows if fewer).
pub fn extrapolate(seq: &EstimateTable, window: usize, exponent: f64) -> Result<LinearFit, AnalysisError> {
    if window < 2 {
        return Err(AnalysisError::DegenerateWindow(format!("window {window} < 2")));
    }
    let rows = &seq.rows[seq.rows.len().saturating_sub(window)..];
    if rows.len() < 2 {
        return Err(AnalysisError::DegenerateWindow(format!("only {} rows", rows.len())));
    }
    if rows.iter().any(|r| r.n == 0) {
        return Err(AnalysisError::DegenerateWindow("row at n = 0".into()));
    }
    let p = real::from_f64(-exponent);
    let xs: Vec<Real> = rows
        .iter()
        .map(|r| real::powf(&real::from_i64(r.n as i64), &p))
        .collect();
    let k = real::from_i64(rows.len() as i64);
    let mx = &xs.iter().fold(real::zero(), |a, x| a + x) / &k;
    let my = &rows.iter().fold(real::zero(), |a, r| a + &r.value) / &k;
    let mut sxx = real::zero();
    let mut sxy = real::zero();
    for (x, r) in xs.iter().zip(rows) {
        let dx = x - &mx;
        sxy += &dx * &(&r.value - &my);
        sxx += &dx * &dx;
    }
    if sxx == real::zero() {
        return Err(AnalysisError::DegenerateWindow("all abscissae equal".into()));
    }
    let slope = &sxy / &sxx;
    let intercept = &my - &slope * &mx;
    Ok(LinearFit {
        intercept,
        slope,
        points: rows.len(),
    })
}

/// [`extrapolate`] in `1/n`.
pub fn extrapolate_linear(seq: &EstimateTable, window: usize) -> Result<LinearFit, AnalysisError> {
    extrapolate(seq, window, 1.0)
}

/// Intercepts for several window sizes, to show how settled an estimate is.
pub fn window_sensitivity(
    seq: &EstimateTable,
    windows: &[usize],
    exponent: f64,
) -> Vec<(usize, Result<LinearFit, AnalysisError>)> {
    windows.iter().map(|&w| (w, extrapolate(seq, w, exponent))).collect()
}

/// Default windows reported next to an intercept.
pub fn sensitivity_windows(window: usize) -> Vec<usize> {
    let mut w: Vec<usize> = [window / 2, window * 2 / 3, window, window * 3 / 2, window * 2]
        .into_iter()
        .filter(|&w| w >= 2)
        .collect();
    w.dedup();
    w
}

fn gamma_fn(g: f64) -> Result<f64, AnalysisError> {
    let x = g + 1.0;
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(AnalysisError::GammaPole(g));
    }
    Ok(statrs::function::gamma::gamma(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Amplitude {
    /// Coefficient amplitude in `s_n ~ a μ^n n^g`.
    pub a: Real,
    /// Generating-function amplitude `a Γ(g + 1)`.
    pub big_a: Real,
    pub fit: LinearFit,
}

/// Extrapolates `s_n / (μ^n n^g)` in `1/n` over the last `window` terms.
pub fn amplitude_estimate(s: &Series, mu: &Real, g: &Real, window: usize) -> Result<Amplitude, AnalysisError> {
    if *mu <= real::zero() {
        return Err(AnalysisError::InvalidParameter("mu must be positive".into()));
    }
    let gamma = gamma_fn(real::to_f64(g))?;
    let ln_mu = mu.ln();
    let seq = EstimateTable::new(
        s.values()
            .into_iter()
            .filter(|(n, _, _)| *n >= 1)
            .map(|(n, v, sd)| {
                let nn = real::from_i64(n as i64);
                let scale = (&nn * &ln_mu + g * &nn.ln()).exp();
                EstimateRow {
                    n,
                    value: &v / &scale,
                    std_dev: &sd / &scale,
                    samples: 1,
                }
            })
            .collect(),
    );
    let fit = extrapolate_linear(&seq, window)?;
    let big_a = &fit.intercept * &real::from_f64(gamma);
    Ok(Amplitude {
        a: fit.intercept.clone(),
        big_a,
        fit,
    })
}

/// Estimated asymptotic form `s_n ~ a μ^n n^g`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticModel {
    pub mu: Real,
    pub g: Real,
    /// `−g − 1`, the exponent of `(1 − μz)` in the generating function.
    pub gamma: Real,
    /// Confluent correction gap, when one is modelled.
    pub delta: Option<f64>,
    pub a: Real,
    /// `a Γ(g + 1)`; `None` at a pole.
    pub big_a: Option<Real>,
}

impl AsymptoticModel {
    pub fn new(mu: Real, g: Real, a: Real, delta: Option<f64>) -> AsymptoticModel {
        let gamma = -(&g + &real::from_i64(1));
        let big_a = gamma_fn(real::to_f64(&g)).ok().map(|c| &a * &real::from_f64(c));
        AsymptoticModel {
            mu,
            g,
            gamma,
            delta,
            a,
            big_a,
        }
    }

    /// `a μ^n n^(g) (1 + c n^(−Δ))`, the model's coefficient at `n ≥ 1`.
    pub fn coefficient(&self, n: usize, confluent_amplitude: f64) -> Real {
        let nn = real::from_i64(n as i64);
        let base = (&nn * &self.mu.ln() + &self.g * &nn.ln()).exp();
        let corr = match self.delta {
            Some(d) => real::from_f64(1.0) + real::from_f64(confluent_amplitude) * real::powf(&nn, &real::from_f64(-d)),
            None => real::from_i64(1),
        };
        &self.a * &base * corr
    }
}

/// Abscissae used by [`estimate_model`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub window: usize,
    /// Linear intercepts are extrapolated in `1/n^p`; `p = 2` for a pure
    /// algebraic singularity.
    pub intercept_exponent: f64,
    /// Gradient estimators are extrapolated in `1/n^p`; for a pure power law
    /// `g_n = g + g(g+1)/n + …`, so `p = 1`.
    pub gradient_exponent: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            window: DEFAULT_WINDOW,
            intercept_exponent: 2.0,
            gradient_exponent: 1.0,
        }
    }
}

/// Full pipeline: `μ` from the extrapolated linear intercepts, `g` from the
/// extrapolated gradient estimators at that `μ`, then the amplitude.
pub fn estimate_model(
    s: &Series,
    r: &RatioSequence,
    opts: &PipelineOptions,
) -> Result<AsymptoticModel, AnalysisError> {
    let mu = extrapolate(&linear_intercepts(r), opts.window, opts.intercept_exponent)?.intercept;
    let g = extrapolate(&gradient_estimator(r, &mu)?, opts.window, opts.gradient_exponent)?.intercept;
    let amp = amplitude_estimate(s, &mu, &g, opts.window)?;
    Ok(AsymptoticModel::new(mu, g, amp.a, None))
}
