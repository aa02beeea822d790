//! Differential approximants: inhomogeneous linear ODEs
//!
//! ```text
//! Σ_{i=0}^{M} Q_i(z) · θ^i F(z) = P(z),    θ = z d/dz,
//! ```
//!
//! with polynomial `Q_i` and `P`, fitted in exact rational arithmetic so that
//! `F` reproduces every known coefficient. Since `θ^i z^k = k^i z^k`, the
//! coefficient of `z^k` gives
//!
//! ```text
//! Σ_i Σ_j q_{i,j} (k − j)^i f_{k−j} = p_k,
//! ```
//!
//! a linear recurrence whose leading factor is `Σ_i q_{i,0} k^i`. Solving it
//! forward predicts the coefficients past the fitted range.

mod ensemble;
mod linalg;

use std::fmt;

use dashu_int::IBig;
use dashu_ratio::RBig;
use thiserror::Error;

use crate::series::Series;

pub use ensemble::{
    config_family, predict_ensemble, predict_ratios_ensemble, trimmed_mean, TrimmedMean,
    DEFAULT_TRIM, MIN_ENSEMBLE,
};
pub use linalg::solve;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproximantError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("configuration {config} needs {needed} coefficients, series has {available}")]
    TooFewCoefficients {
        config: String,
        needed: usize,
        available: usize,
    },
    #[error("no consistent normalised fit for {0}")]
    SingularFit(String),
    #[error("leading recurrence factor vanishes at index {index}")]
    RecurrenceBreakdown { index: usize },
    #[error("only {survivors} approximants survive at n = {n} (need {MIN_ENSEMBLE})")]
    EnsembleTooSmall { n: usize, survivors: usize },
}

/// Degrees of `Q_0..Q_M` and of `P` (`−1` meaning `P ≡ 0`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DAConfig {
    q_degrees: Vec<usize>,
    p_degree: i32,
}

impl DAConfig {
    pub const MIN_ORDER: usize = 2;
    pub const MAX_ORDER: usize = 4;

    pub fn new(q_degrees: Vec<usize>, p_degree: i32) -> Result<DAConfig, ApproximantError> {
        let order = q_degrees.len().wrapping_sub(1);
        if !(Self::MIN_ORDER..=Self::MAX_ORDER).contains(&order) {
            return Err(ApproximantError::InvalidConfig(format!(
                "order must be in {}..={}, got {} polynomial degrees",
                Self::MIN_ORDER,
                Self::MAX_ORDER,
                q_degrees.len()
            )));
        }
        if p_degree < -1 {
            return Err(ApproximantError::InvalidConfig(format!(
                "inhomogeneous degree {p_degree} below -1"
            )));
        }
        Ok(DAConfig { q_degrees, p_degree })
    }

    pub fn order(&self) -> usize {
        self.q_degrees.len() - 1
    }

    pub fn q_degrees(&self) -> &[usize] {
        &self.q_degrees
    }

    pub fn p_degree(&self) -> i32 {
        self.p_degree
    }

    /// Polynomial coefficients to be determined, before normalisation.
    pub fn unknowns(&self) -> usize {
        self.q_degrees.iter().map(|d| d + 1).sum::<usize>() + (self.p_degree + 1) as usize
    }

    /// Series coefficients that make the fit exactly determined.
    pub fn coefficients_used(&self) -> usize {
        self.unknowns() - 1
    }
}

impl fmt::Display for DAConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.q_degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "M={} Q=[{}] P={}", self.order(), q.join(","), self.p_degree)
    }
}

/// A fitted approximant together with the coefficients it was fitted to.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialApproximant {
    pub config: DAConfig,
    /// `q_polys[i][j]` is the coefficient of `z^j` in `Q_i`.
    pub q_polys: Vec<Vec<RBig>>,
    pub p_poly: Vec<RBig>,
    /// Index of the last fitted coefficient.
    pub fitted_upto: usize,
    known: Vec<RBig>,
}

/// `k^i` with `0^0 = 1`.
fn ipow(k: usize, i: usize) -> IBig {
    IBig::from(k).pow(i)
}

/// Fits `cfg` to the first `cfg.coefficients_used()` exact coefficients of
/// `s`. The constant term of `Q_M` is normalised to 1, falling back to the
/// constant term of `Q_{M−1}`. A rank-deficient but consistent system yields
/// its canonical solution (free unknowns zero).
pub fn fit_da(s: &Series, cfg: &DAConfig) -> Result<DifferentialApproximant, ApproximantError> {
    let len = cfg.coefficients_used();
    if s.exact.len() < len {
        return Err(ApproximantError::TooFewCoefficients {
            config: cfg.to_string(),
            needed: len,
            available: s.exact.len(),
        });
    }
    let f = &s.exact[..len];
    let order = cfg.order();

    // Column layout: q_{i,j} for each i then j, followed by p_0..p_deg.
    let mut q_col = Vec::with_capacity(order + 1);
    let mut cols = 0;
    for &d in &cfg.q_degrees {
        q_col.push(cols);
        cols += d + 1;
    }
    let p_col = cols;
    cols += (cfg.p_degree + 1) as usize;

    let mut full = vec![vec![RBig::ZERO; cols]; len];
    for (k, row) in full.iter_mut().enumerate() {
        for (i, &d) in cfg.q_degrees.iter().enumerate() {
            for j in 0..=d.min(k) {
                let v = ipow(k - j, i) * &f[k - j];
                row[q_col[i] + j] = RBig::from(v);
            }
        }
        if (k as i32) <= cfg.p_degree {
            row[p_col + k] = RBig::NEG_ONE;
        }
    }

    for norm in [order, order - 1] {
        let nc = q_col[norm];
        let b: Vec<RBig> = full.iter().map(|r| -r[nc].clone()).collect();
        let a: Vec<Vec<RBig>> = full
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.remove(nc);
                r
            })
            .collect();
        let Some(mut x) = linalg::solve(a, b) else {
            continue;
        };
        x.insert(nc, RBig::ONE);
        let q_polys = cfg
            .q_degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| x[q_col[i]..=q_col[i] + d].to_vec())
            .collect();
        let p_poly = x[p_col..].to_vec();
        return Ok(DifferentialApproximant {
            config: cfg.clone(),
            q_polys,
            p_poly,
            fitted_upto: len - 1,
            known: f.iter().map(|v| RBig::from(v.clone())).collect(),
        });
    }
    Err(ApproximantError::SingularFit(cfg.to_string()))
}

impl DifferentialApproximant {
    /// `Σ_i q_{i,0} k^i`, the multiplier of `f_k` in the `z^k` equation.
    pub fn leading_factor(&self, k: usize) -> RBig {
        self.q_polys
            .iter()
            .enumerate()
            .fold(RBig::ZERO, |acc, (i, q)| acc + &q[0] * RBig::from(ipow(k, i)))
    }

    /// `p_k − Σ_i Σ_{j≥1} q_{i,j} (k−j)^i f_{k−j}`, given `f_0..f_{k−1}`.
    fn rhs(&self, k: usize, f: &[RBig]) -> RBig {
        let mut acc = self.p_poly.get(k).cloned().unwrap_or(RBig::ZERO);
        for (i, q) in self.q_polys.iter().enumerate() {
            for (j, c) in q.iter().enumerate().skip(1).take(k) {
                if !c.is_zero() {
                    acc -= c * RBig::from(ipow(k - j, i)) * &f[k - j];
                }
            }
        }
        acc
    }

    /// Coefficient `k` from the recurrence, given all earlier ones.
    fn next(&self, k: usize, f: &[RBig]) -> Result<RBig, ApproximantError> {
        let lead = self.leading_factor(k);
        if lead.is_zero() {
            return Err(ApproximantError::RecurrenceBreakdown { index: k });
        }
        Ok(self.rhs(k, f) / lead)
    }

    /// Fitted coefficients followed by predictions up to index `upto`,
    /// stopping early at the first breakdown.
    pub fn extend_to(&self, upto: usize) -> (Vec<RBig>, Option<ApproximantError>) {
        let mut f = self.known.clone();
        for k in f.len()..=upto {
            match self.next(k, &f) {
                Ok(v) => f.push(v),
                Err(e) => return (f, Some(e)),
            }
        }
        (f, None)
    }

    /// Runs the recurrence from index 0, using a known coefficient only where
    /// the leading factor vanishes. Equals the fitted coefficients exactly.
    pub fn reexpand(&self) -> Vec<RBig> {
        let mut f = Vec::with_capacity(self.known.len());
        for k in 0..self.known.len() {
            let v = self.next(k, &f).unwrap_or_else(|_| self.known[k].clone());
            f.push(v);
        }
        f
    }

    /// Residual of the `z^k` equation against `f`.
    pub fn residual(&self, k: usize, f: &[RBig]) -> RBig {
        &self.leading_factor(k) * &f[k] - self.rhs(k, f)
    }
}

/// The `k` coefficients after `fitted_upto`.
pub fn predict_coefficients(
    da: &DifferentialApproximant,
    k: usize,
) -> Result<Vec<RBig>, ApproximantError> {
    let start = da.fitted_upto + 1;
    let (f, err) = da.extend_to(da.fitted_upto + k);
    match err {
        Some(e) => Err(e),
        None => Ok(f[start..].to_vec()),
    }
}
