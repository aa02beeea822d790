//! Coefficient series, the plain-text series file format, and the binomial
//! transform linking increment-avoiding counts to all counts.
//!
//! Series files hold one decimal integer per line, line `k` (ignoring `#`
//! comments and blank lines) being the coefficient of `z^k`.

use std::fmt::Write as _;

use dashu_int::IBig;
use thiserror::Error;

use crate::real::{self, Real};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("series is empty")]
    Empty,
}

/// An approximate coefficient with its one-sigma uncertainty.
#[derive(Clone, Debug, PartialEq)]
pub struct Approx {
    pub value: Real,
    pub std_dev: Real,
}

/// Coefficients indexed from `n = 0`: exact values first, then an optional
/// approximate tail continuing at index `exact.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub exact: Vec<IBig>,
    pub approx_tail: Vec<Approx>,
}

impl Series {
    pub fn new(name: impl Into<String>, exact: Vec<IBig>) -> Series {
        Series {
            name: name.into(),
            exact,
            approx_tail: Vec::new(),
        }
    }

    pub fn from_u64(name: impl Into<String>, values: &[u64]) -> Series {
        Series::new(name, values.iter().map(|&v| IBig::from(v)).collect())
    }

    /// A series known only approximately, starting at index 0. Used for
    /// synthetic test series with non-integer coefficients.
    pub fn approximate(name: impl Into<String>, values: Vec<Real>) -> Series {
        Series {
            name: name.into(),
            exact: Vec::new(),
            approx_tail: values
                .into_iter()
                .map(|value| Approx {
                    value,
                    std_dev: real::zero(),
                })
                .collect(),
        }
    }

    pub fn with_tail(mut self, tail: Vec<Approx>) -> Series {
        self.approx_tail = tail;
        self
    }

    pub fn len(&self) -> usize {
        self.exact.len() + self.approx_tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The first `len` exact coefficients.
    pub fn truncated(&self, len: usize) -> Series {
        Series::new(self.name.clone(), self.exact[..len.min(self.exact.len())].to_vec())
    }

    /// Value and standard deviation at index `n`.
    pub fn value(&self, n: usize) -> Option<(Real, Real)> {
        if let Some(v) = self.exact.get(n) {
            return Some((real::from_int(v), real::zero()));
        }
        self.approx_tail
            .get(n - self.exact.len())
            .map(|a| (a.value.clone(), a.std_dev.clone()))
    }

    pub fn values(&self) -> Vec<(usize, Real, Real)> {
        (0..self.len())
            .map(|n| {
                let (v, s) = self.value(n).unwrap();
                (n, v, s)
            })
            .collect()
    }

    pub fn parse(name: impl Into<String>, text: &str) -> Result<Series, SeriesError> {
        let mut exact = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: IBig = line.parse().map_err(|e| SeriesError::Parse {
                line: i + 1,
                msg: format!("{line:?} is not an integer ({e})"),
            })?;
            exact.push(v);
        }
        if exact.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Series::new(name, exact))
    }

    /// Exact coefficients in the series file format, preceded by `header`
    /// lines written as `#` comments.
    pub fn to_file_string(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            writeln!(out, "# {h}").unwrap();
        }
        for v in &self.exact {
            writeln!(out, "{v}").unwrap();
        }
        out
    }
}

/// Rows `0..=n` of Pascal's triangle.
fn pascal(n: usize) -> Vec<Vec<IBig>> {
    let mut rows: Vec<Vec<IBig>> = vec![vec![IBig::ONE]];
    for k in 1..=n {
        let prev = &rows[k - 1];
        let mut row = Vec::with_capacity(k + 1);
        row.push(IBig::ONE);
        for j in 1..k {
            row.push(&prev[j - 1] + &prev[j]);
        }
        row.push(IBig::ONE);
        rows.push(row);
    }
    rows
}

/// `s_0 = t_0`, `s_n = Σ_{i=1}^{n} C(n−1, i−1) t_i`: the coefficients of
/// `T(x/(1−x))`.
pub fn binomial_transform(t: &Series) -> Series {
    assert!(!t.exact.is_empty());
    let len = t.exact.len();
    let binom = pascal(len.saturating_sub(1));
    let mut s = vec![t.exact[0].clone()];
    for n in 1..len {
        let sum = (1..=n).fold(IBig::ZERO, |acc, i| acc + &binom[n - 1][i - 1] * &t.exact[i]);
        s.push(sum);
    }
    Series::new(format!("binomial({})", t.name), s)
}

/// Inverse of [`binomial_transform`]: the coefficients of `S(x/(1+x))`.
pub fn inverse_binomial_transform(s: &Series) -> Series {
    assert!(!s.exact.is_empty());
    let len = s.exact.len();
    let binom = pascal(len.saturating_sub(1));
    let mut t = vec![s.exact[0].clone()];
    for n in 1..len {
        let sum = (1..=n).fold(IBig::ZERO, |acc, i| {
            let term = &binom[n - 1][i - 1] * &s.exact[i];
            if (n - i) % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        });
        t.push(sum);
    }
    Series::new(format!("inverse_binomial({})", s.name), t)
}
