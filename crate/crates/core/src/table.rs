//! Tables of estimates indexed by `n`, with their CSV form
//! `n,value,std_dev,samples`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::real::{self, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub n: usize,
    pub value: Real,
    pub std_dev: Real,
    /// Estimates aggregated into this row; 1 for values derived from exact
    /// data.
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimateTable {
    pub rows: Vec<EstimateRow>,
}

pub const CSV_HEADER: &str = "n,value,std_dev,samples";

impl EstimateTable {
    pub fn new(rows: Vec<EstimateRow>) -> EstimateTable {
        EstimateTable { rows }
    }

    /// Rows `(n, value)` with zero error and a single sample.
    pub fn exact(values: impl IntoIterator<Item = (usize, Real)>) -> EstimateTable {
        EstimateTable::new(
            values
                .into_iter()
                .map(|(n, value)| EstimateRow {
                    n,
                    value,
                    std_dev: real::zero(),
                    samples: 1,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&EstimateRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            writeln!(out, "# {h}").unwrap();
        }
        writeln!(out, "{CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.n,
                real::format_csv(&r.value),
                real::format_csv(&r.std_dev),
                r.samples
            )
            .unwrap();
        }
        out
    }

    /// Reads the CSV form. `#` comments and the header line are skipped; the
    /// `samples` column is optional and defaults to 1.
    pub fn parse_csv(text: &str) -> Result<EstimateTable, TableError> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
                continue;
            }
            let err = |msg: String| TableError::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(err(format!("expected 3 or 4 fields, got {}", fields.len())));
            }
            let n = fields[0]
                .parse()
                .map_err(|_| err(format!("bad index {:?}", fields[0])))?;
            let value = real::parse(fields[1]).map_err(err)?;
            let std_dev = real::parse(fields[2]).map_err(err)?;
            let samples = match fields.get(3) {
                Some(f) => f.parse().map_err(|_| err(format!("bad sample count {f:?}")))?,
                None => 1,
            };
            rows.push(EstimateRow {
                n,
                value,
                std_dev,
                samples,
            });
        }
        if rows.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(TableError::Parse {
                line: 0,
                msg: "indices must be strictly increasing".into(),
            });
        }
        Ok(EstimateTable { rows })
    }
}
