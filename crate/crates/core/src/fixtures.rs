//! Reference data shipped with the crate.

use crate::real::{self, Real};
use crate::series::Series;
use crate::table::EstimateTable;

/// `s_0..=s_19` for two stacks in series.
pub const TWO_STACKS_IN_SERIES: &str = include_str!("../data/two_stacks_in_series.txt");

/// Predicted `s_20..=s_38` with one-sigma errors.
pub const SERIES_PREDICTIONS: &str = include_str!("../data/two_stacks_in_series_predictions.csv");

/// Predicted ratios `r_20..=r_49` with one-sigma errors.
pub const SERIES_RATIOS: &str = include_str!("../data/two_stacks_in_series_ratios.csv");

/// Predicted two-stacks-in-parallel coefficients with errors and the actual
/// error against the known values.
pub const PARALLEL_PREDICTIONS: &str =
    include_str!("../data/two_stacks_in_parallel_predictions.csv");

/// Growth rate shared by the deque and parallel-stacks series, as `1/μ`.
pub const PARALLEL_CRITICAL_POINT: f64 = 0.120752497575574;
pub const DEQUE_EXPONENT: f64 = -1.5;
pub const PARALLEL_EXPONENT: f64 = -2.47327;

pub fn two_stacks_in_series() -> Series {
    Series::parse("two_stacks_in_series", TWO_STACKS_IN_SERIES).expect("shipped fixture")
}

pub fn series_predictions() -> EstimateTable {
    EstimateTable::parse_csv(SERIES_PREDICTIONS).expect("shipped fixture")
}

pub fn series_ratios() -> EstimateTable {
    EstimateTable::parse_csv(SERIES_RATIOS).expect("shipped fixture")
}

#[derive(Clone, Debug)]
pub struct ParallelPrediction {
    pub n: usize,
    pub value: Real,
    pub std_dev: Real,
    pub actual_error: Real,
}

pub fn parallel_predictions() -> Vec<ParallelPrediction> {
    PARALLEL_PREDICTIONS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("n,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            ParallelPrediction {
                n: f[0].parse().expect("shipped fixture"),
                value: real::parse(f[1]).expect("shipped fixture"),
                std_dev: real::parse(f[2]).expect("shipped fixture"),
                actual_error: real::parse(f[3]).expect("shipped fixture"),
            }
        })
        .collect()
}
