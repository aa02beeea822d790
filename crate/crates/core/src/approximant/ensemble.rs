//! Families of approximants and their trimmed-mean aggregation.

use dashu_ratio::RBig;
use rayon::prelude::*;

use super::{fit_da, ApproximantError, DAConfig, DifferentialApproximant};
use crate::real::{self, Real};
use crate::series::Series;
use crate::table::{EstimateRow, EstimateTable};

pub const DEFAULT_TRIM: f64 = 0.10;

/// Fewest approximants an ensemble estimate may rest on.
pub const MIN_ENSEMBLE: usize = 4;

const MAX_P_DEGREE: i32 = 4;
const MAX_DEGREE_SPREAD: usize = 2;

/// Every order-`order` configuration that is exactly determined by `len`
/// coefficients, with `Q` degrees differing by at most 2 and `P` of degree
/// `−1..=4`. Sorted by `P` degree, then `Q` degrees.
pub fn config_family(order: usize, len: usize) -> Vec<DAConfig> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for d in 0..=left {
            cur.push(d);
            rec(k - 1, left - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if !(DAConfig::MIN_ORDER..=DAConfig::MAX_ORDER).contains(&order) {
        return out;
    }
    for p in -1..=MAX_P_DEGREE {
        // Σ (d_i + 1) + (p + 1) = len + 1
        let Some(sum) = (len + 1).checked_sub((p + 1) as usize + order + 1) else {
            continue;
        };
        let mut tuples = Vec::new();
        rec(order + 1, sum, &mut Vec::new(), &mut tuples);
        tuples.retain(|t| t.iter().max().unwrap() - t.iter().min().unwrap() <= MAX_DEGREE_SPREAD);
        tuples.sort();
        out.extend(tuples.into_iter().map(|t| DAConfig::new(t, p).unwrap()));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrimmedMean {
    pub mean: Real,
    /// Sample standard deviation of the kept values.
    pub std_dev: Real,
    pub kept: usize,
}

/// Sorts `values`, drops `⌈trim·count⌉` from each end and returns the mean
/// and sample standard deviation of the rest, or `None` if fewer than two
/// remain.
pub fn trimmed_mean(mut values: Vec<Real>, trim: f64) -> Option<TrimmedMean> {
    assert!((0.0..0.5).contains(&trim), "trim {trim} outside [0, 0.5)");
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // The epsilon keeps e.g. 0.15·20 from rounding up to 4.
    let drop = (trim * values.len() as f64 - 1e-9).ceil().max(0.0) as usize;
    if values.len() < 2 * drop + 2 {
        return None;
    }
    let kept = &values[drop..values.len() - drop];
    let k = real::from_i64(kept.len() as i64);
    let sum = kept.iter().fold(real::zero(), |acc, v| acc + v);
    let mean = &sum / &k;
    let ss = kept.iter().fold(real::zero(), |acc, v| {
        let d = v - &mean;
        acc + &d * &d
    });
    let var = &ss / &(&k - &real::from_i64(1));
    Some(TrimmedMean {
        mean,
        std_dev: real::sqrt(&var),
        kept: kept.len(),
    })
}

fn check_trim(trim: f64) -> Result<(), ApproximantError> {
    if (0.0..0.5).contains(&trim) {
        Ok(())
    } else {
        Err(ApproximantError::InvalidConfig(format!("trim {trim} outside [0, 0.5)")))
    }
}

/// Coefficients `0..=upto` from every configuration that fits, in config
/// order; a breakdown truncates that approximant's list.
fn extensions(s: &Series, cfgs: &[DAConfig], upto: usize) -> Vec<Vec<RBig>> {
    cfgs.par_iter()
        .map(|cfg| fit_da(s, cfg).ok().map(|da: DifferentialApproximant| da.extend_to(upto).0))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn aggregate(
    first: usize,
    k: usize,
    trim: f64,
    mut sample: impl FnMut(usize) -> Vec<Real>,
) -> Result<EstimateTable, ApproximantError> {
    let mut rows = Vec::with_capacity(k);
    for n in first..first + k {
        let values = sample(n);
        let survivors = values.len();
        if survivors < MIN_ENSEMBLE {
            return Err(ApproximantError::EnsembleTooSmall { n, survivors });
        }
        let t = trimmed_mean(values, trim)
            .ok_or(ApproximantError::EnsembleTooSmall { n, survivors })?;
        rows.push(EstimateRow {
            n,
            value: t.mean,
            std_dev: t.std_dev,
            samples: t.kept,
        });
    }
    Ok(EstimateTable::new(rows))
}

/// Trimmed-mean estimates of the `k` coefficients after the last exact one.
pub fn predict_ensemble(
    s: &Series,
    cfgs: &[DAConfig],
    k: usize,
    trim: f64,
) -> Result<EstimateTable, ApproximantError> {
    check_trim(trim)?;
    let first = s.exact.len();
    let ext = extensions(s, cfgs, first + k - 1);
    aggregate(first, k, trim, |n| {
        ext.iter()
            .filter_map(|f| f.get(n).map(real::from_ratio))
            .collect()
    })
}

/// Trimmed-mean estimates of the `k` ratios `s_n / s_{n−1}` after the last
/// exact coefficient, each approximant's ratios being formed before
/// averaging.
pub fn predict_ratios_ensemble(
    s: &Series,
    cfgs: &[DAConfig],
    k: usize,
    trim: f64,
) -> Result<EstimateTable, ApproximantError> {
    check_trim(trim)?;
    let first = s.exact.len();
    let ext = extensions(s, cfgs, first + k - 1);
    aggregate(first, k, trim, |n| {
        ext.iter()
            .filter_map(|f| match (f.get(n - 1), f.get(n)) {
                (Some(a), Some(b)) if !a.is_zero() => Some(real::from_ratio(&(b / a))),
                _ => None,
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dashu_int::IBig;
    use proptest::prelude::*;

    fn reals(v: &[f64]) -> Vec<Real> {
        v.iter().map(|&x| real::from_f64(x)).collect()
    }

    #[test]
    fn trimming_drops_the_extremes() {
        let v = reals(&[100.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, -50.0]);
        let t = trimmed_mean(v, 0.10).unwrap();
        assert_eq!(t.kept, 8);
        assert!((real::to_f64(&t.mean) - 4.5).abs() < 1e-12);
        // Sample std dev of 1..=8.
        assert!((real::to_f64(&t.std_dev) - 6f64.sqrt()).abs() < 1e-12);

        let t = trimmed_mean(reals(&[1.0; 20]), 0.15).unwrap();
        assert_eq!(t.kept, 14);
        assert!(trimmed_mean(reals(&[1.0]), 0.0).is_none());
        assert!(trimmed_mean(reals(&[1.0, 2.0, 3.0]), 0.4).is_none());
    }

    proptest! {
        #[test]
        fn trimmed_mean_ignores_order(mut v in proptest::collection::vec(-1e6f64..1e6, 4..40), seed in 0u64..1000) {
            let a = trimmed_mean(reals(&v), 0.1).unwrap();
            let len = v.len();
            v.rotate_left(seed as usize % len);
            v.reverse();
            let b = trimmed_mean(reals(&v), 0.1).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn adding_the_mean_keeps_it(v in proptest::collection::vec(-1e3f64..1e3, 3..30)) {
            let a = trimmed_mean(reals(&v), 0.0).unwrap();
            let mut w = reals(&v);
            w.push(a.mean.clone());
            let b = trimmed_mean(w, 0.0).unwrap();
            prop_assert!(real::to_f64(&(&a.mean - &b.mean)).abs() < 1e-9);
            prop_assert!(b.std_dev <= a.std_dev);
        }
    }

    #[test]
    fn family_is_exactly_determined() {
        for order in 2..=4 {
            let fam = config_family(order, 19);
            assert!(fam.len() > 10, "order {order}: {}", fam.len());
            for c in &fam {
                assert_eq!(c.order(), order);
                assert_eq!(c.coefficients_used(), 19);
                let d = c.q_degrees();
                assert!(d.iter().max().unwrap() - d.iter().min().unwrap() <= 2);
                assert!((-1..=4).contains(&c.p_degree()));
            }
            let mut sorted = fam.clone();
            sorted.sort_by_key(|c| (c.p_degree(), c.q_degrees().to_vec()));
            sorted.dedup();
            assert_eq!(sorted, fam);
        }
        assert!(config_family(1, 19).is_empty());
        assert!(config_family(4, 3).is_empty());
    }

    fn central_binomial(len: usize) -> Series {
        // C(2n, n) via C(2n+2, n+1) = C(2n, n)·2(2n+1)/(n+1).
        let mut c = vec![IBig::ONE];
        for n in 0..len - 1 {
            let next = &c[n] * IBig::from(2 * (2 * n + 1)) / IBig::from(n + 1);
            c.push(next);
        }
        Series::new("central_binomial", c)
    }

    #[test]
    fn holonomic_ensemble_is_exact() {
        let s = central_binomial(15);
        let fam = config_family(2, 15);
        let t = predict_ensemble(&s, &fam, 1, DEFAULT_TRIM).unwrap();
        assert_eq!(t.rows[0].n, 15);
        assert_eq!(real::format_sci(&t.rows[0].value, 20), "1.5511752000000000000e8");
        assert!(real::to_f64(&t.rows[0].std_dev) < 1e-50);
        assert!(t.rows[0].samples >= 2);

        let r = predict_ratios_ensemble(&s, &fam, 3, DEFAULT_TRIM).unwrap();
        let full = central_binomial(18);
        for row in &r.rows {
            let n = row.n;
            let truth = &real::from_int(&full.exact[n]) / &real::from_int(&full.exact[n - 1]);
            let rel = real::to_f64(&((&row.value - &truth) / &truth));
            assert!(rel.abs() < 1e-50, "n={n}: {rel}");
            assert!(real::to_f64(&row.std_dev) < 1e-50);
        }
    }

    #[test]
    fn too_few_fits_is_an_error() {
        let s = central_binomial(15);
        let fam = config_family(2, 15);
        assert!(matches!(
            predict_ensemble(&s, &fam[..3], 1, 0.1),
            Err(ApproximantError::EnsembleTooSmall { survivors: 3, .. })
        ));
        assert!(predict_ensemble(&s, &fam, 1, 0.5).is_err());
    }
}
