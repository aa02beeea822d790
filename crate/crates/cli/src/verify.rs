//! Regression checks against the shipped reference data, recomputed at desk
//! scale.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use twostack::approximant::{config_family, predict_ensemble, predict_ratios_ensemble, DEFAULT_TRIM};
use twostack::automata::{build_gamma, find_forbidden_words};
use twostack::enumerator::{achievable_series, count_achievable, SeriesOptions};
use twostack::series::{binomial_transform, inverse_binomial_transform};
use twostack::table::EstimateTable;
use twostack::{fixtures, real, Series};

use crate::CliError;

pub const FIXTURES: &[&str] = &[
    "coefficients-small",
    "s19-prediction",
    "transforms",
    "series-predictions",
    "ratio-predictions",
    "forbidden-words",
];

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Check {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {}: {}", self.name, self.detail)
    }
}

pub fn run(fixture: &str, workers: usize) -> Result<Vec<Check>, CliError> {
    match fixture {
        "all" => {
            let mut out = Vec::new();
            for f in FIXTURES {
                out.extend(run(f, workers)?);
            }
            Ok(out)
        }
        "coefficients-small" => coefficients_small(workers),
        "s19-prediction" => Ok(vec![s19_prediction()?]),
        "transforms" => Ok(vec![transforms()]),
        "series-predictions" => table_check(
            "series-predictions",
            &fixtures::series_predictions(),
            |s| predict_ensemble(s, &config_family(4, s.exact.len()), 6, DEFAULT_TRIM),
        ),
        "ratio-predictions" => table_check(
            "ratio-predictions",
            &fixtures::series_ratios(),
            |s| predict_ratios_ensemble(s, &config_family(4, s.exact.len()), 6, DEFAULT_TRIM),
        ),
        "forbidden-words" => Ok(forbidden_words()),
        other => Err(CliError::Usage(format!(
            "unknown fixture {other:?}; known: all, {}",
            FIXTURES.join(", ")
        ))),
    }
}

fn coefficients_small(workers: usize) -> Result<Vec<Check>, CliError> {
    let expected = fixtures::two_stacks_in_series().truncated(11);
    let opts = SeriesOptions {
        start_len: 2,
        workers,
        ..Default::default()
    };
    let got = achievable_series(10, &opts)?;
    let first_bad = (0..=10).find(|&n| got.exact[n] != expected.exact[n]);
    let detail = match first_bad {
        None => format!("s_0..s_10 match, s_10 = {}", got.exact[10]),
        Some(n) => format!("s_{n} = {} but expected {}", got.exact[n], expected.exact[n]),
    };
    Ok(vec![Check::new("coefficients-small", first_bad.is_none(), detail)])
}

fn s19_prediction() -> Result<Check, CliError> {
    let s = fixtures::two_stacks_in_series();
    let truth = real::from_int(&s.exact[19]);
    let t = predict_ensemble(&s.truncated(19), &config_family(4, 19), 1, DEFAULT_TRIM)?;
    let row = &t.rows[0];
    let rel = real::to_f64(&((&row.value - &truth) / &truth)).abs();
    Ok(Check::new(
        "s19-prediction",
        rel <= 1e-8,
        format!(
            "predicted {} ± {} from {} approximants, true {}, relative error {rel:.2e}",
            real::format_csv(&row.value),
            real::format_sci(&row.std_dev, 4),
            row.samples,
            s.exact[19]
        ),
    ))
}

fn transforms() -> Check {
    let mut rng = StdRng::seed_from_u64(0x2515);
    let mut bad = 0;
    for _ in 0..100 {
        let len = rng.gen_range(1..40);
        let v: Vec<u64> = (0..len).map(|_| rng.gen_range(0..1u64 << 40)).collect();
        let t = Series::from_u64("t", &v);
        if inverse_binomial_transform(&binomial_transform(&t)).exact != t.exact {
            bad += 1;
        }
    }
    Check::new(
        "transforms",
        bad == 0,
        format!("{} of 100 random sequences round-trip exactly", 100 - bad),
    )
}

fn table_check(
    name: &str,
    reference: &EstimateTable,
    predict: impl Fn(&Series) -> Result<EstimateTable, twostack::approximant::ApproximantError>,
) -> Result<Vec<Check>, CliError> {
    let ours = predict(&fixtures::two_stacks_in_series())?;
    let mut out = Vec::new();
    for row in &ours.rows {
        let Some(p) = reference.get(row.n) else {
            continue;
        };
        let diff = real::to_f64(&(&row.value - &p.value)).abs();
        let sigma = real::to_f64(&p.std_dev);
        out.push(Check::new(
            &format!("{name} n={}", row.n),
            diff <= 10.0 * sigma,
            format!(
                "{} vs reference {} (|Δ| = {:.2} reference σ)",
                real::format_csv(&row.value),
                real::format_csv(&p.value),
                diff / sigma
            ),
        ));
    }
    Ok(out)
}

fn forbidden_words() -> Vec<Check> {
    let gamma = build_gamma(6);
    let words = find_forbidden_words(6);
    let leaked: Vec<String> = words
        .iter()
        .filter(|w| gamma.accepts(w.letters()))
        .map(|w| w.to_string())
        .collect();
    let mut checks = vec![Check::new(
        "forbidden-words rejected",
        leaked.is_empty(),
        format!("{} minimal forbidden words up to length 6, {} accepted", words.len(), leaked.len()),
    )];
    for n in 1..=7 {
        let pruned = count_achievable(n, true);
        let full = count_achievable(n, false);
        let ok = matches!((&pruned, &full), (Ok(a), Ok(b)) if a == b);
        checks.push(Check::new(
            &format!("pruning sound n={n}"),
            ok,
            format!("pruned {pruned:?}, unpruned {full:?}"),
        ));
    }
    checks
}
