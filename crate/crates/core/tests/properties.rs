use dashu_ratio::RBig;
use proptest::prelude::*;
use twostack::analysis::{gradient_estimator, lambda_estimator, ratios, ratios_with_tail};
use twostack::approximant::{config_family, fit_da, predict_ensemble, predict_ratios_ensemble, DEFAULT_TRIM};
use twostack::automata::build_gamma;
use twostack::enumerator::{count_achievable, count_with_start_sequence, ShardSpec};
use twostack::machine::run_sequence;
use twostack::{fixtures, real, Letter, MachineState, Series, Word};

/// A legal operation sequence for `n` items, choosing among the legal moves
/// by `picks`.
fn legal_word(n: usize, picks: &[u8]) -> Word {
    let mut st = MachineState::initial(n);
    let mut letters = Vec::new();
    let mut picks = picks.iter().cycle();
    while !st.is_drained() {
        let legal: Vec<Letter> = Letter::ALL.into_iter().filter(|&l| st.can_apply(l)).collect();
        let l = legal[*picks.next().unwrap() as usize % legal.len()];
        st.apply_in_place(l).unwrap();
        letters.push(l);
    }
    Word::new(letters)
}

proptest! {
    #[test]
    fn moves_conserve_labels(n in 0usize..10, picks in prop::collection::vec(any::<u8>(), 1..40)) {
        let w = legal_word(n, &picks);
        let mut st = MachineState::initial(n);
        let all: Vec<u8> = (1..=n as u8).collect();
        for &l in w.letters() {
            st.apply_in_place(l).unwrap();
            prop_assert_eq!(st.labels(), all.clone());
        }
        let p = run_sequence(n, &w).unwrap();
        let mut v = p.values().to_vec();
        v.sort_unstable();
        prop_assert_eq!(v, all);
    }

    #[test]
    fn short_gamma_truncations_agree(n in 1usize..4, picks in prop::collection::vec(any::<u8>(), 1..12)) {
        let w = legal_word(n, &picks);
        prop_assert_eq!(build_gamma(n).accepts(w.letters()), build_gamma(n + 1).accepts(w.letters()));
    }

    #[test]
    fn ratios_ignore_scaling(v in prop::collection::vec(1u64..1_000_000, 3..20), c in 1u64..1000) {
        let s = Series::from_u64("s", &v);
        let scaled: Vec<u64> = v.iter().map(|x| x * c).collect();
        let a = ratios(&s);
        let b = ratios(&Series::from_u64("c", &scaled));
        for (x, y) in a.rows.iter().zip(&b.rows) {
            prop_assert!(real::to_f64(&((&x.r - &y.r) / &x.r)).abs() < 1e-60);
        }
    }

    #[test]
    fn gradient_vanishes_on_geometric_series(mu in 2u64..20, len in 4u32..15) {
        let v: Vec<u64> = (0..len).map(|k| mu.pow(k)).collect();
        let s = Series::from_u64("g", &v);
        let g = gradient_estimator(&ratios(&s), &real::from_i64(mu as i64)).unwrap();
        prop_assert!(g.rows.iter().all(|r| r.value == real::zero()));
    }

    #[test]
    fn lambda_of_identical_quotients_vanishes(v in prop::collection::vec(1u64..1_000_000, 3..20), gd in -3.0f64..0.0) {
        let r = ratios(&Series::from_u64("s", &v));
        let l = lambda_estimator(&r, &r, gd, gd + 0.5).unwrap();
        prop_assert!(l.rows.iter().all(|row| row.value == real::zero()));
    }
}

proptest! {
    // Each case enumerates or fits exactly; a few dozen cover the space.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shards_partition_the_count(n in 2usize..=8, m_seed in 0usize..8) {
        let m = 1 + m_seed % (n - 1);
        let total: u64 = ShardSpec::all(n, m)
            .iter()
            .map(|s| count_with_start_sequence(s, false).unwrap())
            .sum();
        prop_assert_eq!(total, count_achievable(n, true).unwrap());
    }

    #[test]
    fn fitted_approximants_reexpand_exactly(order in 2usize..=4, pick in any::<prop::sample::Index>()) {
        let s = fixtures::two_stacks_in_series().truncated(19);
        let fam = config_family(order, 19);
        let cfg = &fam[pick.index(fam.len())];
        if let Ok(da) = fit_da(&s, cfg) {
            let f: Vec<RBig> = s.exact.iter().map(|v| RBig::from(v.clone())).collect();
            prop_assert_eq!(da.reexpand(), f);
        }
    }
}

#[test]
fn distinct_words_share_permutations() {
    let a: Word = "ρλμρλμ".parse().unwrap();
    let b: Word = "ρρλλμμ".parse().unwrap();
    assert_ne!(a, b);
    assert_eq!(run_sequence(2, &a).unwrap(), run_sequence(2, &b).unwrap());
}

#[test]
fn ratio_first_and_coefficient_first_agree() {
    let s = fixtures::two_stacks_in_series();
    let cfgs = config_family(4, 20);
    let coeffs = predict_ensemble(&s, &cfgs, 6, DEFAULT_TRIM).unwrap();
    let direct = predict_ratios_ensemble(&s, &cfgs, 6, DEFAULT_TRIM).unwrap();
    let extended = s.clone().with_tail(
        coeffs
            .rows
            .iter()
            .map(|r| twostack::Approx { value: r.value.clone(), std_dev: r.std_dev.clone() })
            .collect(),
    );
    let via_coeffs = ratios(&extended);
    let via_ratios = ratios_with_tail(&s, &direct);
    for n in 20..=25 {
        let (a, b) = (via_coeffs.get(n).unwrap(), via_ratios.get(n).unwrap());
        let diff = real::to_f64(&(&a.r - &b.r)).abs();
        let sd = real::to_f64(&a.std_dev).hypot(real::to_f64(&b.std_dev));
        assert!(diff <= sd, "n = {n}: |Δ| = {diff:e}, combined σ = {sd:e}");
    }
}

#[test]
fn accuracy_degrades_with_offset() {
    // Too few terms for the order-2 family to capture the closed form, so
    // predictions are approximate.
    let mut c = vec![dashu_int::IBig::ONE];
    for n in 0..24usize {
        let next = &c[n] * dashu_int::IBig::from(2 * (2 * n + 1)) / dashu_int::IBig::from(n + 2);
        c.push(next);
    }
    let full = Series::new("catalan", c);
    let s = full.truncated(8);
    let t = predict_ensemble(&s, &config_family(2, 8), 10, DEFAULT_TRIM).unwrap();
    let err = |i: usize| {
        let row = &t.rows[i];
        let truth = real::from_int(&full.exact[row.n]);
        real::to_f64(&((&row.value - &truth) / &truth)).abs()
    };
    assert!(err(9) >= err(0), "offset 10: {:e}, offset 1: {:e}", err(9), err(0));
}
