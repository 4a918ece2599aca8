use betazeta::zerofinder::{verify_against_table, ReferenceZeroTable};
use betazeta::{c, EvalConfig, Evaluator, MetaMode, ScanOptions};
use proptest::prelude::*;

fn eval() -> Evaluator {
    Evaluator::new(EvalConfig::default()).unwrap()
}

#[test]
fn residual_small_exactly_where_zeta_small() {
    // the first ten zeros plus ninety ordinates on a 0.5 grid between them
    let e = eval();
    let table = ReferenceZeroTable::standard();
    let mut ts: Vec<f64> = (1..=10).map(|i| table.zero(i).unwrap()).collect();
    ts.extend((0..90).map(|k| 10.25 + 0.5 * k as f64));
    let (eps, delta) = (1e-4, 1e-4);
    for t in ts {
        let s = c(0.5, t);
        let residual = e.beta_residual(s).unwrap();
        let zeta = e.eta_zeta(s).unwrap().value.norm();
        assert_eq!(
            residual < eps,
            zeta < delta,
            "t = {t}: residual {residual:e}, |zeta| {zeta:e}"
        );
    }
}

#[test]
fn between_zeros_residual_is_much_larger() {
    let e = eval();
    let at_zero = e.beta_residual(c(0.5, 14.134725142)).unwrap();
    let between = e.beta_residual(c(0.5, 17.5)).unwrap();
    assert!(at_zero < 1e-4);
    assert!(between > 10.0 * at_zero);
    assert!(e.beta_residual(c(2.0, 0.0)).unwrap() > 0.0);
    assert!(e.beta_residual(c(0.5, 21.022039639)).unwrap() < 1e-4);
}

#[test]
fn meta_vanishes_with_zeta_at_first_zero() {
    let e = eval();
    let s = c(0.5, 14.134725142);
    assert!(e.meta_auto(s, MetaMode::WithBZeta).unwrap().norm() < 1e-4);
    assert!(e.eta_zeta(s).unwrap().value.norm() < 1e-4);
}

#[test]
fn finds_every_reference_zero_below_55() {
    let e = eval();
    let table = ReferenceZeroTable::standard();
    let found = e
        .find_zeros(10.0, 55.0, &ScanOptions::default(), 1e-6)
        .unwrap();
    let report = verify_against_table(&found, &table, 1e-3, (10.0, 55.0)).unwrap();
    assert!(report.is_clean(), "{}", report.summary());
    assert!(report.duplicates.is_empty());
    assert_eq!(report.matches.len(), table.in_range(10.0, 55.0).len());
}

#[test]
fn halving_the_step_finds_the_same_zeros() {
    let e = eval();
    let coarse = e
        .find_zeros(10.0, 55.0, &ScanOptions::default(), 1e-6)
        .unwrap();
    let fine = e
        .find_zeros(10.0, 55.0, &ScanOptions::default().with_step(0.0125), 1e-6)
        .unwrap();
    assert_eq!(coarse.len(), fine.len());
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a.t - b.t).abs() < 1e-5, "{} vs {}", a.t, b.t);
    }
}

#[test]
fn zeta_is_away_from_zero_between_found_zeros() {
    let e = eval();
    let found = e
        .find_zeros(10.0, 55.0, &ScanOptions::default(), 1e-6)
        .unwrap();
    for c_ in &found {
        assert!(c_.zeta_mod_at_t < 1e-4, "{c_:?}");
        assert!(c_.residual_at_t < 1e-4);
    }
    for w in found.windows(2) {
        let mid = 0.5 * (w[0].t + w[1].t);
        let z = e.eta_zeta(c(0.5, mid)).unwrap().value.norm();
        assert!(z > 0.1, "|zeta| = {z} at {mid}");
    }
}

#[test]
fn scan_rejects_empty_range() {
    let e = eval();
    assert!(e
        .find_zeros(30.0, 30.0, &ScanOptions::default(), 1e-6)
        .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn beta_pair_is_deterministic_and_consistent(re in 0.2f64..2.0, im in -40.0f64..40.0) {
        let e = eval();
        let s = c(re, im);
        if let Ok(p) = e.beta_pair(s) {
            let q = e.beta_pair(s).unwrap();
            prop_assert_eq!(&p, &q);
            prop_assert_eq!(p.b_m, e.b_m(s).unwrap());
            prop_assert_eq!(p.b_zeta, e.b_zeta(s).unwrap());
            prop_assert!((p.residual - (p.b_zeta - p.b_m).norm()).abs() == 0.0);
        }
    }
}
