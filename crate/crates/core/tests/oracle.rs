mod common;

use betagamma::oracle::{
    beta_eval, beta_via_gamma, gamma_eval, gamma_recurrence_residual, ln_gamma_eval,
};
use betagamma::QuadratureConfig;
use common::{stirling_beta, stirling_ln_gamma};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn stirling_reference_sanity() {
    assert!((stirling_ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    assert!(stirling_ln_gamma(1.0).abs() < 1e-14);
    assert!((stirling_ln_gamma(6.0) - 120f64.ln()).abs() < 1e-13);
}

#[test]
fn half_integer_gamma() {
    let g = gamma_eval(0.5, &cfg()).unwrap();
    assert!((g.value - 1.772_453_850_905_516).abs() < 1e-13);
    assert!(g.est_error < 1e-12);
}

#[test]
fn recurrence_residual_on_sample_points() {
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let r = gamma_recurrence_residual(x, &cfg()).unwrap();
        assert!(r < 1e-10, "x = {x}: {r:e}");
    }
}

#[test]
fn large_arguments_in_log_space() {
    for x in [150.0, 400.0, 1000.0] {
        let l = ln_gamma_eval(x, &cfg()).unwrap();
        let reference = stirling_ln_gamma(x);
        assert!(
            (l.ln_value - reference).abs() < 1e-12 * reference,
            "x = {x}"
        );
    }
    assert!(gamma_eval(200.0, &cfg()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ln_gamma_matches_stirling(x in 0.05f64..60.0) {
        let l = ln_gamma_eval(x, &cfg()).unwrap().ln_value;
        let reference = stirling_ln_gamma(x);
        prop_assert!((l - reference).abs() < 1e-12 * reference.abs().max(1.0), "{} vs {}", l, reference);
    }

    #[test]
    fn beta_is_symmetric(x in 0.05f64..20.0, y in 0.05f64..20.0) {
        let a = beta_eval(x, y, &cfg()).unwrap().value;
        let b = beta_eval(y, x, &cfg()).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-13 * a);
    }

    #[test]
    fn beta_routes_agree(x in 0.05f64..40.0, y in 0.05f64..40.0) {
        let direct = beta_eval(x, y, &cfg()).unwrap();
        let via_gamma = beta_via_gamma(x, y, &cfg()).unwrap();
        let reference = stirling_beta(x, y);
        prop_assert!((direct.value / reference - 1.0).abs() < 1e-11);
        prop_assert!((via_gamma.value / direct.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn gamma_recurrence_holds(x in 0.05f64..30.0) {
        prop_assert!(gamma_recurrence_residual(x, &cfg()).unwrap() < 1e-10);
    }
}
