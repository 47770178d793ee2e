//! Property tests of the invariants that tie the modules together.

use anharmonic::oracle::{self, GridConfig, GridOperator};
use anharmonic::phase::Phase;
use anharmonic::series::{energy_series, AsymptoticSeries};
use anharmonic::tunneling::{self, DeviationRoute};
use anharmonic::{Case, Convention, PotentialSpec};
use num::{BigRational, Signed};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn odd_q0() -> impl Strategy<Value = u32> {
    (0u32..4).prop_map(|n| 2 * n + 1)
}

/// Coefficient of `c^{2k}` terms flips sign with `c² → -c²` for odd `k`.
fn flipped(series: &AsymptoticSeries) -> AsymptoticSeries {
    let minus = BigRational::from_integer((-1).into());
    let terms = series
        .terms
        .iter()
        .map(|t| {
            let mut t = t.clone();
            if t.c2_power % 2 != 0 {
                t.coeff = t.coeff.scale(&minus);
            }
            t
        })
        .collect();
    AsymptoticSeries::new(terms, series.truncation_order)
}

#[test]
fn bounded_series_is_the_inverted_series_with_c2_reversed() {
    for order in 1..=5 {
        let inverted = energy_series(Case::InvertedDoubleWell, order).unwrap();
        let bounded = energy_series(Case::BoundedQuartic, order).unwrap();
        assert_eq!(flipped(&inverted), bounded, "order {order}");
    }
}

#[test]
fn leading_coefficients_have_fixed_signs() {
    let s = energy_series(Case::InvertedDoubleWell, 4).unwrap();
    for t in &s.terms[1..] {
        for (_, c) in t.coeff.terms() {
            assert!(c.is_negative() || c == &BigRational::from_integer(0.into()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deviation_routes_agree(h4 in 8.0f64..200.0, c2 in 0.1f64..5.0, q0 in odd_q0()) {
        let spec = PotentialSpec::half(Case::DoubleWell, h4, c2).unwrap();
        let wkb = tunneling::ln_q_deviation_double(&spec, q0, DeviationRoute::Wkb).unwrap();
        let minimum = tunneling::ln_q_deviation_double(&spec, q0, DeviationRoute::Minimum).unwrap();
        // absolute error in the logarithm is relative error in the value
        prop_assert!((wkb - minimum).abs() < 1e-12 * minimum.abs().max(1.0));
        let r = tunneling::origin_replacement(&spec, f64::from(q0)).unwrap();
        prop_assert!(rel(r.origin_prefactor, r.minimum_prefactor) < 1e-12);
        prop_assert!((r.exponent_ratio() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn splitting_scales_between_conventions(mu in 0.5f64..2.0, lambda in 0.05f64..0.5, q0 in odd_q0()) {
        let one = tunneling::mu_lambda_spec(mu, lambda).unwrap();
        let (half, factor) = one.map_convention(Convention::Half);
        prop_assert_eq!(factor, 2.0);
        let s_one = tunneling::level_splitting(&one, q0).unwrap().splitting.unwrap();
        let s_half = tunneling::level_splitting(&half, q0).unwrap().splitting.unwrap();
        prop_assert!(rel(s_half, 2.0 * s_one) < 1e-12);
        prop_assert!(rel(s_one, tunneling::splitting_mass_one(&one, q0).unwrap()) < 1e-12);
        prop_assert!(rel(s_one, tunneling::splitting_mu_lambda(mu, lambda, q0).unwrap()) < 1e-12);
    }

    #[test]
    fn origin_values_are_antisymmetric(h4 in 8.0f64..100.0, c2 in 0.5f64..5.0, q0 in odd_q0()) {
        let spec = PotentialSpec::half(Case::DoubleWell, h4, c2).unwrap();
        let v = tunneling::wkb_origin_values(&spec, f64::from(q0)).unwrap();
        prop_assert!(rel(v.derivative_ratio(), -v.value_ratio()) < 1e-12);
        let m = tunneling::matching_constants_double(&spec, f64::from(q0)).unwrap();
        prop_assert!(rel(v.value_ratio(), m.ratios.gamma_ratio_origin.unwrap()) < 1e-12);
    }

    #[test]
    fn inverted_deviation_is_imaginary_and_decays(h4 in 10.0f64..100.0, c2 in 0.1f64..2.0, q0 in odd_q0()) {
        let spec = PotentialSpec::half(Case::InvertedDoubleWell, h4, c2).unwrap();
        let stronger = PotentialSpec::half(Case::InvertedDoubleWell, h4 * 1.5, c2).unwrap();
        let dev = tunneling::q_deviation_inverted(&spec, q0).unwrap();
        prop_assert_eq!(dev.phase, Phase::PlusI);
        prop_assume!(dev.magnitude > 1e-290);
        let x = spec.h6_over_c2();
        // past the maximum of x^(q0/2) e^(-x/6) the width decays
        if x > 3.0 * f64::from(q0) {
            prop_assert!(tunneling::q_deviation_inverted(&stronger, q0).unwrap().magnitude < dev.magnitude);
        }
    }

    #[test]
    fn beta_ratio_phase_follows_level(h4 in 1.0f64..100.0, c2 in 0.1f64..5.0, q0 in odd_q0()) {
        let spec = PotentialSpec::half(Case::InvertedDoubleWell, h4, c2).unwrap();
        let m = tunneling::matching_constants_inverted(&spec, f64::from(q0)).unwrap();
        let r = m.ratios.beta_over_beta_bar.unwrap();
        prop_assert!(r.phase.is_real());
        prop_assert_eq!(r.phase, Phase::i_pow(i64::from(q0) - 1));
        let base = 2.0 * spec.h2() / (2.0 * c2).sqrt();
        prop_assert!(rel(r.magnitude, base.powf(f64::from(q0))) < 1e-12);
    }

    #[test]
    fn series_slope_matches_finite_difference(h4 in 20.0f64..400.0, c2 in 0.1f64..2.0, q in 0.5f64..6.0) {
        let h2 = h4.sqrt();
        for case in [Case::BoundedQuartic, Case::DoubleWell, Case::InvertedDoubleWell] {
            let s = energy_series(case, 4).unwrap();
            let d = s.derivative_q().value(q, h2, c2);
            let eps = 1e-5;
            let fd = (s.value(q + eps, h2, c2) - s.value(q - eps, h2, c2)) / (2.0 * eps);
            prop_assert!((d - fd).abs() < 1e-6 * d.abs().max(1.0));
        }
    }

    #[test]
    fn sturm_count_is_monotone(h4 in 1.0f64..50.0, c2 in 0.1f64..2.0, a in -20.0f64..60.0, b in -20.0f64..60.0) {
        let spec = PotentialSpec::half(Case::DoubleWell, h4, c2).unwrap();
        let op = GridOperator::new(|z| spec.potential_value(z), 6.0, 301);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(op.sturm_count(lo) <= op.sturm_count(hi));
    }

    #[test]
    fn furry_factor_decreases(n in 0u32..40) {
        prop_assert!(tunneling::furry_factor(n + 1) < tunneling::furry_factor(n));
    }
}

#[test]
fn grid_matches_series_for_a_moderate_bounded_quartic() {
    let spec = PotentialSpec::half(Case::BoundedQuartic, 400.0, 1.0).unwrap();
    let config = GridConfig::for_spec(&spec, 3, 3001).unwrap();
    let grid = oracle::eig_lowest(&spec, &config, 3).unwrap();
    let series = energy_series(Case::BoundedQuartic, 4).unwrap();
    for (n, e) in grid.best().iter().enumerate() {
        let q = 2.0 * n as f64 + 1.0;
        assert!((e - series.value(q, spec.h2(), spec.c2)).abs() < 1e-6, "n = {n}");
    }
}

#[test]
fn mass_one_grid_splitting_is_half_the_mapped_one() {
    let one = PotentialSpec::new(Case::DoubleWell, 20.0, 1.0, Convention::One).unwrap();
    let (half, _) = one.to_half();
    let c1 = GridConfig::for_spec(&one, 2, 1201).unwrap();
    let c2 = GridConfig::for_spec(&half, 2, 1201).unwrap();
    let s_one = oracle::splitting_numeric(&one, &c1, 0).unwrap();
    let s_half = oracle::splitting_numeric(&half, &c2, 0).unwrap();
    assert!(rel(s_half, 2.0 * s_one) < 1e-8);
}
