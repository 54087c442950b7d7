mod common;

use common::{antennas, sample, scenario, KS_LIMIT, KS_SAMPLES};
use noma_underlay::channels::{
    cdf_min_over_exp_ratio, cdf_sc_max, cdf_sc_min_over_exp_ratio, cdf_sc_scaled_exp_ratio,
    cdf_scaled_exp_ratio, pdf_min_over_exp_ratio, pdf_sc_min_over_exp_ratio, survival_sc_y,
    survival_y, AntennaConfig, ChannelProfile, DerivedRateParams,
};
use noma_underlay::quadrature::integrate_semi_infinite;
use proptest::prelude::*;

#[test]
fn sampled_ratios_match_their_distributions() {
    for (label, d) in common::ks_suite(KS_SAMPLES, 1000) {
        assert!(d < KS_LIMIT, "{label}: KS distance {d}");
    }
}

#[test]
fn exponential_sample_mean() {
    let p = ChannelProfile::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
    let xs = sample(&p, AntennaConfig::SINGLE, 1_000_000, 5, |d| d.lambda_sr()[0]);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((0.997..=1.003).contains(&mean), "{mean}");
}

#[test]
fn two_antenna_direct_link_maximum_mean() {
    let xs = sample(&scenario(), antennas(2, 2), 1_000_000, 6, |d| d.delta_sd());
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 1.5).abs() < 0.005 * 1.5, "{mean}");
}

#[test]
fn sc_survival_matches_empirical_on_grid() {
    let p = scenario();
    let ant = antennas(2, 3);
    let ys = sample(&p, ant, 1_000_000, 7, |d| {
        (0.1 * d.delta_sr() / d.lambda_sp()).min(d.delta_rd() / d.lambda_rp())
    });
    for &x in &[0.01, 0.05, 0.1, 0.3, 1.0, 3.0] {
        let empirical = ys.iter().filter(|&&y| y > x).count() as f64 / ys.len() as f64;
        let analytic = survival_sc_y(x, 0.1, ant, &p).unwrap();
        assert!((empirical - analytic).abs() < 0.003, "x = {x}: {empirical} vs {analytic}");
    }
}

#[test]
fn densities_integrate_to_one() {
    let p = scenario();
    let params = DerivedRateParams::from_profile(&p);
    let single = integrate_semi_infinite(
        |x| pdf_min_over_exp_ratio(x, params.phi(), p.omega_sp()).unwrap(),
        1e-11,
    )
    .unwrap();
    assert!((single.value - 1.0).abs() < 1e-8, "{}", single.value);
    for (nr, nd) in [(3, 3), (2, 5), (8, 8)] {
        let ant = antennas(nr, nd);
        let total = integrate_semi_infinite(
            |x| pdf_sc_min_over_exp_ratio(x, ant, &params, p.omega_sp()).unwrap(),
            1e-11,
        )
        .unwrap();
        assert!((total.value - 1.0).abs() < 1e-8, "({nr},{nd}): {}", total.value);
    }
}

#[test]
fn sixteen_antenna_density_normalization() {
    // Coefficient products reach C(16,8)² ≈ 1.7e8, so the density carries
    // about 1e-8 absolute rounding noise at this size.
    let p = scenario();
    let params = DerivedRateParams::from_profile(&p);
    let ant = antennas(16, 16);
    let total = integrate_semi_infinite(
        |x| pdf_sc_min_over_exp_ratio(x, ant, &params, p.omega_sp()).unwrap(),
        1e-7,
    )
    .unwrap();
    assert!((total.value - 1.0).abs() < 1e-6, "{}", total.value);
}

#[test]
fn cdfs_at_origin_and_far_tail() {
    let p = scenario();
    let params = DerivedRateParams::from_profile(&p);
    let ant = antennas(3, 2);
    assert_eq!(cdf_min_over_exp_ratio(0.0, params.phi(), 5.5).unwrap(), 0.0);
    assert_eq!(cdf_sc_min_over_exp_ratio(0.0, ant, &params, 5.5).unwrap(), 0.0);
    assert_eq!(cdf_scaled_exp_ratio(0.0, 0.1, 10.0, 5.5).unwrap(), 0.0);
    assert_eq!(cdf_sc_scaled_exp_ratio(0.0, 0.1, 4, 10.0, 5.5).unwrap(), 0.0);
    assert_eq!(survival_y(0.0, 0.1, &p).unwrap(), 1.0);
    assert!((survival_sc_y(0.0, 0.1, ant, &p).unwrap() - 1.0).abs() < 1e-15);
    assert!(cdf_sc_min_over_exp_ratio(1e9, ant, &params, 5.5).unwrap() > 1.0 - 1e-8);
    assert!(cdf_sc_max(1e4, 16, 10.0).unwrap() > 1.0 - 1e-12);
    // O(1/x²) survival decay
    let s1 = survival_y(1e3, 0.1, &p).unwrap();
    let s2 = survival_y(2e3, 0.1, &p).unwrap();
    assert!((s1 / s2 - 4.0).abs() < 0.01);
}

#[test]
fn negative_arguments_are_domain_errors() {
    let p = scenario();
    let params = DerivedRateParams::from_profile(&p);
    assert!(pdf_min_over_exp_ratio(-1.0, 1.1, 5.5).is_err());
    assert!(cdf_scaled_exp_ratio(-1.0, 1.0, 1.0, 1.0).is_err());
    assert!(cdf_scaled_exp_ratio(1.0, 1.5, 1.0, 1.0).is_err());
    assert!(survival_y(-0.1, 0.1, &p).is_err());
    assert!(survival_y(1.0, 1.0, &p).is_err());
    assert!(cdf_sc_max(-1.0, 2, 1.0).is_err());
    assert!(cdf_sc_max(1.0, 17, 1.0).is_err());
    assert!(cdf_sc_max(1.0, 0, 1.0).is_err());
    assert!(pdf_sc_min_over_exp_ratio(-1.0, AntennaConfig::SINGLE, &params, 5.5).is_err());
}

fn antenna_strategy() -> impl Strategy<Value = AntennaConfig> {
    (1usize..=16, 1usize..=16).prop_map(|(r, d)| AntennaConfig::new(r, d).unwrap())
}

fn profile_strategy() -> impl Strategy<Value = ChannelProfile> {
    (0.5f64..30.0, 0.01f64..0.99, 0.1f64..30.0, 0.1f64..20.0, 0.1f64..20.0).prop_map(
        |(sr, sd_frac, rd, sp, rp)| ChannelProfile::new(sr, sr * sd_frac, rd, sp, rp).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sc_max_alternating_equals_power_form(x in 0.0f64..200.0, n in 1usize..=16, omega in 0.1f64..50.0) {
        let power = (1.0 - (-x / omega).exp()).powi(n as i32);
        prop_assert!((cdf_sc_max(x, n, omega).unwrap() - power).abs() < 1e-12);
    }

    #[test]
    fn sc_cdf_is_monotone_and_bounded(
        p in profile_strategy(),
        ant in antenna_strategy(),
        x in 0.0f64..50.0,
        dx in 0.0f64..5.0,
    ) {
        let params = DerivedRateParams::from_profile(&p);
        let f0 = cdf_sc_min_over_exp_ratio(x, ant, &params, p.omega_sp()).unwrap();
        let f1 = cdf_sc_min_over_exp_ratio(x + dx, ant, &params, p.omega_sp()).unwrap();
        prop_assert!((0.0..=1.0).contains(&f0));
        prop_assert!(f1 >= f0 - 1e-12);
    }

    #[test]
    fn survival_is_monotone_and_complements_cdf(
        p in profile_strategy(),
        ant in antenna_strategy(),
        a2 in 0.01f64..0.49,
        x in 0.0f64..50.0,
        dx in 0.0f64..5.0,
    ) {
        let s0 = survival_sc_y(x, a2, ant, &p).unwrap();
        let s1 = survival_sc_y(x + dx, a2, ant, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&s0));
        prop_assert!(s1 <= s0 + 1e-12);
        // survival of the min is the product of the two marginal survivals
        let relay = 1.0 - cdf_sc_scaled_exp_ratio(x, a2, ant.n_r(), p.omega_sr(), p.omega_sp()).unwrap();
        let dest = 1.0 - cdf_sc_scaled_exp_ratio(x, 1.0, ant.n_d(), p.omega_rd(), p.omega_rp()).unwrap();
        prop_assert!((s0 - relay * dest).abs() < 1e-10);
    }

    #[test]
    fn single_antenna_sc_forms_reduce(p in profile_strategy(), a2 in 0.01f64..0.49, x in 0.0f64..100.0) {
        let params = DerivedRateParams::from_profile(&p);
        let one = AntennaConfig::SINGLE;
        let a = pdf_sc_min_over_exp_ratio(x, one, &params, p.omega_sp()).unwrap();
        let b = pdf_min_over_exp_ratio(x, params.phi(), p.omega_sp()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        let a = survival_sc_y(x, a2, one, &p).unwrap();
        let b = survival_y(x, a2, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        let a = cdf_sc_scaled_exp_ratio(x, a2, 1, p.omega_sr(), p.omega_sp()).unwrap();
        let b = cdf_scaled_exp_ratio(x, a2, p.omega_sr(), p.omega_sp()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
