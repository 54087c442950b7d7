#![allow(dead_code)]

use noma_underlay::channels::{
    cdf_min_over_exp_ratio, cdf_sc_max, cdf_sc_min_over_exp_ratio, cdf_sc_scaled_exp_ratio,
    cdf_scaled_exp_ratio, draw_channels, survival_sc_y, survival_y, AntennaConfig, ChannelDraw,
    ChannelProfile, DerivedRateParams,
};
use noma_underlay::closed_form::PowerSplit;
use noma_underlay::montecarlo::{instantaneous_sinrs, stream_rng};

pub const KS_SAMPLES: usize = 1_000_000;
pub const KS_LIMIT: f64 = 0.002;

pub fn scenario() -> ChannelProfile {
    ChannelProfile::default_scenario()
}

pub fn split() -> PowerSplit {
    PowerSplit::from_a2(0.1).unwrap()
}

pub fn antennas(n_r: usize, n_d: usize) -> AntennaConfig {
    AntennaConfig::new(n_r, n_d).unwrap()
}

/// `n` values of `f` over independent draws from one seeded stream.
pub fn sample<F: FnMut(&ChannelDraw) -> f64>(
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    n: usize,
    seed: u64,
    mut f: F,
) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut draw = draw_channels(profile, antennas, &mut rng);
    let mut out = Vec::with_capacity(n);
    out.push(f(&draw));
    for _ in 1..n {
        draw.resample(profile, antennas, &mut rng);
        out.push(f(&draw));
    }
    out
}

/// Two-sided Kolmogorov–Smirnov distance between samples and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(mut samples: Vec<f64>, cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Every sampled-vs-analytic distribution check, as `(label, KS distance)`.
pub fn ks_suite(n: usize, seed: u64) -> Vec<(&'static str, f64)> {
    let p = scenario();
    let a2 = 0.1;
    let single = AntennaConfig::SINGLE;
    let params = DerivedRateParams::from_profile(&p);
    let mut out = Vec::new();

    let xs = sample(&p, single, n, seed, |d| d.delta_sr().min(d.delta_sd()) / d.lambda_sp());
    out.push((
        "min(λsr, λsd)/λsp",
        ks_distance(xs, |x| cdf_min_over_exp_ratio(x, params.phi(), p.omega_sp()).unwrap()),
    ));

    let xs = sample(&p, single, n, seed + 1, |d| a2 * d.delta_sr() / d.lambda_sp());
    out.push((
        "a2·λsr/λsp",
        ks_distance(xs, |x| cdf_scaled_exp_ratio(x, a2, p.omega_sr(), p.omega_sp()).unwrap()),
    ));

    let xs = sample(&p, single, n, seed + 2, |d| d.delta_rd() / d.lambda_rp());
    out.push((
        "λrd/λrp",
        ks_distance(xs, |x| cdf_scaled_exp_ratio(x, 1.0, p.omega_rd(), p.omega_rp()).unwrap()),
    ));

    let xs = sample(&p, single, n, seed + 3, |d| {
        (a2 * d.delta_sr() / d.lambda_sp()).min(d.delta_rd() / d.lambda_rp())
    });
    out.push(("Y (1,1)", ks_distance(xs, |x| 1.0 - survival_y(x, a2, &p).unwrap())));

    let ant = antennas(3, 1);
    let xs = sample(&p, ant, n, seed + 4, |d| d.delta_sr());
    out.push(("δsr, 3 antennas", ks_distance(xs, |x| cdf_sc_max(x, 3, p.omega_sr()).unwrap())));

    let ant = antennas(2, 2);
    let xs = sample(&p, ant, n, seed + 5, |d| d.delta_sr().min(d.delta_sd()) / d.lambda_sp());
    out.push((
        "min(δsr, δsd)/λsp (2,2)",
        ks_distance(xs, |x| cdf_sc_min_over_exp_ratio(x, ant, &params, p.omega_sp()).unwrap()),
    ));

    let xs = sample(&p, ant, n, seed + 6, |d| a2 * d.delta_sr() / d.lambda_sp());
    out.push((
        "a2·δsr/λsp (2 antennas)",
        ks_distance(xs, |x| {
            cdf_sc_scaled_exp_ratio(x, a2, 2, p.omega_sr(), p.omega_sp()).unwrap()
        }),
    ));

    let ant = antennas(2, 3);
    let xs = sample(&p, ant, n, seed + 7, |d| {
        (a2 * d.delta_sr() / d.lambda_sp()).min(d.delta_rd() / d.lambda_rp())
    });
    out.push((
        "𝒴 (2,3)",
        ks_distance(xs, |x| 1.0 - survival_sc_y(x, a2, ant, &p).unwrap()),
    ));

    let q = 10.0;
    let s = split();
    let xs = sample(&p, single, n, seed + 8, |d| {
        let g = instantaneous_sinrs(d, q, &s);
        g.sr2.min(g.rd)
    });
    out.push((
        "min(γsr2, γrd) at q = 10",
        ks_distance(xs, |x| 1.0 - survival_y(x / q, a2, &p).unwrap()),
    ));

    out
}
