//! Closed-form average achievable rates of the two NOMA symbols.
//!
//! Symbol `s1` is decoded at both the relay and the destination, so its
//! rate is governed by `min(λ_sr, λ_sd)/λ_sp`; symbol `s2` travels over the
//! relay, so its rate is governed by `min(a₂λ_sr/λ_sp, λ_rd/λ_rp)`. With
//! selection combining each `λ` becomes the corresponding branch maximum
//! `δ` and the single-antenna results turn into alternating binomial sums.
//!
//! The `s2` closed forms divide by differences of link parameters. When one
//! of those differences vanishes the expression has a removable singularity;
//! instead of perturbing inputs we evaluate the defining survival integral
//! by adaptive quadrature and tag the result [`Method::QuadratureFallback`].

use std::f64::consts::LOG2_E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{
    check_a2, pdf_min_over_exp_ratio, pdf_sc_min_over_exp_ratio, sc_double_sum,
    survival_sc_y_unchecked, survival_y_unchecked, AntennaConfig, ChannelProfile,
    DerivedRateParams,
};
use crate::error::{check_positive, Error, Result};
use crate::numeric::{alternating_coefficients, CompensatedSum};
use crate::quadrature::{integrate_semi_infinite, DEFAULT_ABS_TOL};

/// Relative width of the band around a removable singularity.
pub const SINGULARITY_REL_TOL: f64 = 1e-8;

/// NOMA power-allocation coefficients `(a1, a2)` with `a1 + a2 = 1` and
/// `a1 > a2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    a1: f64,
    a2: f64,
}

impl PowerSplit {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite()) {
            return Err(Error::InvalidSplit(format!("a1 = {a1}, a2 = {a2} must be finite")));
        }
        if ((a1 + a2) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSplit(format!(
                "a1 + a2 = {} must equal 1",
                a1 + a2
            )));
        }
        if !(a2 > 0.0 && a1 > a2) {
            return Err(Error::InvalidSplit(format!(
                "need a1 > a2 > 0, got a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(Self { a1, a2 })
    }

    /// Split with `a1 = 1 - a2`.
    pub fn from_a2(a2: f64) -> Result<Self> {
        Self::new(1.0 - a2, a2)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }
}

/// How a rate value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    QuadratureFallback,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::QuadratureFallback => "quadrature_fallback",
        })
    }
}

/// An average rate in bits/s/Hz together with the evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub value: f64,
    pub method: Method,
}

impl Rate {
    fn closed(value: f64) -> Self {
        Self {
            value: value.max(0.0),
            method: Method::ClosedForm,
        }
    }

    fn fallback(value: f64) -> Self {
        Self {
            value: value.max(0.0),
            method: Method::QuadratureFallback,
        }
    }
}

/// Rates of both symbols and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub rate_s1: f64,
    pub rate_s2: f64,
    pub rate_sum: f64,
    pub method_s1: Method,
    pub method_s2: Method,
}

/// `u·log₂(u/v)/(u − v)`, continuous through `u = v` where it equals `log₂e`.
pub fn log_ratio_kernel(u: f64, v: f64) -> Result<f64> {
    check_positive("u", u)?;
    check_positive("v", v)?;
    Ok(kernel(u, v))
}

#[inline]
fn kernel(u: f64, v: f64) -> f64 {
    let diff = u - v;
    let t = diff / v;
    if diff.abs() <= SINGULARITY_REL_TOL * u.max(v) {
        // (1+t)ln(1+t)/t = 1 + t/2 - t²/6 + O(t³)
        return LOG2_E * (1.0 + t * (0.5 - t / 6.0));
    }
    let ln_ratio = if t.abs() < 0.5 { t.ln_1p() } else { (u / v).ln() };
    u * ln_ratio * LOG2_E / diff
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= SINGULARITY_REL_TOL * a.abs().max(b.abs())
}

fn check_q(q: f64) -> Result<()> {
    check_positive("q", q)
}

/// Average rate of `s1` with one antenna per receiver.
pub fn rate_s1(q: f64, profile: &ChannelProfile, split: &PowerSplit) -> Result<Rate> {
    check_q(q)?;
    let c = DerivedRateParams::from_profile(profile).phi() * profile.omega_sp();
    Ok(Rate::closed(
        0.5 * (kernel(q, c) - kernel(split.a2() * q, c)),
    ))
}

/// Average rate of `s2` with one antenna per receiver.
pub fn rate_s2(q: f64, profile: &ChannelProfile, split: &PowerSplit) -> Result<Rate> {
    check_q(q)?;
    let a2 = split.a2();
    let (sr, rd, sp, rp) = (
        profile.omega_sr(),
        profile.omega_rd(),
        profile.omega_sp(),
        profile.omega_rp(),
    );
    if near(rd * sp, a2 * rp * sr) || near(rd * q, rp) || near(sp, a2 * sr * q) {
        return rate_s2_integral(q, profile, split, AntennaConfig::SINGLE).map(Rate::fallback);
    }

    let pre = 0.5 * a2 * rd * sr * q / ((rd * sp - a2 * rp * sr) * (rd * q - rp) * (sp - a2 * sr * q));
    let mut bracket = CompensatedSum::new();
    bracket.add(rp * sp * (a2 * rp * sr / (rd * sp)).log2());
    bracket.add(a2 * rp * sr * q * (rd * q / rp).log2());
    bracket.add(-rd * sp * q * (a2 * sr * q / sp).log2());
    Ok(Rate::closed(pre * bracket.value()))
}

/// Average rate of `s1` with selection combining at relay and destination.
pub fn rate_s1_sc(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
) -> Result<Rate> {
    check_q(q)?;
    let params = DerivedRateParams::from_profile(profile);
    let a2q = split.a2() * q;
    let sum = sc_double_sum(antennas, &params, |xi| {
        let c = xi * profile.omega_sp();
        kernel(q, c) - kernel(a2q, c)
    });
    Ok(Rate::closed(0.5 * sum.value()))
}

/// Average rate of `s2` with selection combining at relay and destination.
pub fn rate_s2_sc(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
) -> Result<Rate> {
    check_q(q)?;
    let a2 = split.a2();
    let (sr, rd, sp, rp) = (
        profile.omega_sr(),
        profile.omega_rd(),
        profile.omega_sp(),
        profile.omega_rp(),
    );
    let ck = alternating_coefficients(antennas.n_r());
    let dj = alternating_coefficients(antennas.n_d());

    let degenerate = (1..=antennas.n_r()).any(|k| near(a2 * sr * q, k as f64 * sp))
        || (1..=antennas.n_d()).any(|j| near(rd * q, j as f64 * rp))
        || (1..=antennas.n_r()).any(|k| {
            (1..=antennas.n_d()).any(|j| near(k as f64 * rd * sp, j as f64 * a2 * rp * sr))
        });
    if degenerate {
        return rate_s2_integral(q, profile, split, antennas).map(Rate::fallback);
    }

    let mut sum = CompensatedSum::new();
    for (ki, c) in ck.iter().enumerate() {
        let k = (ki + 1) as f64;
        sum.add(c * a2 * sr * (a2 * sr * q / (k * sp)).log2() / (a2 * sr * q - k * sp));
    }
    for (ji, d) in dj.iter().enumerate() {
        let j = (ji + 1) as f64;
        sum.add(d * rd * (rd * q / (j * rp)).log2() / (rd * q - j * rp));
    }
    for (ki, c) in ck.iter().enumerate() {
        let k = (ki + 1) as f64;
        for (ji, d) in dj.iter().enumerate() {
            let j = (ji + 1) as f64;
            let cross = k * rd * sp - j * a2 * rp * sr;
            let relay_dest = k * rd * rd * sp * (j * rp / (q * rd)).log2() / (cross * (q * rd - j * rp));
            let source_relay =
                j * a2 * a2 * rp * sr * sr * (a2 * q * sr / (k * sp)).log2()
                    / (cross * (a2 * q * sr - k * sp));
            sum.add(c * d * relay_dest);
            sum.add(c * d * source_relay);
        }
    }
    Ok(Rate::closed(0.5 * q * sum.value()))
}

/// Rates of both symbols and their sum. Single-antenna configurations use
/// the scalar formulas; anything else uses the selection-combining sums.
pub fn sum_rate(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
) -> Result<RateReport> {
    let (s1, s2) = if antennas.is_single() {
        (rate_s1(q, profile, split)?, rate_s2(q, profile, split)?)
    } else {
        (
            rate_s1_sc(q, profile, split, antennas)?,
            rate_s2_sc(q, profile, split, antennas)?,
        )
    };
    Ok(RateReport {
        rate_s1: s1.value,
        rate_s2: s2.value,
        rate_sum: s1.value + s2.value,
        method_s1: s1.method,
        method_s2: s2.method,
    })
}

/// Rate of `s1` by quadrature of its defining integral
/// `0.5 ∫ [log₂(1+qx) − log₂(1+a₂qx)] f(x) dx` against the density of
/// `min(δ_sr, δ_sd)/λ_sp`.
pub fn rate_s1_integral(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
) -> Result<f64> {
    check_q(q)?;
    let params = DerivedRateParams::from_profile(profile);
    let a2q = split.a2() * q;
    let omega_sp = profile.omega_sp();
    let single = antennas.is_single();
    let integrand = |x: f64| {
        let density = if single {
            pdf_min_over_exp_ratio(x, params.phi(), omega_sp)
        } else {
            pdf_sc_min_over_exp_ratio(x, antennas, &params, omega_sp)
        }
        .unwrap_or(f64::NAN);
        // log₂((1+qx)/(1+a₂qx)), bounded by log₂(1/a₂)
        let gain = ((q - a2q) * x / (1.0 + a2q * x)).ln_1p() * LOG2_E;
        gain * density
    };
    Ok(0.5 * integrate_semi_infinite(integrand, DEFAULT_ABS_TOL)?.value)
}

/// Rate of `s2` by quadrature of the survival form
/// `0.5·log₂(e)·q ∫ S(x)/(1+qx) dx`, with `S` the survival function of
/// `min(a₂δ_sr/λ_sp, δ_rd/λ_rp)`.
pub fn rate_s2_integral(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
) -> Result<f64> {
    check_q(q)?;
    let a2 = split.a2();
    check_a2(a2)?;
    let single = antennas.is_single();
    let integrand = |x: f64| {
        let s = if single {
            survival_y_unchecked(x, a2, profile)
        } else {
            survival_sc_y_unchecked(x, a2, antennas, profile)
        };
        s / (1.0 + q * x)
    };
    // Scale the tolerance so the rate, not the raw integral, meets it.
    let tol = DEFAULT_ABS_TOL / (0.5 * LOG2_E * q).max(1.0);
    Ok(0.5 * LOG2_E * q * integrate_semi_infinite(integrand, tol)?.value)
}
