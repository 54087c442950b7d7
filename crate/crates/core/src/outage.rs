//! Outage probabilities of the two NOMA symbols.
//!
//! A symbol is in outage when its instantaneous rate `0.5·log₂(1 + SINR)`
//! falls below its target. Under the optimal power policy every SINR is a
//! function of a ratio of channel gains, so outage reduces to the CDF of
//! that ratio at a threshold (`Θ₁`, `Θ₂`, `Θ`, `ε₂/q`).

use serde::Serialize;

use crate::channels::{sc_double_sum, sc_scaled_ratio_cdf_sum, AntennaConfig, ChannelProfile, DerivedRateParams};
use crate::closed_form::PowerSplit;
use crate::error::{check_positive, Error, Result};
use crate::numeric::CompensatedSum;

/// Target rates and the thresholds they induce at a given `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageTargets {
    r1: f64,
    r2: f64,
    q: f64,
    split: PowerSplit,
    eps1: f64,
    eps2: f64,
    theta1: Option<f64>,
    theta2: f64,
}

/// SNR threshold `2^{2R} − 1` for a target rate `R` over two time slots.
pub fn snr_threshold(rate: f64) -> f64 {
    (2.0 * rate * std::f64::consts::LN_2).exp_m1()
}

/// Builds outage targets for rates `r1`, `r2` (bits/s/Hz) at budget `q`.
///
/// When `a1 ≤ ε₁a₂` symbol `s1` can never be decoded; the targets are
/// still returned, flagged infeasible, and every outage evaluates to 1.
pub fn make_targets(r1: f64, r2: f64, q: f64, split: PowerSplit) -> Result<OutageTargets> {
    check_positive("r1", r1)?;
    check_positive("r2", r2)?;
    check_positive("q", q)?;
    let eps1 = snr_threshold(r1);
    let eps2 = snr_threshold(r2);
    let margin = split.a1() - eps1 * split.a2();
    let theta1 = (margin > 0.0).then(|| eps1 / (q * margin));
    Ok(OutageTargets {
        r1,
        r2,
        q,
        split,
        eps1,
        eps2,
        theta1,
        theta2: eps2 / (split.a2() * q),
    })
}

impl OutageTargets {
    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn split(&self) -> PowerSplit {
        self.split
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    /// `ε₁ / (q(a₁ − ε₁a₂))`, or `None` when `s1` is always in outage.
    pub fn theta1(&self) -> Option<f64> {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// `max(Θ₁, Θ₂)`, or `None` when `s1` is always in outage.
    pub fn theta(&self) -> Option<f64> {
        self.theta1.map(|t| t.max(self.theta2))
    }

    pub fn is_feasible(&self) -> bool {
        self.theta1.is_some()
    }

    /// Threshold on `λ_rd/λ_rp` for decoding `s2` at the destination.
    pub fn relay_link_threshold(&self) -> f64 {
        self.eps2 / self.q
    }
}

/// Clamps a probability assembled from a signed sum into `[0, 1]`, failing
/// if it lies outside by more than the sum's rounding floor.
fn finish_probability(sum: &CompensatedSum) -> Result<f64> {
    let p = sum.value();
    let slack = 1e-12 * sum.magnitude().max(1.0);
    if p < -slack || p > 1.0 + slack {
        return Err(Error::Consistency(format!(
            "probability {p} outside [0, 1] beyond rounding slack {slack:e}"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `F_A + F_B − F_A·F_B`: probability of the union of two independent events.
pub fn union_probability(fa: f64, fb: f64) -> f64 {
    fa + fb - fa * fb
}

/// Outage probability of `s1`, single antenna at relay and destination.
pub fn outage_s1_single(targets: &OutageTargets, profile: &ChannelProfile) -> f64 {
    match targets.theta1 {
        None => 1.0,
        Some(theta1) => {
            let c = DerivedRateParams::from_profile(profile).phi() * profile.omega_sp() * theta1;
            c / (1.0 + c)
        }
    }
}

/// Outage probability of `s1` with selection combining: `Pr(𝒳 < Θ₁)`.
pub fn outage_s1_sc(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
) -> Result<f64> {
    let Some(theta1) = targets.theta1 else {
        return Ok(1.0);
    };
    let params = DerivedRateParams::from_profile(profile);
    let sum = sc_double_sum(antennas, &params, |xi| {
        let c = xi * profile.omega_sp() * theta1;
        c / (1.0 + c)
    });
    finish_probability(&sum)
}

/// Outage probability of `s1` for any antenna configuration.
pub fn outage_s1(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
) -> Result<f64> {
    if antennas.is_single() {
        Ok(outage_s1_single(targets, profile))
    } else {
        outage_s1_sc(targets, profile, antennas)
    }
}

/// Outage probability of `s2`, single antenna at relay and destination:
/// `F(Θ) + F(ε₂/q) − F(Θ)F(ε₂/q)` with `F` the CDFs of `λ_sr/λ_sp` and
/// `λ_rd/λ_rp`.
pub fn outage_s2_single(targets: &OutageTargets, profile: &ChannelProfile) -> f64 {
    let Some(theta) = targets.theta() else {
        return 1.0;
    };
    let ratio_cdf = |x: f64, num: f64, den: f64| {
        let t = den * x;
        t / (num + t)
    };
    let relay = ratio_cdf(theta, profile.omega_sr(), profile.omega_sp());
    let dest = ratio_cdf(targets.relay_link_threshold(), profile.omega_rd(), profile.omega_rp());
    union_probability(relay, dest)
}

/// Outage probability of `s2` with selection combining, using the CDFs of
/// `δ_sr/λ_sp` and `δ_rd/λ_rp`.
pub fn outage_s2_sc(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
) -> Result<f64> {
    let Some(theta) = targets.theta() else {
        return Ok(1.0);
    };
    let relay = sc_scaled_ratio_cdf_sum(theta, 1.0, antennas.n_r(), profile.omega_sr(), profile.omega_sp());
    let dest = sc_scaled_ratio_cdf_sum(
        targets.relay_link_threshold(),
        1.0,
        antennas.n_d(),
        profile.omega_rd(),
        profile.omega_rp(),
    );
    let relay = finish_probability(&relay)?;
    let dest = finish_probability(&dest)?;
    Ok(union_probability(relay, dest).clamp(0.0, 1.0))
}

/// Outage probability of `s2` for any antenna configuration.
pub fn outage_s2(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
) -> Result<f64> {
    if antennas.is_single() {
        Ok(outage_s2_single(targets, profile))
    } else {
        outage_s2_sc(targets, profile, antennas)
    }
}
