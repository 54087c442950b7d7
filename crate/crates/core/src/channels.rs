//! Link statistics, channel sampling and the closed-form distributions of
//! the ratio variables that drive every rate and outage expression.
//!
//! All fading is Rayleigh, so every squared link gain is exponential with
//! mean equal to the link's mean-square gain Ω. Noise variance is fixed at
//! one, which makes every power and the interference budget `q` plain
//! linear SNR-like numbers.
//!
//! Multi-antenna receivers use selection combining: the branch with the
//! largest instantaneous gain is kept, so a receiver with `n` antennas sees
//! the maximum of `n` i.i.d. exponentials. Distributions of such maxima are
//! written as alternating binomial sums over `c_k = (-1)^(k-1) C(n, k)`.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::numeric::{alternating_coefficients, alternating_power_sum, CompensatedSum, MAX_ANTENNAS};

/// Mean-square gains of the five links, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct ChannelProfile {
    omega_sr: f64,
    omega_sd: f64,
    omega_rd: f64,
    omega_sp: f64,
    omega_rp: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    omega_sr: f64,
    omega_sd: f64,
    omega_rd: f64,
    omega_sp: f64,
    omega_rp: f64,
}

impl TryFrom<RawProfile> for ChannelProfile {
    type Error = Error;

    fn try_from(r: RawProfile) -> Result<Self> {
        ChannelProfile::new(r.omega_sr, r.omega_sd, r.omega_rd, r.omega_sp, r.omega_rp)
    }
}

impl ChannelProfile {
    /// Builds a profile. The direct source–destination link must be weaker
    /// on average than the source–relay link.
    pub fn new(
        omega_sr: f64,
        omega_sd: f64,
        omega_rd: f64,
        omega_sp: f64,
        omega_rp: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("omega_sr", omega_sr),
            ("omega_sd", omega_sd),
            ("omega_rd", omega_rd),
            ("omega_sp", omega_sp),
            ("omega_rp", omega_rp),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "{name} = {v} must be strictly positive and finite"
                )));
            }
        }
        if omega_sd >= omega_sr {
            return Err(Error::InvalidProfile(format!(
                "omega_sd = {omega_sd} must be smaller than omega_sr = {omega_sr}"
            )));
        }
        Ok(Self {
            omega_sr,
            omega_sd,
            omega_rd,
            omega_sp,
            omega_rp,
        })
    }

    /// The evaluation scenario: Ω_sd = 1, Ω_sr = Ω_rd = 10, Ω_sp = Ω_rp = 5.5.
    pub fn default_scenario() -> Self {
        Self {
            omega_sr: 10.0,
            omega_sd: 1.0,
            omega_rd: 10.0,
            omega_sp: 5.5,
            omega_rp: 5.5,
        }
    }

    pub fn omega_sr(&self) -> f64 {
        self.omega_sr
    }

    pub fn omega_sd(&self) -> f64 {
        self.omega_sd
    }

    pub fn omega_rd(&self) -> f64 {
        self.omega_rd
    }

    pub fn omega_sp(&self) -> f64 {
        self.omega_sp
    }

    pub fn omega_rp(&self) -> f64 {
        self.omega_rp
    }
}

/// Receive antenna counts at the relay (`n_r`) and the destination (`n_d`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAntennas")]
pub struct AntennaConfig {
    n_r: usize,
    n_d: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAntennas {
    n_r: usize,
    n_d: usize,
}

impl TryFrom<RawAntennas> for AntennaConfig {
    type Error = Error;

    fn try_from(r: RawAntennas) -> Result<Self> {
        AntennaConfig::new(r.n_r, r.n_d)
    }
}

impl AntennaConfig {
    pub const SINGLE: AntennaConfig = AntennaConfig { n_r: 1, n_d: 1 };

    pub fn new(n_r: usize, n_d: usize) -> Result<Self> {
        for (name, n) in [("n_r", n_r), ("n_d", n_d)] {
            if !(1..=MAX_ANTENNAS).contains(&n) {
                return Err(Error::InvalidAntennas(format!(
                    "{name} = {n} must lie in 1..={MAX_ANTENNAS}"
                )));
            }
        }
        Ok(Self { n_r, n_d })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn is_single(&self) -> bool {
        self.n_r == 1 && self.n_d == 1
    }
}

/// Combined inverse means φ and ξ_{k,j} of the source-side links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRateParams {
    inv_sr: f64,
    inv_sd: f64,
}

impl DerivedRateParams {
    pub fn from_profile(profile: &ChannelProfile) -> Self {
        Self {
            inv_sr: 1.0 / profile.omega_sr,
            inv_sd: 1.0 / profile.omega_sd,
        }
    }

    /// `1/Ω_sr + 1/Ω_sd`: the rate of the exponential `min(λ_sr, λ_sd)`.
    pub fn phi(&self) -> f64 {
        self.xi(1, 1)
    }

    /// `k/Ω_sr + j/Ω_sd`.
    pub fn xi(&self, k: usize, j: usize) -> f64 {
        k as f64 * self.inv_sr + j as f64 * self.inv_sd
    }
}

/// One joint fading realization.
///
/// `lambda_sr` has one entry per relay antenna; `lambda_sd` and
/// `lambda_rd` one per destination antenna. The `delta_*` fields are the
/// selection-combining maxima of those vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    lambda_sr: Vec<f64>,
    lambda_sd: Vec<f64>,
    lambda_rd: Vec<f64>,
    lambda_sp: f64,
    lambda_rp: f64,
    delta_sr: f64,
    delta_sd: f64,
    delta_rd: f64,
}

fn vec_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Exponential variate with the given mean. Zero draws are rejected so that
/// `q / λ` stays finite.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    loop {
        let e: f64 = rng.sample(Exp1);
        if e > 0.0 {
            return e * mean;
        }
    }
}

impl ChannelDraw {
    /// Builds a draw from explicit gains, computing the selection maxima.
    pub fn from_gains(
        lambda_sr: Vec<f64>,
        lambda_sd: Vec<f64>,
        lambda_rd: Vec<f64>,
        lambda_sp: f64,
        lambda_rp: f64,
    ) -> Result<Self> {
        if lambda_sr.is_empty() || lambda_sd.is_empty() || lambda_rd.is_empty() {
            return Err(Error::InvalidAntennas(
                "every gain vector needs at least one antenna".into(),
            ));
        }
        if lambda_sd.len() != lambda_rd.len() {
            return Err(Error::InvalidAntennas(format!(
                "lambda_sd has {} entries but lambda_rd has {}",
                lambda_sd.len(),
                lambda_rd.len()
            )));
        }
        for &g in lambda_sr.iter().chain(&lambda_sd).chain(&lambda_rd) {
            check_nonnegative("gain", g)?;
        }
        check_positive("lambda_sp", lambda_sp)?;
        check_positive("lambda_rp", lambda_rp)?;
        Ok(Self {
            delta_sr: vec_max(&lambda_sr),
            delta_sd: vec_max(&lambda_sd),
            delta_rd: vec_max(&lambda_rd),
            lambda_sr,
            lambda_sd,
            lambda_rd,
            lambda_sp,
            lambda_rp,
        })
    }

    /// Redraws every gain in place, reusing the vector allocations.
    pub fn resample<R: Rng + ?Sized>(
        &mut self,
        profile: &ChannelProfile,
        antennas: AntennaConfig,
        rng: &mut R,
    ) {
        fn fill<R: Rng + ?Sized>(v: &mut Vec<f64>, n: usize, mean: f64, rng: &mut R) -> f64 {
            v.clear();
            let mut max = 0.0f64;
            for _ in 0..n {
                let g = sample_exponential(rng, mean);
                max = max.max(g);
                v.push(g);
            }
            max
        }
        self.delta_sr = fill(&mut self.lambda_sr, antennas.n_r, profile.omega_sr, rng);
        self.delta_sd = fill(&mut self.lambda_sd, antennas.n_d, profile.omega_sd, rng);
        self.delta_rd = fill(&mut self.lambda_rd, antennas.n_d, profile.omega_rd, rng);
        self.lambda_sp = sample_exponential(rng, profile.omega_sp);
        self.lambda_rp = sample_exponential(rng, profile.omega_rp);
    }

    pub fn lambda_sr(&self) -> &[f64] {
        &self.lambda_sr
    }

    pub fn lambda_sd(&self) -> &[f64] {
        &self.lambda_sd
    }

    pub fn lambda_rd(&self) -> &[f64] {
        &self.lambda_rd
    }

    pub fn lambda_sp(&self) -> f64 {
        self.lambda_sp
    }

    pub fn lambda_rp(&self) -> f64 {
        self.lambda_rp
    }

    pub fn delta_sr(&self) -> f64 {
        self.delta_sr
    }

    pub fn delta_sd(&self) -> f64 {
        self.delta_sd
    }

    pub fn delta_rd(&self) -> f64 {
        self.delta_rd
    }
}

/// Draws one joint realization of all links.
///
/// Sampling order is fixed (relay branches, direct branches, relay–destination
/// branches, then the two interference links), so the same generator state
/// always yields the same draw.
pub fn draw_channels<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    rng: &mut R,
) -> ChannelDraw {
    let mut draw = ChannelDraw {
        lambda_sr: Vec::with_capacity(antennas.n_r),
        lambda_sd: Vec::with_capacity(antennas.n_d),
        lambda_rd: Vec::with_capacity(antennas.n_d),
        lambda_sp: 0.0,
        lambda_rp: 0.0,
        delta_sr: 0.0,
        delta_sd: 0.0,
        delta_rd: 0.0,
    };
    draw.resample(profile, antennas, rng);
    draw
}

// ---------------------------------------------------------------------------
// Single-antenna ratio distributions
// ---------------------------------------------------------------------------

/// Density of `X = min(λ_sr, λ_sd) / λ_sp`: `φΩ_sp / (1 + φΩ_sp x)²`.
pub fn pdf_min_over_exp_ratio(x: f64, phi: f64, omega_sp: f64) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_positive("phi", phi)?;
    check_positive("omega_sp", omega_sp)?;
    let c = phi * omega_sp;
    let d = 1.0 + c * x;
    Ok(c / (d * d))
}

/// Distribution function of `X = min(λ_sr, λ_sd) / λ_sp`: `φΩ_sp x / (1 + φΩ_sp x)`.
pub fn cdf_min_over_exp_ratio(x: f64, phi: f64, omega_sp: f64) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_positive("phi", phi)?;
    check_positive("omega_sp", omega_sp)?;
    let c = phi * omega_sp * x;
    Ok(c / (1.0 + c))
}

/// Distribution function of `scale · λ_num / λ_den` for independent
/// exponentials with means `omega_num` and `omega_den`:
/// `Ω_den x / (scale Ω_num + Ω_den x)`.
///
/// With `scale = a₂` this is the law of `a₂λ_sr/λ_sp`; with `scale = 1`
/// it covers `λ_sr/λ_sp` and `λ_rd/λ_rp`.
pub fn cdf_scaled_exp_ratio(x: f64, scale: f64, omega_num: f64, omega_den: f64) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_scale(scale)?;
    check_positive("omega_num", omega_num)?;
    check_positive("omega_den", omega_den)?;
    let t = omega_den * x;
    Ok(t / (scale * omega_num + t))
}

/// Survival function of `Y = min(a₂λ_sr/λ_sp, λ_rd/λ_rp)`:
/// `a₂Ω_srΩ_rd / ((a₂Ω_sr + Ω_sp x)(Ω_rd + Ω_rp x))`.
pub fn survival_y(x: f64, a2: f64, profile: &ChannelProfile) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_a2(a2)?;
    Ok(survival_y_unchecked(x, a2, profile))
}

#[inline]
pub(crate) fn survival_y_unchecked(x: f64, a2: f64, p: &ChannelProfile) -> f64 {
    let s = a2 * p.omega_sr;
    s * p.omega_rd / ((s + p.omega_sp * x) * (p.omega_rd + p.omega_rp * x))
}

// ---------------------------------------------------------------------------
// Selection-combining distributions
// ---------------------------------------------------------------------------

/// Distribution function of the maximum of `n` i.i.d. exponentials with
/// mean `omega`, in its alternating-sum form
/// `1 - Σ_k (-1)^(k-1) C(n,k) exp(-kx/Ω)`.
pub fn cdf_sc_max(x: f64, n: usize, omega: f64) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_count(n)?;
    check_positive("omega", omega)?;
    // Σ_k c_k e^{-kx/Ω} = Σ_k c_k r^k with r = e^{-x/Ω}
    let survival = alternating_power_sum(n, (-x / omega).exp());
    Ok((1.0 - survival).clamp(0.0, 1.0))
}

/// Density of `𝒳 = min(δ_sr, δ_sd) / λ_sp` under selection combining.
pub fn pdf_sc_min_over_exp_ratio(
    x: f64,
    antennas: AntennaConfig,
    params: &DerivedRateParams,
    omega_sp: f64,
) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_positive("omega_sp", omega_sp)?;
    let sum = sc_double_sum(antennas, params, |xi| {
        let c = xi * omega_sp;
        let d = 1.0 + c * x;
        c / (d * d)
    });
    Ok(sum.value().max(0.0))
}

/// Distribution function of `𝒳 = min(δ_sr, δ_sd) / λ_sp`.
pub fn cdf_sc_min_over_exp_ratio(
    x: f64,
    antennas: AntennaConfig,
    params: &DerivedRateParams,
    omega_sp: f64,
) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_positive("omega_sp", omega_sp)?;
    let sum = sc_double_sum(antennas, params, |xi| {
        let c = xi * omega_sp * x;
        c / (1.0 + c)
    });
    Ok(sum.value().clamp(0.0, 1.0))
}

/// Distribution function of `scale · δ / λ_den`, where `δ` is the maximum
/// of `n` exponentials with mean `omega_num`:
/// `Σ_k (-1)^(k-1) C(n,k) kΩ_den x / (scale Ω_num + kΩ_den x)`.
pub fn cdf_sc_scaled_exp_ratio(
    x: f64,
    scale: f64,
    n: usize,
    omega_num: f64,
    omega_den: f64,
) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_scale(scale)?;
    check_count(n)?;
    check_positive("omega_num", omega_num)?;
    check_positive("omega_den", omega_den)?;
    let s = sc_scaled_ratio_cdf_sum(x, scale, n, omega_num, omega_den);
    Ok(s.value().clamp(0.0, 1.0))
}

/// Survival function of `𝒴 = min(a₂δ_sr/λ_sp, δ_rd/λ_rp)`.
///
/// The two ratios are independent, so the survival is the product of the
/// marginal survivals, each an alternating sum of `α/(α + kβx)` terms.
/// Expanding the product gives the four-term binomial form; the factored
/// form keeps absolute accuracy as the survival decays.
pub fn survival_sc_y(
    x: f64,
    a2: f64,
    antennas: AntennaConfig,
    profile: &ChannelProfile,
) -> Result<f64> {
    check_nonnegative("x", x)?;
    check_a2(a2)?;
    Ok(survival_sc_y_unchecked(x, a2, antennas, profile))
}

pub(crate) fn survival_sc_y_unchecked(
    x: f64,
    a2: f64,
    antennas: AntennaConfig,
    p: &ChannelProfile,
) -> f64 {
    let relay = sc_scaled_ratio_survival(x, a2, antennas.n_r, p.omega_sr, p.omega_sp);
    let dest = sc_scaled_ratio_survival(x, 1.0, antennas.n_d, p.omega_rd, p.omega_rp);
    (relay * dest).clamp(0.0, 1.0)
}

/// `Σ_k c_k kΩ_den x / (scale Ω_num + kΩ_den x)`, compensated.
pub(crate) fn sc_scaled_ratio_cdf_sum(
    x: f64,
    scale: f64,
    n: usize,
    omega_num: f64,
    omega_den: f64,
) -> CompensatedSum {
    let a = scale * omega_num;
    alternating_coefficients(n)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let t = (i + 1) as f64 * omega_den * x;
            c * t / (a + t)
        })
        .collect()
}

fn sc_scaled_ratio_survival(x: f64, scale: f64, n: usize, omega_num: f64, omega_den: f64) -> f64 {
    let a = scale * omega_num;
    alternating_coefficients(n)
        .into_iter()
        .enumerate()
        .map(|(i, c)| c * a / (a + (i + 1) as f64 * omega_den * x))
        .collect::<CompensatedSum>()
        .value()
}

/// `Σ_k Σ_j (-1)^(k+j) C(n_r,k) C(n_d,j) term(ξ_{k,j})`, compensated.
pub(crate) fn sc_double_sum<F: Fn(f64) -> f64>(
    antennas: AntennaConfig,
    params: &DerivedRateParams,
    term: F,
) -> CompensatedSum {
    let ck = alternating_coefficients(antennas.n_r);
    let dj = alternating_coefficients(antennas.n_d);
    let mut sum = CompensatedSum::new();
    for (ki, c) in ck.iter().enumerate() {
        for (ji, d) in dj.iter().enumerate() {
            sum.add(c * d * term(params.xi(ki + 1, ji + 1)));
        }
    }
    sum
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::domain("scale", scale, "must lie in (0, 1]"));
    }
    Ok(())
}

pub(crate) fn check_a2(a2: f64) -> Result<()> {
    if !(a2 > 0.0 && a2 < 1.0) {
        return Err(Error::domain("a2", a2, "must lie in (0, 1)"));
    }
    Ok(())
}

fn check_count(n: usize) -> Result<()> {
    if !(1..=MAX_ANTENNAS).contains(&n) {
        return Err(Error::InvalidAntennas(format!(
            "antenna count {n} must lie in 1..={MAX_ANTENNAS}"
        )));
    }
    Ok(())
}
