//! Draw-by-draw simulation of the relaying protocol.
//!
//! Each sample is one joint [`ChannelDraw`]. Transmit powers follow the
//! interference-limited policy `P_s = q/λ_sp`, `P_r = q/λ_rp`; SINRs, the
//! SIC decoding chain and the OMA combiner are evaluated on that draw.
//!
//! Samples are split into chunks of `chunk_size`. Chunk `i` draws from the
//! ChaCha8 stream `i` of the seed, so a chunk's output depends only on
//! `(seed, i, chunk_size)`. Chunks run in parallel and their accumulators
//! are merged in index order, which makes every estimate independent of the
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{draw_channels, AntennaConfig, ChannelDraw, ChannelProfile};
use crate::closed_form::PowerSplit;
use crate::error::{check_positive, Error, Result};
use crate::outage::OutageTargets;

/// Smallest sample count accepted for a reported estimate.
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSimConfig")]
pub struct SimConfig {
    n_samples: u64,
    seed: u64,
    chunk_size: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimConfig {
    #[serde(default = "default_samples")]
    n_samples: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_chunk")]
    chunk_size: u64,
}

fn default_samples() -> u64 {
    SimConfig::DEFAULT.n_samples
}

fn default_seed() -> u64 {
    SimConfig::DEFAULT.seed
}

fn default_chunk() -> u64 {
    SimConfig::DEFAULT.chunk_size
}

impl TryFrom<RawSimConfig> for SimConfig {
    type Error = Error;

    fn try_from(raw: RawSimConfig) -> Result<Self> {
        SimConfig::new(raw.n_samples, raw.seed, raw.chunk_size)
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl SimConfig {
    pub const DEFAULT: SimConfig = SimConfig {
        n_samples: 1_000_000,
        seed: 42,
        chunk_size: 65_536,
    };

    pub fn new(n_samples: u64, seed: u64, chunk_size: u64) -> Result<Self> {
        if n_samples < MIN_SAMPLES {
            return Err(Error::InvalidSimulation(format!(
                "n_samples = {n_samples} is below the minimum of {MIN_SAMPLES}"
            )));
        }
        if chunk_size == 0 {
            return Err(Error::InvalidSimulation("chunk_size must be positive".into()));
        }
        Ok(Self {
            n_samples,
            seed,
            chunk_size,
        })
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chunk_size(&self) -> u64 {
        self.chunk_size
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_samples(self, n_samples: u64) -> Result<Self> {
        Self::new(n_samples, self.seed, self.chunk_size)
    }

    fn n_chunks(&self) -> u64 {
        self.n_samples.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, index: u64) -> u64 {
        self.chunk_size.min(self.n_samples - index * self.chunk_size)
    }
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl Estimate {
    /// `|mean − reference|` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.mean - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Streaming mean and variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.n = n;
    }

    pub fn estimate(&self) -> Estimate {
        let std_error = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            std_error,
            n: self.n,
        }
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Instantaneous SINRs of one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinrs {
    /// Relay decoding `s1` with `s2` as interference.
    pub sr1: f64,
    /// Relay decoding `s2` after cancelling `s1`.
    pub sr2: f64,
    /// Destination decoding `s1` from the direct link.
    pub sd: f64,
    /// Destination decoding the relayed `s2`.
    pub rd: f64,
}

/// SINRs under the optimal power policy, using the selection-combining
/// maxima (equal to the single gains when there is one antenna).
pub fn instantaneous_sinrs(draw: &ChannelDraw, q: f64, split: &PowerSplit) -> Sinrs {
    let ps = q / draw.lambda_sp();
    let pr = q / draw.lambda_rp();
    let (a1, a2) = (split.a1(), split.a2());
    let x_sr = draw.delta_sr() * ps;
    let x_sd = draw.delta_sd() * ps;
    Sinrs {
        sr1: a1 * x_sr / (a2 * x_sr + 1.0),
        sr2: a2 * x_sr,
        sd: a1 * x_sd / (a2 * x_sd + 1.0),
        rd: draw.delta_rd() * pr,
    }
}

/// OMA end-to-end SNR `q·min(δ_sr/λ_sp, δ_sd/λ_sp + δ_rd/λ_rp)`; the
/// destination combines the direct and relayed copies by MRC.
pub fn oma_snr(draw: &ChannelDraw, q: f64) -> f64 {
    let ps = q / draw.lambda_sp();
    let pr = q / draw.lambda_rp();
    (draw.delta_sr() * ps).min(draw.delta_sd() * ps + draw.delta_rd() * pr)
}

#[inline]
fn half_log2_1p(x: f64) -> f64 {
    0.5 * x.ln_1p() * std::f64::consts::LOG2_E
}

/// Which of the three disjoint outage events of `s2` occurred, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S2Outage {
    /// The relay fails to decode `s1`, so SIC cannot proceed.
    RelayMissesS1,
    /// The relay decodes `s1` but not `s2`.
    RelayMissesS2,
    /// The relay decodes both but the destination misses the relayed `s2`.
    DestinationMissesS2,
}

pub fn s1_in_outage(s: &Sinrs, eps1: f64) -> bool {
    s.sr1.min(s.sd) < eps1
}

pub fn classify_s2_outage(s: &Sinrs, eps1: f64, eps2: f64) -> Option<S2Outage> {
    if s.sr1 < eps1 {
        Some(S2Outage::RelayMissesS1)
    } else if s.sr2 < eps2 {
        Some(S2Outage::RelayMissesS2)
    } else if s.rd < eps2 {
        Some(S2Outage::DestinationMissesS2)
    } else {
        None
    }
}

trait Merge {
    fn merge(&mut self, other: &Self);
}

/// Runs `step` on every draw of the configured sample budget.
fn simulate<A, I, F>(
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    sim: &SimConfig,
    init: I,
    step: F,
) -> A
where
    A: Merge + Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &ChannelDraw) + Sync,
{
    let parts: Vec<A> = (0..sim.n_chunks())
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(sim.seed, chunk);
            let mut acc = init();
            let mut draw = draw_channels(profile, antennas, &mut rng);
            step(&mut acc, &draw);
            for _ in 1..sim.chunk_len(chunk) {
                draw.resample(profile, antennas, &mut rng);
                step(&mut acc, &draw);
            }
            acc
        })
        .collect();
    let mut parts = parts.into_iter();
    let mut total = parts.next().expect("at least one chunk");
    for p in parts {
        total.merge(&p);
    }
    total
}

impl Merge for RunningStats {
    fn merge(&mut self, other: &Self) {
        RunningStats::merge(self, other);
    }
}

impl<const N: usize> Merge for [RunningStats; N] {
    fn merge(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

/// Every estimate the sweep needs at one `(q, antennas)` point, computed
/// from a single pass over the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointEstimates {
    pub rate_s1: Estimate,
    pub rate_s2: Estimate,
    pub rate_sum: Estimate,
    pub rate_oma: Estimate,
    pub outage_s1: Estimate,
    pub outage_s2: Estimate,
    /// Counts of the three disjoint `s2` outage events, in declaration order
    /// of [`S2Outage`].
    pub s2_event_counts: [u64; 3],
}

#[derive(Default)]
struct PointAcc {
    stats: [RunningStats; 6],
    events: [u64; 3],
}

impl Merge for PointAcc {
    fn merge(&mut self, other: &Self) {
        self.stats.merge(&other.stats);
        for (a, b) in self.events.iter_mut().zip(other.events) {
            *a += b;
        }
    }
}

/// Rates, OMA rate and outage indicators at the `q` and split carried by
/// `targets`.
pub fn mc_point(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    sim: &SimConfig,
) -> PointEstimates {
    let q = targets.q();
    let split = targets.split();
    let (eps1, eps2) = (targets.eps1(), targets.eps2());
    let acc = simulate(profile, antennas, sim, PointAcc::default, |acc, draw| {
        let s = instantaneous_sinrs(draw, q, &split);
        let c1 = half_log2_1p(s.sr1.min(s.sd));
        let c2 = half_log2_1p(s.sr2.min(s.rd));
        acc.stats[0].push(c1);
        acc.stats[1].push(c2);
        acc.stats[2].push(c1 + c2);
        acc.stats[3].push(half_log2_1p(oma_snr(draw, q)));
        acc.stats[4].push(if s1_in_outage(&s, eps1) { 1.0 } else { 0.0 });
        let event = classify_s2_outage(&s, eps1, eps2);
        acc.stats[5].push(if event.is_some() { 1.0 } else { 0.0 });
        if let Some(e) = event {
            acc.events[e as usize] += 1;
        }
    });
    let [s1, s2, sum, oma, o1, o2] = acc.stats.map(|s| s.estimate());
    PointEstimates {
        rate_s1: s1,
        rate_s2: s2,
        rate_sum: sum,
        rate_oma: oma,
        outage_s1: o1,
        outage_s2: o2,
        s2_event_counts: acc.events,
    }
}

/// Average rates of `s1` and `s2` by simulation.
pub fn mc_rate_noma(
    q: f64,
    profile: &ChannelProfile,
    split: &PowerSplit,
    antennas: AntennaConfig,
    sim: &SimConfig,
) -> Result<(Estimate, Estimate)> {
    check_positive("q", q)?;
    let stats = simulate(profile, antennas, sim, <[RunningStats; 2]>::default, |acc, draw| {
        let s = instantaneous_sinrs(draw, q, split);
        acc[0].push(half_log2_1p(s.sr1.min(s.sd)));
        acc[1].push(half_log2_1p(s.sr2.min(s.rd)));
    });
    Ok((stats[0].estimate(), stats[1].estimate()))
}

/// Average OMA rate `0.5·E[log₂(1 + q𝒵)]` by simulation.
pub fn mc_rate_oma(
    q: f64,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    sim: &SimConfig,
) -> Result<Estimate> {
    check_positive("q", q)?;
    let stats = simulate(profile, antennas, sim, RunningStats::default, |acc, draw| {
        acc.push(half_log2_1p(oma_snr(draw, q)));
    });
    Ok(stats.estimate())
}

/// Empirical outage frequencies of `s1` and `s2`.
pub fn mc_outage(
    targets: &OutageTargets,
    profile: &ChannelProfile,
    antennas: AntennaConfig,
    sim: &SimConfig,
) -> (Estimate, Estimate) {
    let q = targets.q();
    let split = targets.split();
    let (eps1, eps2) = (targets.eps1(), targets.eps2());
    let stats = simulate(profile, antennas, sim, <[RunningStats; 2]>::default, |acc, draw| {
        let s = instantaneous_sinrs(draw, q, &split);
        acc[0].push(if s1_in_outage(&s, eps1) { 1.0 } else { 0.0 });
        acc[1].push(if classify_s2_outage(&s, eps1, eps2).is_some() { 1.0 } else { 0.0 });
    });
    (stats[0].estimate(), stats[1].estimate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split() -> PowerSplit {
        PowerSplit::from_a2(0.1).unwrap()
    }

    #[test]
    fn sim_config_validation() {
        assert!(SimConfig::new(999, 1, 10).is_err());
        assert!(SimConfig::new(1000, 1, 0).is_err());
        let s = SimConfig::new(1000, 7, 300).unwrap();
        assert_eq!(s.n_chunks(), 4);
        assert_eq!(s.chunk_len(3), 100);
    }

    #[test]
    fn running_stats_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.3).collect();
        let mut whole = RunningStats::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = RunningStats::default();
        let mut b = RunningStats::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, whole.n);
        assert!((a.mean - whole.mean).abs() < 1e-12);
        assert!((a.m2 - whole.m2).abs() < 1e-8 * whole.m2);
    }

    #[test]
    fn sinr_ceiling_and_substitution() {
        let d = ChannelDraw::from_gains(vec![2.0], vec![1.0], vec![3.0], 2.0, 1.5).unwrap();
        let s = instantaneous_sinrs(&d, 10.0, &split());
        assert!((s.sr2 - 1.0).abs() < 1e-15);
        assert!(s.sr1 < 9.0);
        let huge = ChannelDraw::from_gains(vec![1e12], vec![1e12], vec![1.0], 1.0, 1.0).unwrap();
        let s = instantaneous_sinrs(&huge, 10.0, &split());
        assert!(s.sr1 < 9.0 && s.sd < 9.0);
    }

    #[test]
    fn oma_combines_direct_and_relayed() {
        let d = ChannelDraw::from_gains(vec![5.0], vec![1.0], vec![2.0], 1.0, 2.0).unwrap();
        assert!((oma_snr(&d, 1.0) - 2.0).abs() < 1e-15);
        let d = ChannelDraw::from_gains(vec![1.5], vec![1.0], vec![2.0], 1.0, 2.0).unwrap();
        assert!((oma_snr(&d, 1.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn s2_events_are_ordered() {
        let s = Sinrs { sr1: 1.0, sr2: 0.1, sd: 5.0, rd: 0.1 };
        assert_eq!(classify_s2_outage(&s, 3.0, 3.0), Some(S2Outage::RelayMissesS1));
        let s = Sinrs { sr1: 4.0, sr2: 0.1, sd: 5.0, rd: 0.1 };
        assert_eq!(classify_s2_outage(&s, 3.0, 3.0), Some(S2Outage::RelayMissesS2));
        let s = Sinrs { sr1: 4.0, sr2: 4.0, sd: 5.0, rd: 0.1 };
        assert_eq!(classify_s2_outage(&s, 3.0, 3.0), Some(S2Outage::DestinationMissesS2));
        let s = Sinrs { sr1: 4.0, sr2: 4.0, sd: 5.0, rd: 4.0 };
        assert_eq!(classify_s2_outage(&s, 3.0, 3.0), None);
    }

    #[test]
    fn chunking_covers_every_sample() {
        let p = ChannelProfile::default_scenario();
        let sim = SimConfig::new(10_000, 3, 3_001).unwrap();
        let (s1, _) = mc_rate_noma(1.0, &p, &split(), AntennaConfig::SINGLE, &sim).unwrap();
        assert_eq!(s1.n, 10_000);
    }

    #[test]
    fn point_agrees_with_single_purpose_runs() {
        let p = ChannelProfile::default_scenario();
        let ant = AntennaConfig::new(2, 2).unwrap();
        let sim = SimConfig::new(20_000, 9, 4096).unwrap();
        let t = crate::outage::make_targets(1.0, 1.0, 10.0, split()).unwrap();
        let point = mc_point(&t, &p, ant, &sim);
        let (s1, s2) = mc_rate_noma(10.0, &p, &split(), ant, &sim).unwrap();
        let oma = mc_rate_oma(10.0, &p, ant, &sim).unwrap();
        let (o1, o2) = mc_outage(&t, &p, ant, &sim);
        assert_eq!(point.rate_s1, s1);
        assert_eq!(point.rate_s2, s2);
        assert_eq!(point.rate_oma, oma);
        assert_eq!(point.outage_s1, o1);
        assert_eq!(point.outage_s2, o2);
        let events: u64 = point.s2_event_counts.iter().sum();
        assert_eq!(events as f64, (o2.mean * o2.n as f64).round());
    }
}
