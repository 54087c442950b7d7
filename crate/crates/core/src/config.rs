//! Sweep specification and its TOML configuration format.
//!
//! ```toml
//! [profile]            # mean-square link gains, linear scale
//! omega_sr = 10.0
//! omega_sd = 1.0
//! omega_rd = 10.0
//! omega_sp = 5.5
//! omega_rp = 5.5
//!
//! [power]
//! a2 = 0.1             # share of s2; a1 = 1 - a2
//!
//! [targets]            # bits/s/Hz
//! r1 = 1.0
//! r2 = 1.0
//!
//! [grid]
//! q_db = [-10.0, 0.0, 10.0]     # interference budget in dB, or:
//! # start_db = -10.0
//! # stop_db = 30.0
//! # points = 21
//! antennas = [[1, 1], [2, 2], [3, 3]]   # [n_r, n_d]
//!
//! [simulation]
//! n_samples = 1000000
//! seed = 42
//! chunk_size = 65536
//!
//! [output]
//! include = ["rates_closed", "rates_mc", "oma_mc", "outage_closed", "outage_mc"]
//! ```
//!
//! Every key is optional; omitted keys take the default scenario value.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{AntennaConfig, ChannelProfile};
use crate::closed_form::PowerSplit;
use crate::error::{Error, Result};
use crate::montecarlo::SimConfig;

/// Column groups a sweep can fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    RatesClosed,
    RatesMc,
    OmaMc,
    OutageClosed,
    OutageMc,
}

impl OutputKind {
    pub const ALL: [OutputKind; 5] = [
        OutputKind::RatesClosed,
        OutputKind::RatesMc,
        OutputKind::OmaMc,
        OutputKind::OutageClosed,
        OutputKind::OutageMc,
    ];
}

/// dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// `points` evenly spaced dB values from `start_db` to `stop_db` inclusive.
pub fn db_grid(start_db: f64, stop_db: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start_db];
    }
    let step = (stop_db - start_db) / (points - 1) as f64;
    (0..points).map(|i| start_db + i as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub profile: ChannelProfile,
    pub split: PowerSplit,
    pub antennas: Vec<AntennaConfig>,
    pub r1: f64,
    pub r2: f64,
    q_db: Vec<f64>,
    q_linear: Vec<f64>,
    pub sim: SimConfig,
    pub outputs: BTreeSet<OutputKind>,
}

impl SweepSpec {
    /// The evaluation scenario over −10..30 dB in 2 dB steps.
    pub fn default_scenario() -> Self {
        let antennas = [(1, 1), (2, 2), (3, 3)]
            .map(|(r, d)| AntennaConfig::new(r, d).expect("valid antenna count"))
            .to_vec();
        Self::new(
            ChannelProfile::default_scenario(),
            PowerSplit::from_a2(0.1).expect("valid split"),
            antennas,
            (1.0, 1.0),
            db_grid(-10.0, 30.0, 21),
            SimConfig::DEFAULT,
            OutputKind::ALL.into_iter().collect(),
        )
        .expect("default scenario is valid")
    }

    pub fn new(
        profile: ChannelProfile,
        split: PowerSplit,
        antennas: Vec<AntennaConfig>,
        (r1, r2): (f64, f64),
        q_db: Vec<f64>,
        sim: SimConfig,
        outputs: BTreeSet<OutputKind>,
    ) -> Result<Self> {
        if antennas.is_empty() {
            return Err(Error::config("grid.antennas", "must list at least one configuration"));
        }
        for (name, r) in [("targets.r1", r1), ("targets.r2", r2)] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::config(name, format!("{r} must be positive and finite")));
            }
        }
        if q_db.is_empty() {
            return Err(Error::config("grid.q_db", "must contain at least one value"));
        }
        if let Some(bad) = q_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::config("grid.q_db", format!("{bad} is not finite")));
        }
        if q_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("grid.q_db", "values must be strictly increasing"));
        }
        let q_linear = q_db.iter().map(|&d| db_to_linear(d)).collect();
        Ok(Self {
            profile,
            split,
            antennas,
            r1,
            r2,
            q_db,
            q_linear,
            sim,
            outputs,
        })
    }

    pub fn q_db(&self) -> &[f64] {
        &self.q_db
    }

    pub fn q_linear(&self) -> &[f64] {
        &self.q_linear
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    pub fn with_q_db(self, q_db: Vec<f64>) -> Result<Self> {
        Self::new(
            self.profile,
            self.split,
            self.antennas,
            (self.r1, self.r2),
            q_db,
            self.sim,
            self.outputs,
        )
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::config("<document>", e.message().to_string()))?;
        raw.into_spec()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            context: format!("reading {}", path.display()),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    profile: RawProfile,
    #[serde(default)]
    power: RawPower,
    #[serde(default)]
    targets: RawTargets,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    omega_sr: Option<f64>,
    omega_sd: Option<f64>,
    omega_rd: Option<f64>,
    omega_sp: Option<f64>,
    omega_rp: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPower {
    a2: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTargets {
    r1: Option<f64>,
    r2: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    q_db: Option<Vec<f64>>,
    start_db: Option<f64>,
    stop_db: Option<f64>,
    points: Option<usize>,
    antennas: Option<Vec<[usize; 2]>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    n_samples: Option<u64>,
    seed: Option<u64>,
    chunk_size: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    include: Option<Vec<OutputKind>>,
}

impl RawConfig {
    fn into_spec(self) -> Result<SweepSpec> {
        let d = SweepSpec::default_scenario();
        let dp = d.profile;
        let p = self.profile;
        let profile = ChannelProfile::new(
            p.omega_sr.unwrap_or(dp.omega_sr()),
            p.omega_sd.unwrap_or(dp.omega_sd()),
            p.omega_rd.unwrap_or(dp.omega_rd()),
            p.omega_sp.unwrap_or(dp.omega_sp()),
            p.omega_rp.unwrap_or(dp.omega_rp()),
        )
        .map_err(|e| Error::config("profile", e.to_string()))?;

        let split = PowerSplit::from_a2(self.power.a2.unwrap_or(d.split.a2()))
            .map_err(|e| Error::config("power.a2", e.to_string()))?;

        let g = self.grid;
        let q_db = match (g.q_db, g.start_db, g.stop_db, g.points) {
            (Some(list), None, None, None) => list,
            (None, Some(start), Some(stop), Some(points)) => {
                if points == 0 {
                    return Err(Error::config("grid.points", "must be at least 1"));
                }
                db_grid(start, stop, points)
            }
            (None, None, None, None) => d.q_db.clone(),
            (Some(_), ..) => {
                return Err(Error::config(
                    "grid.q_db",
                    "give either q_db or start_db/stop_db/points, not both",
                ))
            }
            _ => {
                return Err(Error::config(
                    "grid",
                    "start_db, stop_db and points must be given together",
                ))
            }
        };

        let antennas = match g.antennas {
            None => d.antennas.clone(),
            Some(list) => list
                .into_iter()
                .map(|[r, dn]| AntennaConfig::new(r, dn))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::config("grid.antennas", e.to_string()))?,
        };

        let s = self.simulation;
        let sim = SimConfig::new(
            s.n_samples.unwrap_or(d.sim.n_samples()),
            s.seed.unwrap_or(d.sim.seed()),
            s.chunk_size.unwrap_or(d.sim.chunk_size()),
        )
        .map_err(|e| Error::config("simulation", e.to_string()))?;

        let outputs = match self.output.include {
            None => d.outputs.clone(),
            Some(list) => list.into_iter().collect(),
        };

        SweepSpec::new(
            profile,
            split,
            antennas,
            (
                self.targets.r1.unwrap_or(d.r1),
                self.targets.r2.unwrap_or(d.r2),
            ),
            q_db,
            sim,
            outputs,
        )
    }
}
