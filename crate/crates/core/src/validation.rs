//! Analytic-versus-simulation agreement checks over a sweep grid.
//!
//! Rates are compared against the sample standard error of the simulated
//! mean. Outage probabilities are compared against the binomial standard
//! error `√(p(1−p)/N)` at the analytic `p`, which stays meaningful when the
//! simulation records no events.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::AntennaConfig;
use crate::closed_form::sum_rate;
use crate::config::SweepSpec;
use crate::error::Result;
use crate::montecarlo::mc_point;
use crate::outage::{make_targets, outage_s1, outage_s2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    RateS1,
    RateS2,
    OutageS1,
    OutageS2,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::RateS1 => "rate_s1",
            Quantity::RateS2 => "rate_s2",
            Quantity::OutageS1 => "outage_s1",
            Quantity::OutageS2 => "outage_s2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub quantity: Quantity,
    pub n_r: usize,
    pub n_d: usize,
    pub q_db: f64,
    pub analytic: f64,
    pub simulated: f64,
    pub std_error: f64,
}

impl Check {
    /// Distance between analytic and simulated values in standard errors.
    pub fn z(&self) -> f64 {
        let diff = (self.analytic - self.simulated).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn passes(&self, k_sigma: f64) -> bool {
        self.z() <= k_sigma
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<9} ({},{}) q = {:>6.2} dB: analytic {:.8}, simulated {:.8} ± {:.2e} (z = {:.2})",
            self.quantity,
            self.n_r,
            self.n_d,
            self.q_db,
            self.analytic,
            self.simulated,
            self.std_error,
            self.z()
        )
    }
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Runs every rate and outage comparison on the spec's grid.
pub fn validate(spec: &SweepSpec) -> Result<Vec<Check>> {
    let points: Vec<(AntennaConfig, f64, f64)> = spec
        .antennas
        .iter()
        .flat_map(|&a| {
            spec.q_db()
                .iter()
                .zip(spec.q_linear())
                .map(move |(&db, &q)| (a, db, q))
        })
        .collect();
    let per_point: Vec<[Check; 4]> = points
        .into_par_iter()
        .map(|(a, q_db, q)| {
            let targets = make_targets(spec.r1, spec.r2, q, spec.split)?;
            let rates = sum_rate(q, &spec.profile, &spec.split, a)?;
            let o1 = outage_s1(&targets, &spec.profile, a)?;
            let o2 = outage_s2(&targets, &spec.profile, a)?;
            let mc = mc_point(&targets, &spec.profile, a, &spec.sim);
            let check = |quantity, analytic, simulated, std_error| Check {
                quantity,
                n_r: a.n_r(),
                n_d: a.n_d(),
                q_db,
                analytic,
                simulated,
                std_error,
            };
            let n = mc.outage_s1.n;
            Ok([
                check(Quantity::RateS1, rates.rate_s1, mc.rate_s1.mean, mc.rate_s1.std_error),
                check(Quantity::RateS2, rates.rate_s2, mc.rate_s2.mean, mc.rate_s2.std_error),
                check(Quantity::OutageS1, o1, mc.outage_s1.mean, binomial_se(o1, n)),
                check(Quantity::OutageS2, o2, mc.outage_s2.mean, binomial_se(o2, n)),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}
