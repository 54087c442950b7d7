//! Grid sweeps over the interference budget, crossover detection and
//! table output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::AntennaConfig;
use crate::closed_form::sum_rate;
use crate::config::{OutputKind, SweepSpec};
use crate::error::{Error, Result};
use crate::montecarlo::mc_point;
use crate::outage::{make_targets, outage_s1, outage_s2};

/// Column names, in output order.
pub const COLUMNS: [&str; 15] = [
    "q_db",
    "q_linear",
    "n_r",
    "n_d",
    "rate_s1_cf",
    "rate_s2_cf",
    "rate_sum_cf",
    "rate_sum_mc",
    "rate_sum_mc_stderr",
    "rate_oma_mc",
    "rate_oma_mc_stderr",
    "outage_s1_cf",
    "outage_s2_cf",
    "outage_s1_mc",
    "outage_s2_mc",
];

/// One `(antenna configuration, q)` point. Columns not requested by the
/// sweep are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub q_db: f64,
    pub q_linear: f64,
    pub n_r: usize,
    pub n_d: usize,
    pub rate_s1_cf: Option<f64>,
    pub rate_s2_cf: Option<f64>,
    pub rate_sum_cf: Option<f64>,
    pub rate_sum_mc: Option<f64>,
    pub rate_sum_mc_stderr: Option<f64>,
    pub rate_oma_mc: Option<f64>,
    pub rate_oma_mc_stderr: Option<f64>,
    pub outage_s1_cf: Option<f64>,
    pub outage_s2_cf: Option<f64>,
    pub outage_s1_mc: Option<f64>,
    pub outage_s2_mc: Option<f64>,
}

impl SweepRow {
    pub fn antennas(&self) -> AntennaConfig {
        AntennaConfig::new(self.n_r, self.n_d).expect("row built from a valid configuration")
    }

    /// Values of the optional columns, in [`COLUMNS`] order after `n_d`.
    fn values(&self) -> [Option<f64>; 11] {
        [
            self.rate_s1_cf,
            self.rate_s2_cf,
            self.rate_sum_cf,
            self.rate_sum_mc,
            self.rate_sum_mc_stderr,
            self.rate_oma_mc,
            self.rate_oma_mc_stderr,
            self.outage_s1_cf,
            self.outage_s2_cf,
            self.outage_s1_mc,
            self.outage_s2_mc,
        ]
    }
}

fn evaluate_point(spec: &SweepSpec, antennas: AntennaConfig, q_db: f64, q: f64) -> Result<SweepRow> {
    let mut row = SweepRow {
        q_db,
        q_linear: q,
        n_r: antennas.n_r(),
        n_d: antennas.n_d(),
        rate_s1_cf: None,
        rate_s2_cf: None,
        rate_sum_cf: None,
        rate_sum_mc: None,
        rate_sum_mc_stderr: None,
        rate_oma_mc: None,
        rate_oma_mc_stderr: None,
        outage_s1_cf: None,
        outage_s2_cf: None,
        outage_s1_mc: None,
        outage_s2_mc: None,
    };
    let targets = make_targets(spec.r1, spec.r2, q, spec.split)?;

    if spec.wants(OutputKind::RatesClosed) {
        let r = sum_rate(q, &spec.profile, &spec.split, antennas)?;
        row.rate_s1_cf = Some(r.rate_s1);
        row.rate_s2_cf = Some(r.rate_s2);
        row.rate_sum_cf = Some(r.rate_sum);
    }
    if spec.wants(OutputKind::OutageClosed) {
        row.outage_s1_cf = Some(outage_s1(&targets, &spec.profile, antennas)?);
        row.outage_s2_cf = Some(outage_s2(&targets, &spec.profile, antennas)?);
    }
    let any_mc = [OutputKind::RatesMc, OutputKind::OmaMc, OutputKind::OutageMc]
        .into_iter()
        .any(|k| spec.wants(k));
    if any_mc {
        let mc = mc_point(&targets, &spec.profile, antennas, &spec.sim);
        if spec.wants(OutputKind::RatesMc) {
            row.rate_sum_mc = Some(mc.rate_sum.mean);
            row.rate_sum_mc_stderr = Some(mc.rate_sum.std_error);
        }
        if spec.wants(OutputKind::OmaMc) {
            row.rate_oma_mc = Some(mc.rate_oma.mean);
            row.rate_oma_mc_stderr = Some(mc.rate_oma.std_error);
        }
        if spec.wants(OutputKind::OutageMc) {
            row.outage_s1_mc = Some(mc.outage_s1.mean);
            row.outage_s2_mc = Some(mc.outage_s2.mean);
        }
    }
    Ok(row)
}

/// Evaluates every `(antenna configuration, q)` point of the spec. Rows are
/// ordered by antenna configuration (as listed) and then by `q`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
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
    points
        .into_par_iter()
        .map(|(a, db, q)| evaluate_point(spec, a, db, q))
        .collect()
}

/// Where the NOMA sum rate first overtakes the OMA rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub q_db: f64,
    /// Set when NOMA already wins at the first grid point, so `q_db` is
    /// the grid minimum rather than an interpolated sign change.
    pub at_boundary: bool,
}

/// Finds the crossover for one antenna configuration by linear
/// interpolation, in dB, of the sign change of `rate_sum_cf − rate_oma_mc`.
/// Returns `None` when NOMA never overtakes OMA on the grid.
pub fn find_crossover(table: &[SweepRow], antennas: AntennaConfig) -> Result<Option<Crossover>> {
    let mut points = Vec::new();
    for row in table.iter().filter(|r| r.antennas() == antennas) {
        let (Some(noma), Some(oma)) = (row.rate_sum_cf, row.rate_oma_mc) else {
            return Err(Error::config(
                "output.include",
                "crossover needs the rates_closed and oma_mc columns",
            ));
        };
        points.push((row.q_db, noma - oma));
    }
    let Some(&(first_db, first_diff)) = points.first() else {
        return Ok(None);
    };
    if first_diff > 0.0 {
        return Ok(Some(Crossover {
            q_db: first_db,
            at_boundary: true,
        }));
    }
    Ok(points.windows(2).find_map(|w| {
        let ((q0, d0), (q1, d1)) = (w[0], w[1]);
        (d0 <= 0.0 && d1 > 0.0).then(|| Crossover {
            q_db: q0 + (q1 - q0) * (-d0) / (d1 - d0),
            at_boundary: false,
        })
    }))
}

/// Crossovers for every antenna configuration present in the table, in
/// order of first appearance.
pub fn find_crossovers(table: &[SweepRow]) -> Result<Vec<(AntennaConfig, Option<Crossover>)>> {
    let mut seen: Vec<AntennaConfig> = Vec::new();
    for row in table {
        let a = row.antennas();
        if !seen.contains(&a) {
            seen.push(a);
        }
    }
    seen.into_iter()
        .map(|a| find_crossover(table, a).map(|c| (a, c)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, enough for an exact round trip.
fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

/// Rendered cells of one row in [`COLUMNS`] order; `None` marks a missing
/// value.
fn cells(row: &SweepRow) -> Vec<Option<String>> {
    [format_float(row.q_db), format_float(row.q_linear)]
        .into_iter()
        .chain([Some(row.n_r.to_string()), Some(row.n_d.to_string())])
        .chain(row.values().into_iter().map(|v| v.and_then(format_float)))
        .collect()
}

/// Writes the table as CSV (header always present, `NA` for missing
/// values) or as a JSON array of row objects (`null` for missing values).
pub fn write_table<W: Write>(table: &[SweepRow], format: Format, mut w: W) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "{}", COLUMNS.join(","))?;
            for row in table {
                let line: Vec<String> = cells(row)
                    .into_iter()
                    .map(|c| c.unwrap_or_else(|| "NA".into()))
                    .collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        Format::Json => {
            write!(w, "[")?;
            for (i, row) in table.iter().enumerate() {
                let fields: Vec<String> = cells(row)
                    .into_iter()
                    .zip(COLUMNS)
                    .map(|(v, name)| format!("\"{name}\":{}", v.as_deref().unwrap_or("null")))
                    .collect();
                let sep = if i > 0 { "," } else { "" };
                write!(w, "{sep}\n  {{{}}}", fields.join(","))?;
            }
            if !table.is_empty() {
                writeln!(w)?;
            }
            writeln!(w, "]")?;
        }
    }
    w.flush()
}

/// Writes the table to `destination`, or stdout when `None`.
pub fn emit(table: &[SweepRow], format: Format, destination: Option<&PathBuf>) -> Result<()> {
    match destination {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(Some(path), e))?;
            write_table(table, format, BufWriter::new(file)).map_err(|e| Error::io(Some(path), e))
        }
        None => {
            let stdout = io::stdout();
            write_table(table, format, stdout.lock()).map_err(|e| Error::io(None, e))
        }
    }
}
