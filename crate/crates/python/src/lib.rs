//! Python bindings for `noma_underlay`.

use std::collections::BTreeSet;
use std::path::Path;

use noma_underlay::channels;
use noma_underlay::closed_form::{self, Method};
use noma_underlay::config::{self, OutputKind};
use noma_underlay::montecarlo;
use noma_underlay::outage;
use noma_underlay::sweep::{self, Format};
use noma_underlay::validation;
use noma_underlay::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Quadrature(_) | Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn method_name(m: Method) -> String {
    m.to_string()
}

#[pyclass(name = "ChannelProfile", frozen, from_py_object)]
#[derive(Clone)]
struct PyChannelProfile(channels::ChannelProfile);

#[pymethods]
impl PyChannelProfile {
    #[new]
    fn new(omega_sr: f64, omega_sd: f64, omega_rd: f64, omega_sp: f64, omega_rp: f64) -> PyResult<Self> {
        channels::ChannelProfile::new(omega_sr, omega_sd, omega_rd, omega_sp, omega_rp)
            .map(Self)
            .map_err(to_py)
    }

    /// The evaluation scenario used by `SweepSpec.default()`.
    #[staticmethod]
    fn default() -> Self {
        Self(channels::ChannelProfile::default_scenario())
    }

    #[getter]
    fn omega_sr(&self) -> f64 {
        self.0.omega_sr()
    }
    #[getter]
    fn omega_sd(&self) -> f64 {
        self.0.omega_sd()
    }
    #[getter]
    fn omega_rd(&self) -> f64 {
        self.0.omega_rd()
    }
    #[getter]
    fn omega_sp(&self) -> f64 {
        self.0.omega_sp()
    }
    #[getter]
    fn omega_rp(&self) -> f64 {
        self.0.omega_rp()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "ChannelProfile(omega_sr={}, omega_sd={}, omega_rd={}, omega_sp={}, omega_rp={})",
            p.omega_sr(),
            p.omega_sd(),
            p.omega_rd(),
            p.omega_sp(),
            p.omega_rp()
        )
    }
}

#[pyclass(name = "PowerSplit", frozen, from_py_object)]
#[derive(Clone)]
struct PyPowerSplit(closed_form::PowerSplit);

#[pymethods]
impl PyPowerSplit {
    #[new]
    fn new(a1: f64, a2: f64) -> PyResult<Self> {
        closed_form::PowerSplit::new(a1, a2).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_a2(a2: f64) -> PyResult<Self> {
        closed_form::PowerSplit::from_a2(a2).map(Self).map_err(to_py)
    }

    #[getter]
    fn a1(&self) -> f64 {
        self.0.a1()
    }
    #[getter]
    fn a2(&self) -> f64 {
        self.0.a2()
    }

    fn __repr__(&self) -> String {
        format!("PowerSplit(a1={}, a2={})", self.0.a1(), self.0.a2())
    }
}

#[pyclass(name = "AntennaConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PyAntennaConfig(channels::AntennaConfig);

#[pymethods]
impl PyAntennaConfig {
    #[new]
    #[pyo3(signature = (n_r = 1, n_d = 1))]
    fn new(n_r: usize, n_d: usize) -> PyResult<Self> {
        channels::AntennaConfig::new(n_r, n_d).map(Self).map_err(to_py)
    }

    #[getter]
    fn n_r(&self) -> usize {
        self.0.n_r()
    }
    #[getter]
    fn n_d(&self) -> usize {
        self.0.n_d()
    }

    fn __repr__(&self) -> String {
        format!("AntennaConfig(n_r={}, n_d={})", self.0.n_r(), self.0.n_d())
    }
}

fn antennas_or_single(a: Option<PyAntennaConfig>) -> channels::AntennaConfig {
    a.map_or(channels::AntennaConfig::SINGLE, |a| a.0)
}

#[pyclass(name = "SimConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PySimConfig(montecarlo::SimConfig);

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (n_samples = 1_000_000, seed = 42, chunk_size = 65_536))]
    fn new(n_samples: u64, seed: u64, chunk_size: u64) -> PyResult<Self> {
        montecarlo::SimConfig::new(n_samples, seed, chunk_size)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn n_samples(&self) -> u64 {
        self.0.n_samples()
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed()
    }
    #[getter]
    fn chunk_size(&self) -> u64 {
        self.0.chunk_size()
    }

    fn __repr__(&self) -> String {
        format!(
            "SimConfig(n_samples={}, seed={}, chunk_size={})",
            self.0.n_samples(),
            self.0.seed(),
            self.0.chunk_size()
        )
    }
}

fn sim_or_default(s: Option<PySimConfig>) -> montecarlo::SimConfig {
    s.map_or(montecarlo::SimConfig::DEFAULT, |s| s.0)
}

/// A Monte-Carlo mean with its standard error.
#[pyclass(name = "Estimate", frozen, skip_from_py_object)]
struct PyEstimate(montecarlo::Estimate);

#[pymethods]
impl PyEstimate {
    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean
    }
    #[getter]
    fn std_error(&self) -> f64 {
        self.0.std_error
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    /// |mean − reference| in units of the standard error.
    fn z_score(&self, reference: f64) -> f64 {
        self.0.z_score(reference)
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(mean={}, std_error={}, n={})",
            self.0.mean, self.0.std_error, self.0.n
        )
    }
}

/// Average rates of both symbols. Returns a dict with `rate_s1`, `rate_s2`,
/// `rate_sum`, `method_s1` and `method_s2`.
#[pyfunction]
#[pyo3(signature = (q, profile, split, antennas = None))]
fn rates<'py>(
    py: Python<'py>,
    q: f64,
    profile: &PyChannelProfile,
    split: &PyPowerSplit,
    antennas: Option<PyAntennaConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = closed_form::sum_rate(q, &profile.0, &split.0, antennas_or_single(antennas)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("rate_s1", r.rate_s1)?;
    d.set_item("rate_s2", r.rate_s2)?;
    d.set_item("rate_sum", r.rate_sum)?;
    d.set_item("method_s1", method_name(r.method_s1))?;
    d.set_item("method_s2", method_name(r.method_s2))?;
    Ok(d)
}

/// The same rates by direct numerical integration.
#[pyfunction]
#[pyo3(signature = (q, profile, split, antennas = None))]
fn rates_by_quadrature(
    q: f64,
    profile: &PyChannelProfile,
    split: &PyPowerSplit,
    antennas: Option<PyAntennaConfig>,
) -> PyResult<(f64, f64)> {
    let ant = antennas_or_single(antennas);
    Ok((
        closed_form::rate_s1_integral(q, &profile.0, &split.0, ant).map_err(to_py)?,
        closed_form::rate_s2_integral(q, &profile.0, &split.0, ant).map_err(to_py)?,
    ))
}

/// Outage probabilities `(p_s1, p_s2)` for target rates `r1`, `r2`.
#[pyfunction]
#[pyo3(signature = (r1, r2, q, profile, split, antennas = None))]
fn outage_probabilities(
    r1: f64,
    r2: f64,
    q: f64,
    profile: &PyChannelProfile,
    split: &PyPowerSplit,
    antennas: Option<PyAntennaConfig>,
) -> PyResult<(f64, f64)> {
    let t = outage::make_targets(r1, r2, q, split.0).map_err(to_py)?;
    let ant = antennas_or_single(antennas);
    Ok((
        outage::outage_s1(&t, &profile.0, ant).map_err(to_py)?,
        outage::outage_s2(&t, &profile.0, ant).map_err(to_py)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (q, profile, split, antennas = None, sim = None))]
fn simulate_rates(
    q: f64,
    profile: &PyChannelProfile,
    split: &PyPowerSplit,
    antennas: Option<PyAntennaConfig>,
    sim: Option<PySimConfig>,
) -> PyResult<(PyEstimate, PyEstimate)> {
    let (a, b) = montecarlo::mc_rate_noma(
        q,
        &profile.0,
        &split.0,
        antennas_or_single(antennas),
        &sim_or_default(sim),
    )
    .map_err(to_py)?;
    Ok((PyEstimate(a), PyEstimate(b)))
}

#[pyfunction]
#[pyo3(signature = (q, profile, antennas = None, sim = None))]
fn simulate_oma_rate(
    q: f64,
    profile: &PyChannelProfile,
    antennas: Option<PyAntennaConfig>,
    sim: Option<PySimConfig>,
) -> PyResult<PyEstimate> {
    montecarlo::mc_rate_oma(q, &profile.0, antennas_or_single(antennas), &sim_or_default(sim))
        .map(PyEstimate)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r1, r2, q, profile, split, antennas = None, sim = None))]
fn simulate_outage(
    r1: f64,
    r2: f64,
    q: f64,
    profile: &PyChannelProfile,
    split: &PyPowerSplit,
    antennas: Option<PyAntennaConfig>,
    sim: Option<PySimConfig>,
) -> PyResult<(PyEstimate, PyEstimate)> {
    let t = outage::make_targets(r1, r2, q, split.0).map_err(to_py)?;
    let (a, b) = montecarlo::mc_outage(&t, &profile.0, antennas_or_single(antennas), &sim_or_default(sim));
    Ok((PyEstimate(a), PyEstimate(b)))
}

/// A sweep definition: channel profile, power split, target rates, q grid,
/// antenna configurations and simulation settings.
#[pyclass(name = "SweepSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PySweepSpec(config::SweepSpec);

fn parse_outputs(names: Vec<String>) -> PyResult<BTreeSet<OutputKind>> {
    names
        .iter()
        .map(|n| {
            OutputKind::ALL
                .into_iter()
                .find(|k| output_name(*k) == n)
                .ok_or_else(|| PyValueError::new_err(format!("unknown output kind `{n}`")))
        })
        .collect()
}

fn output_name(k: OutputKind) -> &'static str {
    match k {
        OutputKind::RatesClosed => "rates_closed",
        OutputKind::RatesMc => "rates_mc",
        OutputKind::OmaMc => "oma_mc",
        OutputKind::OutageClosed => "outage_closed",
        OutputKind::OutageMc => "outage_mc",
    }
}

#[pymethods]
impl PySweepSpec {
    #[new]
    #[pyo3(signature = (profile, split, antennas, q_db, r1 = 1.0, r2 = 1.0, sim = None, outputs = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        profile: &PyChannelProfile,
        split: &PyPowerSplit,
        antennas: Vec<PyAntennaConfig>,
        q_db: Vec<f64>,
        r1: f64,
        r2: f64,
        sim: Option<PySimConfig>,
        outputs: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let outputs = match outputs {
            Some(names) => parse_outputs(names)?,
            None => OutputKind::ALL.into_iter().collect(),
        };
        config::SweepSpec::new(
            profile.0,
            split.0,
            antennas.into_iter().map(|a| a.0).collect(),
            (r1, r2),
            q_db,
            sim_or_default(sim),
            outputs,
        )
        .map(Self)
        .map_err(to_py)
    }

    /// The built-in scenario: −10..30 dB in 2 dB steps, antennas (1,1),
    /// (2,2), (3,3), 10^6 draws per point with seed 42.
    #[staticmethod]
    fn default() -> Self {
        Self(config::SweepSpec::default_scenario())
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        config::SweepSpec::from_toml_str(text).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        config::SweepSpec::from_file(Path::new(path)).map(Self).map_err(to_py)
    }

    /// Copy with a different seed and, optionally, sample count.
    #[pyo3(signature = (seed = None, n_samples = None))]
    fn with_simulation(&self, seed: Option<u64>, n_samples: Option<u64>) -> PyResult<Self> {
        let mut spec = self.0.clone();
        if let Some(seed) = seed {
            spec.sim = spec.sim.with_seed(seed);
        }
        if let Some(n) = n_samples {
            spec.sim = spec.sim.with_samples(n).map_err(to_py)?;
        }
        Ok(Self(spec))
    }

    fn with_q_db(&self, q_db: Vec<f64>) -> PyResult<Self> {
        self.0.clone().with_q_db(q_db).map(Self).map_err(to_py)
    }

    #[getter]
    fn q_db(&self) -> Vec<f64> {
        self.0.q_db().to_vec()
    }
    #[getter]
    fn antennas(&self) -> Vec<PyAntennaConfig> {
        self.0.antennas.iter().map(|&a| PyAntennaConfig(a)).collect()
    }
    #[getter]
    fn sim(&self) -> PySimConfig {
        PySimConfig(self.0.sim)
    }
    #[getter]
    fn outputs(&self) -> Vec<&'static str> {
        self.0.outputs.iter().map(|&k| output_name(k)).collect()
    }

    /// Evaluates every grid point. Releases the GIL while running.
    fn run(&self, py: Python<'_>) -> PyResult<SweepTable> {
        let spec = self.0.clone();
        py.detach(move || sweep::run_sweep(&spec))
            .map(|rows| SweepTable { rows })
            .map_err(to_py)
    }

    /// Compares every analytic quantity with its simulated counterpart.
    /// Returns a list of dicts with the z-score of each comparison.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let spec = self.0.clone();
        let checks = py.detach(move || validation::validate(&spec)).map_err(to_py)?;
        checks
            .iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("quantity", c.quantity.to_string())?;
                d.set_item("n_r", c.n_r)?;
                d.set_item("n_d", c.n_d)?;
                d.set_item("q_db", c.q_db)?;
                d.set_item("analytic", c.analytic)?;
                d.set_item("simulated", c.simulated)?;
                d.set_item("std_error", c.std_error)?;
                d.set_item("z", c.z())?;
                Ok(d)
            })
            .collect()
    }
}

/// Sweep output, one row per `(antennas, q)` point in column order of
/// `COLUMNS`. Missing values are `None`.
#[pyclass(frozen, skip_from_py_object)]
struct SweepTable {
    rows: Vec<sweep::SweepRow>,
}

fn render(rows: &[sweep::SweepRow], format: Format) -> PyResult<String> {
    let mut out = Vec::new();
    sweep::write_table(rows, format, &mut out).map_err(|e| PyOSError::new_err(e.to_string()))?;
    String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymethods]
impl SweepTable {
    fn __len__(&self) -> usize {
        self.rows.len()
    }

    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("q_db", r.q_db)?;
                d.set_item("q_linear", r.q_linear)?;
                d.set_item("n_r", r.n_r)?;
                d.set_item("n_d", r.n_d)?;
                for (name, v) in [
                    ("rate_s1_cf", r.rate_s1_cf),
                    ("rate_s2_cf", r.rate_s2_cf),
                    ("rate_sum_cf", r.rate_sum_cf),
                    ("rate_sum_mc", r.rate_sum_mc),
                    ("rate_sum_mc_stderr", r.rate_sum_mc_stderr),
                    ("rate_oma_mc", r.rate_oma_mc),
                    ("rate_oma_mc_stderr", r.rate_oma_mc_stderr),
                    ("outage_s1_cf", r.outage_s1_cf),
                    ("outage_s2_cf", r.outage_s2_cf),
                    ("outage_s1_mc", r.outage_s1_mc),
                    ("outage_s2_mc", r.outage_s2_mc),
                ] {
                    d.set_item(name, v)?;
                }
                Ok(d)
            })
            .collect()
    }

    fn to_csv(&self) -> PyResult<String> {
        render(&self.rows, Format::Csv)
    }

    fn to_json(&self) -> PyResult<String> {
        render(&self.rows, Format::Json)
    }

    /// `[(n_r, n_d, q_db or None, at_boundary)]`, where `q_db` is the SNR
    /// at which the NOMA sum rate first overtakes OMA.
    fn crossovers(&self) -> PyResult<Vec<(usize, usize, Option<f64>, bool)>> {
        Ok(sweep::find_crossovers(&self.rows)
            .map_err(to_py)?
            .into_iter()
            .map(|(a, c)| {
                (
                    a.n_r(),
                    a.n_d(),
                    c.map(|c| c.q_db),
                    c.is_some_and(|c| c.at_boundary),
                )
            })
            .collect())
    }
}

#[pyfunction]
fn db_to_linear(db: f64) -> f64 {
    config::db_to_linear(db)
}

#[pyfunction]
fn linear_to_db(linear: f64) -> f64 {
    config::linear_to_db(linear)
}

#[pymodule]
#[pyo3(name = "noma_underlay")]
fn noma_underlay_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannelProfile>()?;
    m.add_class::<PyPowerSplit>()?;
    m.add_class::<PyAntennaConfig>()?;
    m.add_class::<PySimConfig>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PySweepSpec>()?;
    m.add_class::<SweepTable>()?;
    m.add("COLUMNS", sweep::COLUMNS.to_vec())?;
    m.add_function(wrap_pyfunction!(rates, m)?)?;
    m.add_function(wrap_pyfunction!(rates_by_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(outage_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_rates, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_oma_rate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_outage, m)?)?;
    m.add_function(wrap_pyfunction!(db_to_linear, m)?)?;
    m.add_function(wrap_pyfunction!(linear_to_db, m)?)?;
    Ok(())
}
