//! Python bindings. Errors from the library surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wzchain::bounds::{self, BoundReport};
use wzchain::chain::{self, Chain, DeltaTable, Plan, RegionMode};
use wzchain::codec::{self, CodecParams, Combiner};
use wzchain::harness::{self, ExperimentConfig, OutputFormat, RegionSweep};
use wzchain::quantizer::{self, MqParams};
use wzchain::rotation::{self, Rotation};
use wzchain::seed::{Role, StreamLabel};
use wzchain::sim::{self, Instance, InstanceSpec};

fn err(e: wzchain::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = wzchain::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, k, eps, delta_prime, coin))]
fn mq_encode(x: f64, k: u32, eps: f64, delta_prime: f64, coin: f64) -> PyResult<u32> {
    let p = MqParams::new(k, eps, delta_prime).map_err(err)?;
    quantizer::mq_encode(x, &p, coin).map_err(err)
}

#[pyfunction]
fn mq_decode(symbol: u32, h: f64, k: u32, eps: f64, delta_prime: f64) -> PyResult<f64> {
    let p = MqParams::new(k, eps, delta_prime).map_err(err)?;
    quantizer::mq_decode(symbol, h, &p).map_err(err)
}

/// Exact expectation and worst-case error of encode/decode at `(x, h)`.
#[pyfunction]
fn mq_oracle(x: f64, h: f64, k: u32, eps: f64, delta_prime: f64) -> PyResult<(f64, f64)> {
    let p = MqParams::new(k, eps, delta_prime).map_err(err)?;
    let o = quantizer::mq_oracle(x, h, &p).map_err(err)?;
    Ok((o.expected_decode, o.worst_abs_err))
}

#[pyclass(name = "Rotation", module = "pywzchain")]
struct PyRotation(Rotation);

#[pymethods]
impl PyRotation {
    #[new]
    #[pyo3(signature = (d, seed, client = 0, trial = 0))]
    fn new(d: usize, seed: u64, client: usize, trial: u64) -> Self {
        PyRotation(rotation::sample_rotation(
            d,
            seed,
            &StreamLabel::new(trial, client, Role::Rotation),
        ))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.apply(&v).map_err(err)
    }

    fn inverse(&self, w: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.inverse_truncated(&w).map_err(err)
    }
}

#[pyclass(name = "CodecParams", module = "pywzchain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCodecParams(CodecParams);

#[pymethods]
impl PyCodecParams {
    #[new]
    fn new(n: usize, d: usize, r: usize) -> PyResult<Self> {
        codec::derive_codec_params(n, d, r).map(PyCodecParams).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }
    #[getter]
    fn d(&self) -> usize {
        self.0.d
    }
    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }
    #[getter]
    fn r(&self) -> usize {
        self.0.r
    }
    #[getter]
    fn log_k(&self) -> u32 {
        self.0.log_k
    }
    #[getter]
    fn k(&self) -> u32 {
        self.0.k
    }
    #[getter]
    fn sample_count(&self) -> usize {
        self.0.sample_count
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "CodecParams(n={}, d={}, r={}, k={}, sample_count={}, mu={})",
            p.n, p.d, p.r, p.k, p.sample_count, p.mu
        )
    }
}

#[pyclass(name = "DeltaTable", module = "pywzchain", skip_from_py_object)]
#[derive(Clone)]
struct PyDeltaTable(DeltaTable);

#[pymethods]
impl PyDeltaTable {
    /// Square matrix: diagonal entries are side distances, the upper
    /// triangle holds pairwise distances.
    #[new]
    fn new(matrix: Vec<Vec<f64>>) -> PyResult<Self> {
        DeltaTable::from_matrix(&matrix).map(PyDeltaTable).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn side(&self, i: usize) -> PyResult<f64> {
        self.check(i)?;
        Ok(self.0.side(i))
    }

    fn cross(&self, i: usize, j: usize) -> PyResult<f64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.0.cross(i, j))
    }

    fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.0.to_matrix()
    }
}

impl PyDeltaTable {
    fn check(&self, i: usize) -> PyResult<()> {
        if i >= self.0.n() {
            return Err(PyValueError::new_err(format!("client {i} out of range")));
        }
        Ok(())
    }
}

#[pyclass(name = "Plan", module = "pywzchain", skip_from_py_object)]
#[derive(Clone)]
struct PyPlan(Plan);

#[pymethods]
impl PyPlan {
    #[staticmethod]
    fn wyner_ziv(table: &PyDeltaTable) -> Self {
        PyPlan(Plan::wyner_ziv(&table.0))
    }

    #[staticmethod]
    fn algorithm1(table: &PyDeltaTable, params: &PyCodecParams) -> Self {
        PyPlan(chain::algorithm1(&table.0, params.0.dim, params.0.n).0)
    }

    #[staticmethod]
    #[pyo3(signature = (table, n, region_mode = "eq15"))]
    fn algorithm2(table: &PyDeltaTable, n: usize, region_mode: &str) -> PyResult<Self> {
        let mode: RegionMode = parse(region_mode)?;
        Ok(PyPlan(chain::algorithm2(&table.0, n, mode)))
    }

    /// Parses one `i: y_r -> x_r -> ... -> x_i` line per chain.
    #[staticmethod]
    fn from_text(text: &str, table: &PyDeltaTable) -> PyResult<Self> {
        chain::parse_chain_list(text, &table.0).map(PyPlan).map_err(err)
    }

    #[getter]
    fn chains(&self) -> Vec<Vec<usize>> {
        self.0.chains.iter().map(|c| c.nodes().to_vec()).collect()
    }

    #[getter]
    fn decode_order(&self) -> Vec<usize> {
        self.0.decode_order.clone()
    }

    fn d_values(&self, n: usize) -> Vec<f64> {
        self.0.chains.iter().map(|c| chain::d_value(c, n)).collect()
    }

    fn validate(&self) -> PyResult<()> {
        chain::validate_chains(&self.0.chains, &self.0.decode_order)
            .map_err(|v| PyValueError::new_err(v.to_string()))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Plan({:?})", self.0.to_text())
    }
}

/// Effective squared distance of a chain with hop distances `hops`.
#[pyfunction]
fn d_value(hops: Vec<f64>, n: usize) -> PyResult<f64> {
    let len = hops.len();
    if len == 0 {
        return Err(PyValueError::new_err("empty chain"));
    }
    // a path 0 -> 1 -> ... whose table carries exactly these hops
    let mut m = vec![vec![f64::INFINITY; len]; len];
    m[0][0] = hops[0];
    for i in 1..len {
        m[i][i] = 0.0;
        m[i - 1][i] = hops[i];
    }
    let table = DeltaTable::from_matrix(&m).map_err(err)?;
    let c = Chain::from_nodes((0..len).collect(), &table).map_err(err)?;
    Ok(chain::d_value(&c, n))
}

#[pyfunction]
fn c_t(t: usize, n: usize) -> f64 {
    chain::c_t(t, n)
}

#[pyfunction]
#[pyo3(signature = (delta_t, delta_ti, delta_i, n, region_mode = "eq15"))]
fn region2_check(delta_t: f64, delta_ti: f64, delta_i: f64, n: usize, region_mode: &str) -> PyResult<bool> {
    Ok(chain::region2_check(delta_t, delta_ti, delta_i, n, parse(region_mode)?))
}

#[pyfunction]
fn baseline_bound(delta_s: Vec<f64>, n: usize, d: usize, r: usize) -> f64 {
    bounds::baseline_bound(&delta_s, n, d, r).value
}

#[pyfunction]
fn remark1_ratio(sum_d: f64, sum_delta_sq: f64, log_k: u32) -> f64 {
    bounds::remark1_ratio(sum_d, sum_delta_sq, log_k)
}

fn report_dict<'py>(py: Python<'py>, r: &BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("baseline", r.baseline)?;
    d.set_item("proposed", r.proposed)?;
    d.set_item("b_used", r.b_used)?;
    d.set_item("sum_d", r.sum_d)?;
    d.set_item("sum_delta_sq", r.sum_delta_sq)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("improvement_region", r.improvement_region)?;
    d.set_item("in_regime", r.in_regime)?;
    Ok(d)
}

#[pyfunction]
fn proposed_bound<'py>(
    py: Python<'py>,
    plan: &PyPlan,
    table: &PyDeltaTable,
    params: &PyCodecParams,
) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &bounds::proposed_bound(&plan.0.chains, &table.0, &params.0))
}

#[pyclass(name = "Instance", module = "pywzchain")]
struct PyInstance(Instance);

#[pymethods]
impl PyInstance {
    /// Head client `head` at a random centre, others at distance `delta_ti`
    /// from it; side distances `delta_t` (head) and `delta_i` (others).
    #[staticmethod]
    #[pyo3(signature = (n, d, delta_t, delta_ti, delta_i, seed, head = 0))]
    fn star(n: usize, d: usize, delta_t: f64, delta_ti: f64, delta_i: f64, seed: u64, head: usize) -> PyResult<Self> {
        if head >= n {
            return Err(PyValueError::new_err("head out of range"));
        }
        let mut side = vec![delta_i; n];
        side[head] = delta_t;
        let mut link = vec![delta_ti; n];
        link[head] = 0.0;
        sim::generate_instance(n, d, &InstanceSpec::Star { head, side, link }, seed)
            .map(PyInstance)
            .map_err(err)
    }

    #[staticmethod]
    fn derive(n: usize, d: usize, spread: f64, noise: Vec<f64>, seed: u64) -> PyResult<Self> {
        sim::generate_instance(n, d, &InstanceSpec::Derive { spread, noise }, seed)
            .map(PyInstance)
            .map_err(err)
    }

    /// User vectors; raises if any declared distance is exceeded.
    #[staticmethod]
    fn verify(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, table: &PyDeltaTable) -> PyResult<Self> {
        let n = x.len();
        let d = x.first().map_or(0, Vec::len);
        let spec = InstanceSpec::Verify {
            x,
            y,
            table: table.0.clone(),
        };
        sim::generate_instance(n, d, &spec, 0).map(PyInstance).map_err(err)
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.0.x.clone()
    }
    #[getter]
    fn y(&self) -> Vec<Vec<f64>> {
        self.0.y.clone()
    }
    #[getter]
    fn true_mean(&self) -> Vec<f64> {
        self.0.true_mean.clone()
    }
    #[getter]
    fn table(&self) -> PyDeltaTable {
        PyDeltaTable(self.0.table.clone())
    }
}

#[pyfunction]
#[pyo3(signature = (instance, plan, params, seed, trial = 0, combiner = "scaled"))]
fn run_trial<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    plan: &PyPlan,
    params: &PyCodecParams,
    seed: u64,
    trial: u64,
    combiner: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let c: Combiner = parse(combiner)?;
    let r = sim::run_trial(&instance.0, &plan.0, &params.0, seed, trial, c).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("estimate", r.estimate)?;
    d.set_item("sq_error", r.sq_error)?;
    d.set_item("per_client_sq_errors", r.per_client_sq_errors)?;
    d.set_item("bits_sent", r.bits_sent)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (instance, plan, params, trials, seed, combiner = "scaled"))]
fn monte_carlo<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    plan: &PyPlan,
    params: &PyCodecParams,
    trials: usize,
    seed: u64,
    combiner: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let c: Combiner = parse(combiner)?;
    let (inst, pl, pa) = (&instance.0, &plan.0, &params.0);
    let rep = py
        .detach(|| sim::monte_carlo(inst, pl, pa, trials, seed, c))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("trials", rep.trials)?;
    d.set_item("mse", rep.mse)?;
    d.set_item("stderr", rep.stderr)?;
    d.set_item("per_client_mse", rep.per_client_mse)?;
    d.set_item("bits_per_trial", rep.bits_per_trial)?;
    d.set_item("bounds", report_dict(py, &rep.bounds)?)?;
    Ok(d)
}

/// Runs the `simulate` pipeline on a TOML (or JSON) config; returns CSV.
#[pyfunction]
fn simulate(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config).map_err(err)?;
    py.detach(|| harness::cmd_simulate(&cfg)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (config, format = "csv"))]
fn bounds_report(config: &str, format: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config).map_err(err)?;
    let f: OutputFormat = parse(format)?;
    harness::cmd_bounds(&cfg, f).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n = 16, delta_t = 1.0, delta_ti = 1.0, start = 0.5, stop = 10.0, step = 0.1))]
fn region_sweep(n: usize, delta_t: f64, delta_ti: f64, start: f64, stop: f64, step: f64) -> PyResult<String> {
    harness::cmd_region(&RegionSweep {
        n,
        delta_t,
        delta_ti,
        from: start,
        to: stop,
        step,
    })
    .map_err(err)
}

#[pymodule]
fn pywzchain(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRotation>()?;
    m.add_class::<PyCodecParams>()?;
    m.add_class::<PyDeltaTable>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(mq_encode, m)?)?;
    m.add_function(wrap_pyfunction!(mq_decode, m)?)?;
    m.add_function(wrap_pyfunction!(mq_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(d_value, m)?)?;
    m.add_function(wrap_pyfunction!(c_t, m)?)?;
    m.add_function(wrap_pyfunction!(region2_check, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_bound, m)?)?;
    m.add_function(wrap_pyfunction!(remark1_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(proposed_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(region_sweep, m)?)?;
    Ok(())
}
