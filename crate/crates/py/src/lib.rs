//! Python bindings: instances, plans, the solvers, the oracle and simulation.
//!
//!     import scps_py as s
//!     inst = s.Instance.generate(variant="b", chargers=8, seed=3)
//!     res = s.solve(inst, "le")
//!     print(res.plan.visits, res.cost.alpha)

use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use scps::generator::{generate, Availability, GenConfig, Layout};
use scps::instance::{ActionSpace, DEFAULT_TR_MINUTES};
use scps::labeling::DominanceMode;
use scps::oracle::{enumerate_optimal as oracle_optimal, DEFAULT_MAX_CHARGERS};
use scps::reduction::{q_lower_bound, reduce_tsp as reduce};
use scps::solver::{with_action_space, Algorithm, SolveOptions};
use scps::ScpsError;

fn to_py(e: ScpsError) -> PyErr {
    match e {
        ScpsError::ContractViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_space(name: &str, t_r: f64) -> PyResult<ActionSpace> {
    ActionSpace::parse(name, t_r)
        .ok_or_else(|| PyValueError::new_err(format!("unknown action space '{name}' (co, dn, dn-r, tr)")))
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A problem instance: stations, travel times, variant and action space.
#[pyclass(name = "Instance", module = "scps_py", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: scps::Instance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = scps::Instance::from_json_str(text).map_err(to_py)?;
        inner.ensure_valid().map_err(to_py)?;
        Ok(PyInstance { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: scps::Instance::load(path).map_err(to_py)?,
        })
    }

    /// Random instance; `layout` is "uniform", "clustered" or "grid".
    #[staticmethod]
    #[pyo3(signature = (variant="a", chargers=10, seed=0, availability="med", t_max=20.0, layout="uniform", action_space="co", t_r=DEFAULT_TR_MINUTES, recovery_mu_inv=None, energy_b0=None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        variant: &str,
        chargers: usize,
        seed: u64,
        availability: &str,
        t_max: f64,
        layout: &str,
        action_space: &str,
        t_r: f64,
        recovery_mu_inv: Option<f64>,
        energy_b0: Option<f64>,
    ) -> PyResult<Self> {
        let variant = scps::Variant::parse(variant)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variant '{variant}'")))?;
        let availability = Availability::parse(availability)
            .ok_or_else(|| PyValueError::new_err(format!("unknown availability '{availability}'")))?;
        let layout = match layout {
            "uniform" => Layout::UniformSquare { side_m: 5000.0 },
            "clustered" => Layout::Clustered { clusters: 3, side_m: 5000.0, spread_m: 600.0 },
            "grid" => Layout::ManhattanGrid { blocks: 8, block_m: 500.0 },
            other => return Err(PyValueError::new_err(format!("unknown layout '{other}'"))),
        };
        let cfg = GenConfig {
            n_stations: chargers,
            layout,
            availability,
            seed,
            t_max,
            action_space: parse_space(action_space, t_r)?,
            recovery_mu_inv,
            energy_b0,
            ..GenConfig::default()
        };
        Ok(PyInstance {
            inner: generate(&cfg, variant).map_err(to_py)?,
        })
    }

    /// The three-vertex fixture used throughout the docs.
    #[staticmethod]
    #[pyo3(signature = (variant="a"))]
    fn tri_station(variant: &str) -> PyResult<Self> {
        let v = scps::Variant::parse(variant)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variant '{variant}'")))?;
        Ok(PyInstance {
            inner: scps::fixtures::tri_station(v),
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(to_py)
    }

    /// Violations found by validation; empty when the instance is usable.
    fn validate(&self) -> Vec<String> {
        self.inner.validate()
    }

    #[pyo3(signature = (name, t_r=DEFAULT_TR_MINUTES))]
    fn with_action_space(&self, name: &str, t_r: f64) -> PyResult<Self> {
        Ok(PyInstance {
            inner: with_action_space(&self.inner, parse_space(name, t_r)?),
        })
    }

    #[getter]
    fn chargers(&self) -> usize {
        self.inner.charger_count()
    }

    #[getter]
    fn variant(&self) -> String {
        format!("{:?}", self.inner.variant)
    }

    #[getter]
    fn action_space(&self) -> &'static str {
        self.inner.action_space.name()
    }

    #[getter]
    fn t_max(&self) -> f64 {
        self.inner.t_max
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(variant={:?}, chargers={}, action_space={}, t_max={})",
            self.inner.variant,
            self.inner.charger_count(),
            self.inner.action_space.name(),
            self.inner.t_max
        )
    }
}

/// Visit order starting at vertex 0, optionally ending with a wait.
#[pyclass(name = "Plan", module = "scps_py", from_py_object)]
#[derive(Clone)]
struct PyPlan {
    inner: scps::SearchPlan,
}

#[pymethods]
impl PyPlan {
    #[new]
    #[pyo3(signature = (visits, wait_at_end=false))]
    fn new(visits: Vec<usize>, wait_at_end: bool) -> Self {
        PyPlan {
            inner: scps::SearchPlan::new(visits, wait_at_end),
        }
    }

    #[getter]
    fn visits(&self) -> Vec<usize> {
        self.inner.visits.clone()
    }

    #[getter]
    fn wait_at_end(&self) -> bool {
        self.inner.wait_at_end
    }

    fn __eq__(&self, other: &PyPlan) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Plan(visits={:?}, wait_at_end={})", self.inner.visits, self.inner.wait_at_end)
    }
}

#[pyclass(name = "CostBreakdown", module = "scps_py", frozen)]
struct PyCost {
    inner: scps::CostBreakdown,
}

#[pymethods]
impl PyCost {
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    /// Expected cost without the terminal penalty.
    #[getter]
    fn partial_cost(&self) -> f64 {
        self.inner.partial_cost
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn rho_bar(&self) -> f64 {
        self.inner.rho_bar
    }

    #[getter]
    fn travel(&self) -> f64 {
        self.inner.travel
    }

    #[getter]
    fn success_time(&self) -> Option<f64> {
        self.inner.success_time
    }

    fn __repr__(&self) -> String {
        format!("CostBreakdown(alpha={}, rho_bar={})", self.inner.alpha, self.inner.rho_bar)
    }
}

#[pyclass(name = "SolveResult", module = "scps_py", frozen)]
struct PySolveResult {
    #[pyo3(get)]
    algorithm: String,
    #[pyo3(get)]
    action_space: String,
    #[pyo3(get)]
    plan: PyPlan,
    cost: scps::CostBreakdown,
    stats: String,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn cost(&self) -> PyCost {
        PyCost { inner: self.cost }
    }

    /// Solver statistics as a dict.
    #[getter]
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.stats)
    }

    fn __repr__(&self) -> String {
        format!("SolveResult({}, alpha={})", self.algorithm, self.cost.alpha)
    }
}

#[pyfunction]
fn expected_cost(instance: &PyInstance, plan: &PyPlan) -> PyResult<PyCost> {
    Ok(PyCost {
        inner: scps::mdp::expected_cost(&instance.inner, &plan.inner).map_err(to_py)?,
    })
}

/// Solve with "le", "lh", "ro", "greedy" or "naive".
#[pyfunction]
#[pyo3(signature = (instance, algo="le", dominance=None, time_limit=None, max_labels=None))]
fn solve(
    instance: &PyInstance,
    algo: &str,
    dominance: Option<&str>,
    time_limit: Option<f64>,
    max_labels: Option<u64>,
) -> PyResult<PySolveResult> {
    let algo = Algorithm::parse(algo).ok_or_else(|| PyValueError::new_err(format!("unknown algorithm '{algo}'")))?;
    let dominance = dominance
        .map(|d| DominanceMode::parse(d).ok_or_else(|| PyValueError::new_err(format!("unknown dominance '{d}'"))))
        .transpose()?;
    let time_limit = time_limit
        .map(|s| Duration::try_from_secs_f64(s).map_err(|e| PyValueError::new_err(format!("time_limit: {e}"))))
        .transpose()?;
    let opts = SolveOptions {
        dominance,
        time_limit,
        max_labels,
        ..SolveOptions::default()
    };
    let out = scps::solve(&instance.inner, algo, &opts).map_err(to_py)?;
    Ok(PySolveResult {
        algorithm: algo.name().to_string(),
        action_space: out.action_space.name().to_string(),
        plan: PyPlan { inner: out.plan },
        cost: out.cost,
        stats: serde_json::to_string(&out.stats).expect("serializable"),
    })
}

/// Optimal plan and cost by exhaustive enumeration.
#[pyfunction]
#[pyo3(signature = (instance, max_chargers=DEFAULT_MAX_CHARGERS))]
fn enumerate_optimal(instance: &PyInstance, max_chargers: usize) -> PyResult<(PyPlan, f64)> {
    let r = oracle_optimal(&instance.inner, max_chargers).map_err(to_py)?;
    Ok((PyPlan { inner: r.best_plan }, r.best_alpha))
}

/// Simulate named plans on shared availability draws; returns the metrics report as a dict.
#[pyfunction]
#[pyo3(signature = (instance, plans, runs=1000, seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    plans: Vec<(String, PyPlan)>,
    runs: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let plans: Vec<_> = plans.into_iter().map(|(n, p)| (n, p.inner)).collect();
    let report = py
        .detach(|| scps::simulation::run_experiment(&instance.inner, &plans, runs, seed))
        .map_err(to_py)?;
    json_to_py(py, &serde_json::to_string(&report).expect("serializable"))
}

#[pyfunction]
fn recovery_probability(p: f64, mu_inv: f64, delta: f64) -> f64 {
    scps::mdp::recovery_probability(p, mu_inv, delta)
}

/// Instance of the TSP reduction with its decision thresholds.
#[pyfunction]
#[pyo3(signature = (distances, theta, start=0, q=None))]
fn reduce_tsp<'py>(
    py: Python<'py>,
    distances: Vec<Vec<f64>>,
    theta: f64,
    start: usize,
    q: Option<f64>,
) -> PyResult<(PyInstance, Bound<'py, PyDict>)> {
    let q = q.unwrap_or_else(|| {
        let delta = distances.iter().flatten().copied().fold(0.0, f64::max);
        (q_lower_bound(delta, distances.len()) + 1.0) / 2.0
    });
    let r = reduce(&distances, start, q, theta).map_err(to_py)?;
    let info = PyDict::new(py);
    info.set_item("threshold", r.threshold)?;
    info.set_item("scaled_threshold", r.scaled_threshold)?;
    info.set_item("q", r.q)?;
    info.set_item("s_prime", r.s_prime)?;
    Ok((PyInstance { inner: r.instance }, info))
}

#[pymodule]
fn scps_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PyCost>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(expected_cost, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_probability, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_tsp, m)?)?;
    Ok(())
}
