//! Python bindings: problems from the built-in catalog or from Python
//! callables, the solver drivers, the min-norm kernel and the subdivision
//! cover. The GIL is released while Rust code runs; Python objectives
//! reacquire it per call.

use std::sync::{Arc, Mutex};

use nsmop::config::{InitialStep, SolverConfig};
use nsmop::problems::{catalog_listing, lookup};
use nsmop::subdivision::{pareto_cover as rs_pareto_cover, DyadicBox};
use nsmop::{BoundingBox, DirectionStatus, Error, ObjectiveOracle, Problem, SolverRun, StopReason};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Dimension { .. }
        | Error::NonFiniteInput(_)
        | Error::InvalidProblem(_)
        | Error::InvalidConfig(_)
        | Error::UnknownProblem(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// First exception raised by a Python objective during a call.
type ErrorSlot = Arc<Mutex<Option<PyErr>>>;

fn stash(slot: &ErrorSlot, err: PyErr) {
    let mut guard = slot.lock().unwrap_or_else(|p| p.into_inner());
    guard.get_or_insert(err);
}

#[pyclass(name = "SolverConfig", module = "pynsmop", from_py_object)]
#[derive(Clone)]
struct PySolverConfig {
    inner: SolverConfig,
}

#[pymethods]
impl PySolverConfig {
    /// `t0=None` selects the adaptive initial step `max(1/||v||, 1)`.
    #[new]
    #[pyo3(signature = (epsilon=1e-3, delta=1e-3, armijo_c=0.25, t0=None, eps_schedule=None, max_outer_iterations=10_000))]
    fn new(
        epsilon: f64,
        delta: f64,
        armijo_c: f64,
        t0: Option<f64>,
        eps_schedule: Option<Vec<f64>>,
        max_outer_iterations: usize,
    ) -> PyResult<Self> {
        let mut inner = SolverConfig::default()
            .with_epsilon(epsilon)
            .with_delta(delta)
            .with_initial_step(t0.map_or(InitialStep::Adaptive, InitialStep::Fixed))
            .with_max_outer_iterations(max_outer_iterations);
        inner.armijo_c = armijo_c;
        inner.epsilon_schedule = eps_schedule;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn armijo_c(&self) -> f64 {
        self.inner.armijo_c
    }

    #[getter]
    fn t0(&self) -> Option<f64> {
        match self.inner.initial_step {
            InitialStep::Fixed(t) => Some(t),
            InitialStep::Adaptive => None,
        }
    }

    #[getter]
    fn eps_schedule(&self) -> Option<Vec<f64>> {
        self.inner.epsilon_schedule.clone()
    }

    #[getter]
    fn max_outer_iterations(&self) -> usize {
        self.inner.max_outer_iterations
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverConfig(epsilon={:?}, delta={:?}, armijo_c={:?}, t0={:?}, eps_schedule={:?}, max_outer_iterations={})",
            self.inner.epsilon,
            self.inner.delta,
            self.inner.armijo_c,
            self.t0(),
            self.inner.epsilon_schedule,
            self.inner.max_outer_iterations
        )
    }
}

fn config_or_default(config: Option<PySolverConfig>) -> SolverConfig {
    config.map(|c| c.inner).unwrap_or_default()
}

#[pyclass(name = "Problem", module = "pynsmop", frozen)]
struct PyProblem {
    inner: Problem,
    errors: ErrorSlot,
}

impl PyProblem {
    /// Runs `f` without the GIL and surfaces any exception raised by a
    /// Python objective in the meantime.
    fn run<T: Send>(&self, py: Python<'_>, f: impl FnOnce(&Problem) -> nsmop::Result<T> + Send) -> PyResult<T> {
        let result = py.detach(|| f(&self.inner));
        if let Some(err) = self.errors.lock().unwrap_or_else(|p| p.into_inner()).take() {
            return Err(err);
        }
        result.map_err(to_py)
    }
}

#[pymethods]
impl PyProblem {
    /// `objectives` is a list of `(value, subgradient)` callable pairs taking
    /// a list of floats.
    #[new]
    fn new(name: String, dim: usize, objectives: Vec<(Py<PyAny>, Py<PyAny>)>) -> PyResult<Self> {
        let errors: ErrorSlot = Arc::default();
        let oracles = objectives
            .into_iter()
            .enumerate()
            .map(|(i, (value, subgradient))| {
                let (e1, e2) = (errors.clone(), errors.clone());
                ObjectiveOracle::new(
                    format!("{name}[{i}]"),
                    move |x: &[f64]| {
                        Python::attach(|py| match value.call1(py, (x.to_vec(),)).and_then(|r| r.extract::<f64>(py)) {
                            Ok(v) => v,
                            Err(err) => {
                                stash(&e1, err);
                                f64::NAN
                            }
                        })
                    },
                    move |x: &[f64]| {
                        Python::attach(|py| {
                            match subgradient.call1(py, (x.to_vec(),)).and_then(|r| r.extract::<Vec<f64>>(py)) {
                                Ok(g) => g,
                                Err(err) => {
                                    stash(&e2, err);
                                    vec![f64::NAN; x.len()]
                                }
                            }
                        })
                    },
                )
            })
            .collect();
        let inner = Problem::new(name, dim, oracles).map_err(to_py)?;
        Ok(Self { inner, errors })
    }

    /// Built-in problem by selector, e.g. `"table1-16"` or `"example-2-5"`.
    #[staticmethod]
    fn catalog(selector: &str) -> PyResult<Self> {
        Ok(Self {
            inner: lookup(selector).map_err(to_py)?,
            errors: Arc::default(),
        })
    }

    #[staticmethod]
    fn selectors() -> Vec<String> {
        catalog_listing().into_iter().map(|c| c.selector).collect()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }

    #[getter]
    fn benchmark_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.inner.benchmark_box().map(|b| (b.lower.clone(), b.upper.clone()))
    }

    fn evaluate(&self, py: Python<'_>, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.run(py, |p| p.evaluate(&x))
    }

    fn subgradient(&self, py: Python<'_>, i: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if i >= self.inner.num_objectives() {
            return Err(PyValueError::new_err(format!("objective index {i} out of range")));
        }
        self.run(py, |p| p.subgradient(i, &x))
    }

    /// Cumulative evaluation counters of this problem instance.
    fn counters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = self.inner.snapshot_counters();
        let d = PyDict::new(py);
        d.set_item("value_evals", c.value_evals)?;
        d.set_item("subgrad_evals", c.subgrad_evals)?;
        d.set_item("outer_iterations", c.outer_iterations)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, dim={}, num_objectives={})",
            self.inner.name(),
            self.inner.dim(),
            self.inner.num_objectives()
        )
    }
}

fn stop_label(s: StopReason) -> &'static str {
    match s {
        StopReason::Critical => "critical",
        StopReason::MaxIterations => "max_iterations",
        StopReason::UnboundedSuspected => "unbounded_suspected",
    }
}

#[pyclass(name = "SolverRun", module = "pynsmop", frozen, get_all)]
struct PySolverRun {
    iterates: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    directions: Vec<Vec<f64>>,
    step_lengths: Vec<f64>,
    stop_reason: &'static str,
    steps: usize,
    value_evals: u64,
    subgrad_evals: u64,
    outer_iterations: u64,
    stage_epsilons: Vec<f64>,
}

impl From<SolverRun> for PySolverRun {
    fn from(run: SolverRun) -> Self {
        Self {
            stop_reason: stop_label(run.stop_reason),
            steps: run.steps,
            value_evals: run.counters.value_evals,
            subgrad_evals: run.counters.subgrad_evals,
            outer_iterations: run.counters.outer_iterations,
            stage_epsilons: run.stages.iter().map(|s| s.epsilon).collect(),
            iterates: run.iterates,
            values: run.values,
            directions: run.directions,
            step_lengths: run.step_lengths,
        }
    }
}

#[pymethods]
impl PySolverRun {
    #[getter]
    fn final_iterate(&self) -> Vec<f64> {
        self.iterates.last().cloned().unwrap_or_default()
    }

    #[getter]
    fn final_values(&self) -> Vec<f64> {
        self.values.last().cloned().unwrap_or_default()
    }

    #[getter]
    fn critical(&self) -> bool {
        self.stop_reason == "critical"
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverRun(stop_reason={:?}, steps={}, final_iterate={:?})",
            self.stop_reason,
            self.steps,
            self.final_iterate()
        )
    }
}

#[pyclass(name = "MinNormPoint", module = "pynsmop", frozen, get_all)]
struct PyMinNormPoint {
    v: Vec<f64>,
    coefficients: Vec<f64>,
    norm: f64,
}

#[pyclass(name = "DescentDirection", module = "pynsmop", frozen, get_all)]
struct PyDescentDirection {
    /// `"critical"` or `"acceptable"`
    status: &'static str,
    v: Vec<f64>,
    norm: f64,
    bundle: Vec<Vec<f64>>,
    sample_points: Vec<Vec<f64>>,
    iterations: usize,
}

#[pyclass(name = "ParetoCover", module = "pynsmop", frozen, get_all)]
struct PyParetoCover {
    centers: Vec<Vec<f64>>,
    radii: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    image_values: Vec<Vec<f64>>,
    nondominated: Vec<bool>,
    escaped: usize,
}

/// Minimum-norm element `v` of `-conv(bundle)`.
#[pyfunction]
#[pyo3(signature = (bundle, qp_tolerance=1e-12))]
fn min_norm_point(py: Python<'_>, bundle: Vec<Vec<f64>>, qp_tolerance: f64) -> PyResult<PyMinNormPoint> {
    let sol = py
        .detach(|| nsmop::Bundle::new(bundle).and_then(|b| nsmop::min_norm_point(&b, qp_tolerance)))
        .map_err(to_py)?;
    Ok(PyMinNormPoint {
        norm: sol.norm(),
        v: sol.v,
        coefficients: sol.coefficients,
    })
}

#[pyfunction]
#[pyo3(signature = (problem, x, config=None))]
fn compute_descent_direction(
    py: Python<'_>,
    problem: &Bound<'_, PyProblem>,
    x: Vec<f64>,
    config: Option<PySolverConfig>,
) -> PyResult<PyDescentDirection> {
    let config = config_or_default(config);
    let out = problem
        .get()
        .run(py, |p| nsmop::compute_descent_direction(p, &x, &config))?;
    Ok(PyDescentDirection {
        status: match out.status {
            DirectionStatus::Critical => "critical",
            DirectionStatus::Acceptable => "acceptable",
        },
        norm: out.norm(),
        bundle: out.bundle.members().to_vec(),
        v: out.v,
        sample_points: out.sample_points,
        iterations: out.iterations,
    })
}

/// Descent method with a single radius.
#[pyfunction]
#[pyo3(signature = (problem, x, config=None))]
fn solve(py: Python<'_>, problem: &Bound<'_, PyProblem>, x: Vec<f64>, config: Option<PySolverConfig>) -> PyResult<PySolverRun> {
    let config = config_or_default(config);
    Ok(problem.get().run(py, |p| nsmop::solve(p, &x, &config))?.into())
}

/// Descent method over a decreasing radius schedule (default 0.1, 0.01, 0.001).
#[pyfunction]
#[pyo3(signature = (problem, x, config=None))]
fn solve_eps_decreasing(
    py: Python<'_>,
    problem: &Bound<'_, PyProblem>,
    x: Vec<f64>,
    config: Option<PySolverConfig>,
) -> PyResult<PySolverRun> {
    let mut config = config_or_default(config);
    config.epsilon_schedule.get_or_insert_with(|| vec![0.1, 0.01, 0.001]);
    Ok(problem.get().run(py, |p| nsmop::solve_eps_decreasing(p, &x, &config))?.into())
}

/// Box cover of the Pareto critical set inside `[lower, upper]`.
#[pyfunction]
#[pyo3(signature = (problem, lower, upper, iterations=9, m=15, samples_per_axis=5, config=None))]
#[allow(clippy::too_many_arguments)]
fn pareto_cover(
    py: Python<'_>,
    problem: &Bound<'_, PyProblem>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    iterations: usize,
    m: usize,
    samples_per_axis: usize,
    config: Option<PySolverConfig>,
) -> PyResult<PyParetoCover> {
    let config = config_or_default(config);
    let cover = problem.get().run(py, |p| {
        let root = DyadicBox::from_bounds(&BoundingBox::new(lower, upper)?)?;
        rs_pareto_cover(p, &config, root, iterations, m, samples_per_axis)
    })?;
    let boxes = cover.collection.boxes();
    Ok(PyParetoCover {
        centers: boxes.iter().map(|b| b.center.clone()).collect(),
        radii: boxes.iter().map(|b| b.radii.clone()).collect(),
        images: cover.images,
        image_values: cover.image_values,
        nondominated: cover.nondominated,
        escaped: cover.escaped,
    })
}

/// Pareto dominance: `a` no worse than `b` everywhere and better somewhere.
#[pyfunction]
fn dominates(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    nsmop::dominates(&a, &b).map_err(to_py)
}

#[pymodule]
fn pynsmop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolverRun>()?;
    m.add_class::<PyMinNormPoint>()?;
    m.add_class::<PyDescentDirection>()?;
    m.add_class::<PyParetoCover>()?;
    m.add_function(wrap_pyfunction!(min_norm_point, m)?)?;
    m.add_function(wrap_pyfunction!(compute_descent_direction, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_eps_decreasing, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_cover, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    Ok(())
}
