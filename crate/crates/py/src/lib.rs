//! Python bindings. Objective points cross the boundary in minimization
//! form unless a method says otherwise.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use trimoip::metrics::{self, ReferenceFront};
use trimoip::model::generate;
use trimoip::{Error, Point, PrConfig, Variant};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::Infeasible
        | Error::Unbounded
        | Error::NumericalFailure { .. }
        | Error::NoFeasibleRounded
        | Error::EnumerationLimit(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(frozen, name = "Problem")]
struct PyProblem {
    inner: trimoip::Problem,
}

#[pymethods]
impl PyProblem {
    /// Three profit rows are maximized.
    #[staticmethod]
    fn knapsack(profits: [Vec<i64>; 3], weights: Vec<i64>, capacity: i64) -> PyResult<Self> {
        let inner = trimoip::Problem::knapsack(profits, weights, capacity).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    /// Cost rows are indexed `agent * tasks + task` and minimized.
    #[staticmethod]
    fn assignment(tasks: usize, costs: [Vec<i64>; 3]) -> PyResult<Self> {
        let inner = trimoip::Problem::assignment(tasks, costs).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, low=1, high=1000))]
    fn generate_knapsack(n: usize, seed: u64, low: i64, high: i64) -> PyResult<Self> {
        let inner = generate::generate_knapsack(n, seed, low..=high).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (tasks, seed, low=1, high=1000))]
    fn generate_assignment(tasks: usize, seed: u64, low: i64, high: i64) -> PyResult<Self> {
        let inner = generate::generate_assignment(tasks, seed, low..=high).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let inner = trimoip::io::read_instance(path).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = trimoip::io::parse_instance(text).map_err(py_err)?;
        Ok(PyProblem { inner })
    }

    fn to_text(&self) -> String {
        trimoip::io::format_instance(&self.inner)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn senses(&self) -> Vec<String> {
        self.inner.senses().iter().map(|s| s.to_string()).collect()
    }

    fn evaluate(&self, x: Vec<u8>) -> PyResult<Point> {
        self.inner.evaluate(&x).map_err(py_err)
    }

    /// Objective values in the senses the instance was stated in.
    fn evaluate_original(&self, x: Vec<u8>) -> PyResult<Point> {
        Ok(self.inner.to_original(self.evaluate(x)?))
    }

    fn is_feasible(&self, x: Vec<u8>) -> PyResult<bool> {
        self.inner.is_feasible(&x).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(kind={:?}, n={}, m={})",
            self.inner.kind().name(),
            self.inner.n(),
            self.inner.m()
        )
    }
}

#[pyclass(frozen, get_all)]
struct LbPoint {
    x: Vec<f64>,
    y: [f64; 3],
    weight: [f64; 3],
}

#[pyclass(frozen, get_all)]
struct RunResult {
    /// `(x, y)` pairs sorted by `y`.
    front: Vec<(Vec<u8>, Point)>,
    lb: Vec<Py<LbPoint>>,
    stats: Py<PyDict>,
}

/// Extreme supported points of the LP relaxation.
#[pyfunction]
fn compute_lb_set(py: Python<'_>, problem: &PyProblem) -> PyResult<Vec<Py<LbPoint>>> {
    let lb = py
        .detach(|| trimoip::compute_lb_set(&problem.inner))
        .map_err(py_err)?;
    lb_points(py, &lb)
}

fn lb_points(py: Python<'_>, lb: &trimoip::LbSet) -> PyResult<Vec<Py<LbPoint>>> {
    lb.points
        .iter()
        .map(|p| {
            Py::new(
                py,
                LbPoint {
                    x: p.x.clone(),
                    y: p.y,
                    weight: p.weight,
                },
            )
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (
    problem,
    variant = "PI",
    seed = 0,
    iteration_multiplier = 50,
    best_move_probability = 0.7,
    force_pr = false,
))]
fn run(
    py: Python<'_>,
    problem: &PyProblem,
    variant: &str,
    seed: u64,
    iteration_multiplier: usize,
    best_move_probability: f64,
    force_pr: bool,
) -> PyResult<RunResult> {
    let variant: Variant = variant.parse().map_err(py_err)?;
    let mut config = PrConfig::new(variant, seed);
    config.iteration_multiplier = iteration_multiplier;
    config.best_move_probability = best_move_probability;
    config.force_pr = force_pr;
    let out = py
        .detach(|| trimoip::run(&problem.inner, &config))
        .map_err(py_err)?;

    let s = &out.stats;
    let stats = PyDict::new(py);
    stats.set_item("variant", s.variant.name())?;
    stats.set_item("seed", s.seed)?;
    stats.set_item("front_size", s.front_size)?;
    stats.set_item("wall_time", s.wall_time)?;
    stats.set_item("lb_time", s.lb_time)?;
    stats.set_item("lp_count", s.lp_count)?;
    stats.set_item("lb_size", s.lb_size)?;
    stats.set_item("ir_initial", s.ir_initial)?;
    stats.set_item("ir_final", s.ir_final)?;
    stats.set_item("pr_iterations", s.pr_iterations)?;
    stats.set_item("dropped_infeasible", s.dropped_infeasible)?;

    Ok(RunResult {
        front: out.front.iter().map(|s| (s.x.clone(), s.y)).collect(),
        lb: lb_points(py, &out.lb)?,
        stats: stats.unbind(),
    })
}

/// Exact nondominated points by complete enumeration (small instances).
#[pyfunction]
fn exact_front(py: Python<'_>, problem: &PyProblem) -> PyResult<Vec<Point>> {
    let front = py
        .detach(|| metrics::exact_front(&problem.inner))
        .map_err(py_err)?;
    Ok(front.points)
}

#[pyfunction]
fn filter_nondominated(points: Vec<Point>) -> Vec<Point> {
    metrics::filter_nondominated(&points)
}

/// Hypervolume of normalized points against `(1, 1, 1)`.
#[pyfunction]
fn hypervolume(points: Vec<[f64; 3]>) -> PyResult<f64> {
    metrics::hypervolume(&points).map_err(py_err)
}

/// Percentage of the reference front's normalized hypervolume.
#[pyfunction]
fn hv_percent(front: Vec<Point>, reference: Vec<Point>) -> PyResult<f64> {
    metrics::hv_percent(&front, &ReferenceFront::from_points(&reference)).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "trimoip")]
fn trimoip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<LbPoint>()?;
    m.add_class::<RunResult>()?;
    m.add("VARIANTS", Variant::ALL.map(|v| v.name()).to_vec())?;
    m.add_function(wrap_pyfunction!(compute_lb_set, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(exact_front, m)?)?;
    m.add_function(wrap_pyfunction!(filter_nondominated, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume, m)?)?;
    m.add_function(wrap_pyfunction!(hv_percent, m)?)?;
    Ok(())
}
