//! Python bindings: models, worlds, lifted counting, polytopes and learning.

use std::path::PathBuf;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use lifted_mln::commands::{self, Command, RunConfig};
use lifted_mln::learner::{self, LearnError, LearnOptions, LearnStatus, Optimizer};
use lifted_mln::logic::{self as logic, ModelSpec};
use lifted_mln::numerics::Rational;
use lifted_mln::polytope::{self as polytope, FacetMode, Membership};
use lifted_mln::wfomc::LiftedModel;

create_exception!(lifted_mln, InfeasibleError, PyException, "The target statistics lie outside the marginal polytope.");
create_exception!(lifted_mln, ZeroInteriorityError, PyException, "The target statistics lie on the polytope boundary.");

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_optimizer(name: &str) -> PyResult<Optimizer> {
    match name {
        "pgd" => Ok(Optimizer::Pgd),
        "ellipsoid" => Ok(Optimizer::Ellipsoid),
        other => Err(value_error(format!("unknown optimizer `{other}`"))),
    }
}

fn parse_facets(name: &str) -> PyResult<FacetMode> {
    match name {
        "auto" => Ok(FacetMode::Auto),
        "full" => Ok(FacetMode::Full),
        "off" => Ok(FacetMode::Off),
        other => Err(value_error(format!("unknown facet mode `{other}`"))),
    }
}

fn parse_command(name: &str) -> PyResult<Command> {
    match name {
        "wfomc" => Ok(Command::Wfomc),
        "stats" => Ok(Command::Stats),
        "polytope" => Ok(Command::Polytope),
        "learn" => Ok(Command::Learn),
        "check" => Ok(Command::Check),
        other => Err(value_error(format!("unknown command `{other}`"))),
    }
}

/// A possible world over a named domain.
#[pyclass(name = "World", module = "lifted_mln", frozen)]
struct PyWorld {
    inner: logic::World,
}

#[pymethods]
impl PyWorld {
    #[getter]
    fn domain(&self) -> Vec<String> {
        self.inner.domain().to_vec()
    }

    #[getter]
    fn domain_size(&self) -> usize {
        self.inner.domain_size()
    }

    fn num_true_atoms(&self) -> usize {
        self.inner.num_true_atoms()
    }
}

/// A Markov logic network over unary and binary predicates.
#[pyclass(name = "Model", module = "lifted_mln", frozen)]
struct PyModel {
    inner: ModelSpec,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyModel { inner: logic::parse_model(text).map_err(value_error)? })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(value_error)?;
        Self::new(&text)
    }

    #[getter]
    fn formulas(&self) -> Vec<String> {
        self.inner.soft.iter().map(|s| s.formula.display(&self.inner.vocabulary).to_string()).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights()
    }

    fn parse_database(&self, text: &str) -> PyResult<PyWorld> {
        Ok(PyWorld { inner: logic::parse_database(text, &self.inner.vocabulary).map_err(value_error)? })
    }

    /// Formula statistics of a world as exact fractions.
    fn statistics(&self, world: &PyWorld) -> PyResult<Vec<Rational>> {
        Ok(logic::stat_vector(&self.inner, &world.inner).map_err(value_error)?.0)
    }

    /// `log Σ_ω exp⟨λ, Q_ω⟩` over a domain of size `n`.
    fn log_z(&self, py: Python<'_>, n: usize, lam: Vec<f64>) -> PyResult<f64> {
        self.check_len(&lam)?;
        let lifted = LiftedModel::new(&self.inner, n).map_err(value_error)?;
        Ok(py.detach(|| lifted.log_z(&lam).ln()))
    }

    fn expectations(&self, py: Python<'_>, n: usize, lam: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_len(&lam)?;
        let lifted = LiftedModel::new(&self.inner, n).map_err(value_error)?;
        py.detach(|| lifted.expectations(&lam)).map_err(value_error)
    }

    /// Exact number of worlds satisfying the hard sentences.
    fn world_count(&self, n: usize) -> PyResult<BigInt> {
        Ok(LiftedModel::new(&self.inner, n).map_err(value_error)?.exact_world_count())
    }

    #[pyo3(signature = (n, facets = "auto"))]
    fn polytope(&self, n: usize, facets: &str) -> PyResult<PyPolytope> {
        let inner = polytope::Polytope::build(&self.inner, n, parse_facets(facets)?).map_err(value_error)?;
        Ok(PyPolytope { inner })
    }

    #[pyo3(signature = (n, theta, epsilon = 1e-3, optimizer = "pgd", eta = None, facets = "auto", max_iterations = 20_000))]
    #[allow(clippy::too_many_arguments)]
    fn learn(
        &self,
        py: Python<'_>,
        n: usize,
        theta: Vec<Rational>,
        epsilon: f64,
        optimizer: &str,
        eta: Option<f64>,
        facets: &str,
        max_iterations: usize,
    ) -> PyResult<PyLearnReport> {
        let options = LearnOptions {
            epsilon,
            eta,
            optimizer: parse_optimizer(optimizer)?,
            facets: parse_facets(facets)?,
            max_iterations,
        };
        let result = py.detach(|| learner::learn(&self.inner, n, &theta, &options));
        match result {
            Ok(inner) => Ok(PyLearnReport { inner }),
            Err(e @ LearnError::Infeasible { .. }) => Err(InfeasibleError::new_err(e.to_string())),
            Err(e @ LearnError::ZeroInteriority { .. }) => Err(ZeroInteriorityError::new_err(e.to_string())),
            Err(e) => Err(value_error(e)),
        }
    }

    fn __repr__(&self) -> String {
        format!("Model({} soft, {} hard)", self.inner.soft.len(), self.inner.hard.len())
    }
}

impl PyModel {
    fn check_len(&self, lam: &[f64]) -> PyResult<()> {
        if lam.len() != self.inner.num_soft() {
            return Err(value_error(format!("expected {} weights, got {}", self.inner.num_soft(), lam.len())));
        }
        Ok(())
    }
}

/// The relational marginal polytope of a model at a fixed domain size.
#[pyclass(name = "Polytope", module = "lifted_mln", frozen)]
struct PyPolytope {
    inner: polytope::Polytope,
}

#[pymethods]
impl PyPolytope {
    #[getter]
    fn points(&self) -> Vec<Vec<Rational>> {
        self.inner.points.iter().map(|p| p.0.clone()).collect()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<Rational>> {
        self.inner.vertices.iter().map(|p| p.0.clone()).collect()
    }

    #[getter]
    fn a_eq(&self) -> Vec<Vec<Rational>> {
        self.inner.a_eq().clone()
    }

    #[getter]
    fn c_eq(&self) -> Vec<Rational> {
        self.inner.c_eq().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `"inside"`, `"boundary"` or `"outside"`.
    fn membership(&self, theta: Vec<Rational>) -> &'static str {
        match self.inner.membership(&theta) {
            Membership::Inside { .. } => "inside",
            Membership::Boundary { .. } => "boundary",
            Membership::Outside { .. } => "outside",
        }
    }

    /// Exact interiority, or `None` when facets were not computed.
    fn interiority(&self, theta: Vec<Rational>) -> Option<f64> {
        self.inner.interiority(&theta).map(|i| i.eta)
    }
}

#[pyclass(name = "LearnReport", module = "lifted_mln", frozen)]
struct PyLearnReport {
    inner: learner::LearnReport,
}

#[pymethods]
impl PyLearnReport {
    #[getter]
    fn lam(&self) -> Vec<f64> {
        self.inner.lambda.clone()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    #[getter]
    fn dual_value(&self) -> f64 {
        self.inner.value
    }

    #[getter]
    fn expectations(&self) -> Vec<f64> {
        self.inner.expectations.clone()
    }

    #[getter]
    fn moment_gap(&self) -> f64 {
        self.inner.moment_gap
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn oracle_calls(&self) -> usize {
        self.inner.oracle_calls
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.status == LearnStatus::Converged
    }

    fn __repr__(&self) -> String {
        format!("LearnReport(weights={:?}, moment_gap={:.3e})", self.inner.weights, self.inner.moment_gap)
    }
}

/// Runs a command as the command-line tool would and returns
/// `(report_json, summary, exit_code)`.
#[pyfunction]
#[pyo3(signature = (command, model, db = None, n = None, theta = None, epsilon = 1e-3, optimizer = "pgd", seed = 0))]
#[allow(clippy::too_many_arguments)]
fn run_command(
    py: Python<'_>,
    command: &str,
    model: PathBuf,
    db: Option<PathBuf>,
    n: Option<usize>,
    theta: Option<Vec<Rational>>,
    epsilon: f64,
    optimizer: &str,
    seed: u64,
) -> PyResult<(String, String, i32)> {
    let mut config = RunConfig::new(parse_command(command)?, model);
    config.database = db;
    config.domain_size = n;
    config.theta = theta;
    config.epsilon = epsilon;
    config.optimizer = parse_optimizer(optimizer)?;
    config.seed = seed;
    match py.detach(|| commands::execute(&config)) {
        Ok(out) => Ok((out.report_text(), out.summary, out.status.code())),
        Err(e) => Err(value_error(e)),
    }
}

#[pymodule]
#[pyo3(name = "lifted_mln")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyWorld>()?;
    m.add_class::<PyPolytope>()?;
    m.add_class::<PyLearnReport>()?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("ZeroInteriorityError", m.py().get_type::<ZeroInteriorityError>())?;
    Ok(())
}
