//! Python bindings for `fingen_core`.
//!
//! Rationals cross the boundary as `"p/q"` strings and divisors as literals
//! such as `"3/2*H - E"`. Results come back as plain dicts with the same
//! layout as the command-line JSON output.

use fingen_core::cli::{self, CliError, Envelope, Record};
use fingen_core::surface;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;
use serde_json::{json, Value};

create_exception!(fingen, NegativeResult, PyValueError, "A clean mathematical negative, such as a divisor that is not pseudo-effective.");
create_exception!(fingen, UsageError, PyValueError, "Malformed arguments or inputs.");
create_exception!(fingen, InvariantViolation, PyRuntimeError, "A result failed its certificate re-check.");

fn to_py_err(e: CliError) -> PyErr {
    match e {
        CliError::Negative(m) => NegativeResult::new_err(m),
        CliError::Usage(m) => UsageError::new_err(m),
        CliError::Invariant(m) => InvariantViolation::new_err(m),
    }
}

fn surface_err(e: surface::SurfaceError) -> PyErr {
    to_py_err(e.into())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

/// Runs one command, re-checks its record and returns the record as a dict.
fn run_command<'py>(
    py: Python<'py>,
    command: &str,
    model: Option<&surface::SurfaceModel>,
    input: Value,
) -> PyResult<Bound<'py, PyAny>> {
    let record: Record = cli::execute(command, model, &input).map_err(to_py_err)?;
    record.check(model).map_err(InvariantViolation::new_err)?;
    to_py(py, &record.to_value())
}

/// A surface model: Néron–Severi classes, intersection form, effective
/// generators and canonical class.
#[pyclass(name = "SurfaceModel", module = "fingen", frozen)]
struct PySurfaceModel {
    inner: surface::SurfaceModel,
}

#[pymethods]
impl PySurfaceModel {
    /// A bundled model by name, or a model file by path.
    #[new]
    fn new(name_or_path: &str) -> PyResult<Self> {
        let inner = surface::SurfaceModel::resolve(name_or_path).map_err(surface_err)?;
        Ok(PySurfaceModel { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = surface::SurfaceModel::from_json(text).map_err(surface_err)?;
        Ok(PySurfaceModel { inner })
    }

    /// Names of the bundled models.
    #[staticmethod]
    fn bundled() -> Vec<&'static str> {
        surface::BUNDLED_MODELS.iter().map(|(n, _)| *n).collect()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.class_names().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.generators().iter().map(|g| g.label.clone()).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner.to_file()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Normal form of a divisor literal.
    fn divisor(&self, literal: &str) -> PyResult<String> {
        Ok(self.inner.parse(literal).map_err(surface_err)?.to_string())
    }

    /// The intersection number `D·E` as `"p/q"`.
    fn pair(&self, d: &str, e: &str) -> PyResult<String> {
        let d = self.inner.parse(d).map_err(surface_err)?;
        let e = self.inner.parse(e).map_err(surface_err)?;
        Ok(self.inner.pair(&d, &e).map_err(surface_err)?.to_string())
    }

    fn is_nef<'py>(&self, py: Python<'py>, d: &str) -> PyResult<Bound<'py, PyAny>> {
        let d = self.inner.parse(d).map_err(surface_err)?;
        to_py(py, &self.inner.is_nef(&d).map_err(surface_err)?)
    }

    fn is_pseudoeffective<'py>(&self, py: Python<'py>, d: &str) -> PyResult<Bound<'py, PyAny>> {
        let d = self.inner.parse(d).map_err(surface_err)?;
        to_py(py, &self.inner.is_pseudoeffective(&d).map_err(surface_err)?)
    }

    /// Zariski decomposition with its certificate.
    #[pyo3(signature = (divisor, oracle = false))]
    fn zariski<'py>(&self, py: Python<'py>, divisor: &str, oracle: bool) -> PyResult<Bound<'py, PyAny>> {
        run_command(py, "zariski", Some(&self.inner), json!({"divisor": divisor, "oracle": oracle}))
    }

    /// `σ_Γ` values, or `σ′_Γ` when `prime` is set. Without `gamma` every
    /// generator is evaluated and `N_σ`, `P_σ` are assembled.
    #[pyo3(signature = (divisor, gamma = None, ample = None, prime = false))]
    fn sigma<'py>(
        &self,
        py: Python<'py>,
        divisor: &str,
        gamma: Option<&str>,
        ample: Option<&str>,
        prime: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let input = json!({"divisor": divisor, "gamma": gamma, "ample": ample, "prime": prime});
        run_command(py, "sigma", Some(&self.inner), input)
    }

    /// Replays the adjoint construction for `D = K + A + B`.
    fn adjoint_trace<'py>(&self, py: Python<'py>, a: &str, b: &str) -> PyResult<Bound<'py, PyAny>> {
        run_command(py, "adjoint-trace", Some(&self.inner), json!({"A": a, "B": b}))
    }

    fn __repr__(&self) -> String {
        format!("SurfaceModel({:?})", self.inner.name())
    }
}

/// Simultaneous Diophantine approximation of `x` at level `k`.
#[pyfunction]
#[pyo3(signature = (x, k, eps, norm = "euclidean"))]
fn dioph_approximate<'py>(
    py: Python<'py>,
    x: Vec<String>,
    k: u64,
    eps: &str,
    norm: &str,
) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "dioph", None, json!({"x": x, "k": k, "eps": eps, "norm": norm}))
}

/// Facet certificate `(ε, k, ψ_i, c_i)` of a polytope given by vertices.
#[pyfunction]
fn polytope_certificate<'py>(py: Python<'py>, vertices: Vec<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "polytope-cert", None, json!({"vertices": vertices}))
}

/// One instance of the polytope approximation criterion.
#[pyfunction]
fn criterion_verify<'py>(
    py: Python<'py>,
    vertices: Vec<Vec<String>>,
    v: Vec<String>,
    w: Vec<String>,
    l: u64,
) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "polytope-verify", None, json!({"vertices": vertices, "v": v, "w": w, "l": l}))
}

/// Hilbert basis of the cone spanned by `rays`, optionally decomposing a point.
#[pyfunction]
#[pyo3(signature = (rays, decompose = None))]
fn hilbert_basis<'py>(
    py: Python<'py>,
    rays: Vec<Vec<String>>,
    decompose: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "hilbert", None, json!({"rays": rays, "decompose": decompose}))
}

/// Width threshold of the planar split `C = C₁ ∪ C₂` at `D` with shifts `b₁`, `b₂`.
#[pyfunction]
#[pyo3(signature = (d = vec!["1".to_string(), "1".to_string()], b1 = "1/2", b2 = "1/2"))]
fn width_threshold<'py>(py: Python<'py>, d: Vec<String>, b1: &str, b2: &str) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "width", None, json!({"d": d, "b1": b1, "b2": b2}))
}

/// Zig-zag descent from `start`; `m` defaults to the width threshold.
#[pyfunction]
#[pyo3(signature = (start, m = None, d = vec!["1".to_string(), "1".to_string()], b1 = "1/2", b2 = "1/2"))]
fn zigzag_descend<'py>(
    py: Python<'py>,
    start: (i64, i64),
    m: Option<i64>,
    d: Vec<String>,
    b1: &str,
    b2: &str,
) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "zigzag", None, json!({"d": d, "b1": b1, "b2": b2, "start": start, "m": m}))
}

/// Support of the two-divisor ring on an elliptic curve.
#[pyfunction]
#[pyo3(signature = (k, num, a_degree = 0, sample_bound = None))]
fn elliptic_support<'py>(
    py: Python<'py>,
    k: u64,
    num: u64,
    a_degree: u64,
    sample_bound: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let bound = sample_bound.unwrap_or_else(|| {
        fingen_core::fingenlab::DEFAULT_SAMPLE_BOUND.max(fingen_core::fingenlab::min_sample_bound(k, num, a_degree))
    });
    let input = json!({"k": k, "num": num, "a_degree": a_degree, "sample_bound": bound});
    run_command(py, "example-cutkosky", None, input)
}

/// Section counts of the non-surjective canonical-ring restriction.
#[pyfunction]
fn canonical_example<'py>(py: Python<'py>, m: u64) -> PyResult<Bound<'py, PyAny>> {
    run_command(py, "example-canonical", None, json!({"m": m}))
}

/// Runs the property self-test and returns its report.
#[pyfunction]
#[pyo3(signature = (seed = 7, trials = 200))]
fn selftest<'py>(py: Python<'py>, seed: u64, trials: usize) -> PyResult<Bound<'py, PyAny>> {
    let opts = fingen_core::selftest::SelftestOptions { seed, trials, corrupt: None };
    to_py(py, &fingen_core::selftest::run_selftest(&opts))
}

/// Re-verifies a JSON record produced with `fingen --json`.
#[pyfunction]
fn verify(text: &str) -> PyResult<()> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| UsageError::new_err(e.to_string()))?;
    cli::verify_envelope(&env).map_err(to_py_err)
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("fingen".to_string()).chain(args);
    let out = cli::run(argv);
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn fingen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySurfaceModel>()?;
    m.add("NegativeResult", py.get_type::<NegativeResult>())?;
    m.add("UsageError", py.get_type::<UsageError>())?;
    m.add("InvariantViolation", py.get_type::<InvariantViolation>())?;
    m.add_function(wrap_pyfunction!(dioph_approximate, m)?)?;
    m.add_function(wrap_pyfunction!(polytope_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(criterion_verify, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_basis, m)?)?;
    m.add_function(wrap_pyfunction!(width_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(zigzag_descend, m)?)?;
    m.add_function(wrap_pyfunction!(elliptic_support, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_example, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
