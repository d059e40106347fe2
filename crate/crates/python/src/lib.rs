//! Python bindings: states, CHSH maxima, trade-off reports and the Schmidt-form search.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use bellscope::chsh::{self, MeasurementSettings};
use bellscope::linalg::ComplexMatrix;
use bellscope::search::{self, Objective, SearchConfig};
use bellscope::states::{self, NamedState, QubitState, SchmidtParams};
use bellscope::tradeoff;
use bellscope::Error;

type Vec3 = [f64; 3];

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numeric(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for bellscope::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Normalized pure state of `n` qubits; qubit 0 is the most significant bit.
#[pyclass(name = "PureState", module = "bellscope_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyPureState(states::PureState);

#[pymethods]
impl PyPureState {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        states::PureState::new(amplitudes).py().map(Self)
    }

    #[staticmethod]
    fn normalized(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        states::PureState::normalized(amplitudes).py().map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn density(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.density())
    }

    /// Reduced state on `keep`, in the given order.
    fn reduce(&self, keep: Vec<usize>) -> PyResult<PyDensityMatrix> {
        self.0.reduce(&keep).py().map(PyDensityMatrix)
    }

    fn __repr__(&self) -> String {
        format!("PureState(n={})", self.0.n())
    }
}

/// Validated density matrix of `n` qubits.
#[pyclass(name = "DensityMatrix", module = "bellscope_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix(states::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("density matrix must be square"));
        }
        let matrix = ComplexMatrix::from_vec(d, d, rows.concat()).py()?;
        states::DensityMatrix::new(matrix).py().map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        self.0.partial_trace(&keep).py().map(Self)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(n={})", self.0.n())
    }
}

/// Either state kind, accepted wherever a multi-qubit state is expected.
#[derive(FromPyObject)]
enum AnyState {
    Pure(PyPureState),
    Mixed(PyDensityMatrix),
}

impl AnyState {
    fn inner(&self) -> &dyn QubitState {
        match self {
            Self::Pure(p) => &p.0,
            Self::Mixed(m) => &m.0,
        }
    }
}

#[pyclass(name = "ChshResult", module = "bellscope_py", frozen, get_all)]
struct PyChshResult {
    value: f64,
    tau1: f64,
    tau2: f64,
    tau_min: f64,
}

#[pymethods]
impl PyChshResult {
    fn squared(&self) -> f64 {
        self.value * self.value
    }

    fn __repr__(&self) -> String {
        format!(
            "ChshResult(value={}, tau1={}, tau2={}, tau_min={})",
            self.value, self.tau1, self.tau2, self.tau_min
        )
    }
}

impl From<chsh::ChshResult> for PyChshResult {
    fn from(r: chsh::ChshResult) -> Self {
        Self {
            value: r.value,
            tau1: r.tau1,
            tau2: r.tau2,
            tau_min: r.tau_min,
        }
    }
}

#[pyclass(name = "TradeoffReport", module = "bellscope_py", frozen, get_all)]
struct PyTradeoffReport {
    n: usize,
    /// `((i, j), value)` for every pair `i < j`.
    pairs: Vec<((usize, usize), f64)>,
    squared_sum: f64,
    bound: f64,
    satisfied: bool,
    violating_pairs: usize,
}

#[pymethods]
impl PyTradeoffReport {
    fn __repr__(&self) -> String {
        format!(
            "TradeoffReport(n={}, squared_sum={}, bound={}, satisfied={})",
            self.n,
            self.squared_sum,
            self.bound,
            if self.satisfied { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "SearchResult", module = "bellscope_py", frozen)]
struct PySearchResult {
    #[pyo3(get)]
    best_value: f64,
    /// Named with a trailing underscore because `lambda` is a Python keyword.
    #[pyo3(get)]
    lambda_: [f64; 5],
    #[pyo3(get)]
    psi: f64,
    /// Best value reached by each start.
    #[pyo3(get)]
    trace: Vec<f64>,
}

#[pymethods]
impl PySearchResult {
    fn __repr__(&self) -> String {
        format!(
            "SearchResult(best_value={}, lambda_={:?}, psi={})",
            self.best_value, self.lambda_, self.psi
        )
    }
}

impl From<search::SearchResult> for PySearchResult {
    fn from(r: search::SearchResult) -> Self {
        Self {
            best_value: r.best_value,
            lambda_: r.best_params.lambda(),
            psi: r.best_params.psi(),
            trace: r.trace,
        }
    }
}

/// `singlet`, `bell_phi_plus`, `w3`, `ghz(n)` or `basis(bits)`.
#[pyfunction]
fn named_state(name: &str) -> PyResult<PyPureState> {
    let name: NamedState = name.parse().py()?;
    states::named_state(&name).py().map(PyPureState)
}

/// Three-qubit Schmidt-form state; `lambda` must be normalized and `psi` in `[0, π]`.
#[pyfunction]
fn schmidt_state(lambda: [f64; 5], psi: f64) -> PyResult<PyPureState> {
    let params = SchmidtParams::new(lambda, psi).py()?;
    Ok(PyPureState(states::schmidt_state(&params)))
}

#[pyfunction]
fn random_pure(n: usize, seed: u64) -> PyResult<PyPureState> {
    states::random_pure(n, seed).py().map(PyPureState)
}

/// Reduction of a random pure state on `n + ancilla` qubits.
#[pyfunction]
fn random_mixed(n: usize, ancilla: usize, seed: u64) -> PyResult<PyDensityMatrix> {
    states::random_mixed(n, ancilla, seed).py().map(PyDensityMatrix)
}

#[pyfunction]
fn chsh_max(rho: &PyDensityMatrix) -> PyResult<PyChshResult> {
    chsh::chsh_max(&rho.0).py().map(Into::into)
}

/// Returns `(M, bloch_a, bloch_b)` with `M[s][t] = tr(ρ σ_s⊗σ_t)`.
#[pyfunction]
fn correlation_matrix(rho: &PyDensityMatrix) -> PyResult<([Vec3; 3], Vec3, Vec3)> {
    let c = chsh::correlation_matrix(&rho.0).py()?;
    Ok((c.m, c.bloch_a, c.bloch_b))
}

#[pyfunction]
fn evaluate_bell(rho: &PyDensityMatrix, a1: Vec3, a2: Vec3, b1: Vec3, b2: Vec3) -> PyResult<f64> {
    let settings = MeasurementSettings::new(a1, a2, b1, b2).py()?;
    chsh::evaluate_bell(&rho.0, &settings).py()
}

/// Unit vectors `(a1, a2, b1, b2)` attaining the CHSH maximum.
#[pyfunction]
fn optimal_settings(rho: &PyDensityMatrix) -> PyResult<(Vec3, Vec3, Vec3, Vec3)> {
    let s = chsh::optimal_settings(&rho.0).py()?;
    Ok((s.a1, s.a2, s.b1, s.b2))
}

#[pyfunction]
fn tradeoff_report(state: AnyState) -> PyResult<PyTradeoffReport> {
    let r = tradeoff::tradeoff_report(state.inner()).py()?;
    Ok(PyTradeoffReport {
        n: r.n,
        pairs: r.pairs.iter().map(|p| (p.pair, p.value())).collect(),
        squared_sum: r.squared_sum,
        bound: r.bound,
        satisfied: r.satisfied,
        violating_pairs: r.violating_pairs,
    })
}

#[pyfunction]
fn frobenius_identity(state: &PyPureState) -> PyResult<f64> {
    tradeoff::frobenius_identity(&state.0).py()
}

/// Sum of the squared CHSH maxima of the two pairs containing `shared`.
#[pyfunction]
fn monogamy_pair_sum(state: AnyState, shared: usize) -> PyResult<f64> {
    tradeoff::monogamy_pair_sum(state.inner(), shared).py()
}

/// Closed-form `(AB, AC, BC)` squared maxima; requires `lambda[4] == 0`.
#[pyfunction]
fn closed_form_chsh_sq(lambda: [f64; 5], psi: f64) -> PyResult<(f64, f64, f64)> {
    chsh::closed_form_chsh_sq(&SchmidtParams::new(lambda, psi).py()?).py()
}

#[pyfunction]
#[pyo3(signature = (starts = 64, seed = 0))]
fn maximize_saturation(py: Python<'_>, starts: usize, seed: u64) -> PyResult<PySearchResult> {
    let config = SearchConfig::new(Objective::Saturation, starts, seed);
    py.detach(|| search::maximize_saturation(&config)).py().map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (shared = 2, starts = 64, seed = 0))]
fn maximize_monogamy(py: Python<'_>, shared: usize, starts: usize, seed: u64) -> PyResult<PySearchResult> {
    let config = SearchConfig::new(Objective::Monogamy { shared }, starts, seed);
    py.detach(|| search::maximize_monogamy(&config)).py().map(Into::into)
}

#[pymodule]
fn bellscope_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyChshResult>()?;
    m.add_class::<PyTradeoffReport>()?;
    m.add_class::<PySearchResult>()?;
    m.add_function(wrap_pyfunction!(named_state, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_state, m)?)?;
    m.add_function(wrap_pyfunction!(random_pure, m)?)?;
    m.add_function(wrap_pyfunction!(random_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_max, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_bell, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_settings, m)?)?;
    m.add_function(wrap_pyfunction!(tradeoff_report, m)?)?;
    m.add_function(wrap_pyfunction!(frobenius_identity, m)?)?;
    m.add_function(wrap_pyfunction!(monogamy_pair_sum, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_chsh_sq, m)?)?;
    m.add_function(wrap_pyfunction!(maximize_saturation, m)?)?;
    m.add_function(wrap_pyfunction!(maximize_monogamy, m)?)?;
    Ok(())
}
