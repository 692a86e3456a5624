//! Python bindings: grids, sampled fields, the main transforms and
//! operators, and the verification suites.

use heisenphase::{calculus, fsb, grid, reps, transforms, twosided, GroupElement, C64};
use heisenphase_cli::config::{parse_suites, ScenarioConfig, Tier};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: heisenphase::Error) -> PyErr {
    use heisenphase::Error as E;
    match e {
        E::Io(e) => PyOSError::new_err(e.to_string()),
        E::Precondition { .. } | E::SizeCap(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn cli_err(e: heisenphase_cli::CliError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Params", from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(heisenphase::Params);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (hbar = 1.0, tau = 1.0, sigma = 1.0, upsilon = 1.0))]
    fn new(hbar: f64, tau: f64, sigma: f64, upsilon: f64) -> PyResult<Self> {
        heisenphase::Params::new(hbar, tau, sigma, upsilon).map(PyParams).map_err(err)
    }
    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar
    }
    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma
    }
    #[getter]
    fn upsilon(&self) -> f64 {
        self.0.upsilon
    }
    fn __repr__(&self) -> String {
        let p = self.0;
        format!("Params(hbar={}, tau={}, sigma={}, upsilon={})", p.hbar, p.tau, p.sigma, p.upsilon)
    }
}

/// Uniform grid on `[-extent, extent)^dim`.
#[pyclass(name = "Grid", from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(heisenphase::GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, extent: f64, points: usize) -> PyResult<Self> {
        heisenphase::GridSpec::new(dim, extent, points).map(PyGrid).map_err(err)
    }
    /// The grid with `2 extent² |hbar| = points`.
    #[staticmethod]
    #[pyo3(signature = (dim, points, hbar = 1.0))]
    fn self_dual(dim: usize, points: usize, hbar: f64) -> PyResult<Self> {
        heisenphase::GridSpec::self_dual(dim, points, hbar).map(PyGrid).map_err(err)
    }
    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }
    #[getter]
    fn extent(&self) -> f64 {
        self.0.extent
    }
    #[getter]
    fn points(&self) -> usize {
        self.0.points
    }
    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }
    fn coords(&self) -> Vec<f64> {
        self.0.coords()
    }
    /// Configuration grid for Fourier–Wigner transforms on this phase grid.
    fn wigner_config(&self) -> PyResult<Self> {
        self.0.wigner_config().map(PyGrid).map_err(err)
    }
    fn wigner_phase(&self) -> PyResult<Self> {
        self.0.wigner_phase().map(PyGrid).map_err(err)
    }
    fn __len__(&self) -> usize {
        self.0.len()
    }
    fn __repr__(&self) -> String {
        format!("Grid(dim={}, extent={}, points={})", self.0.dim, self.0.extent, self.0.points)
    }
}

/// Complex samples on a grid, row-major.
#[pyclass(name = "Field", from_py_object)]
#[derive(Clone)]
struct PyField(heisenphase::Field);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: PyGrid, values: Vec<C64>) -> PyResult<Self> {
        heisenphase::Field::from_values(grid.0, values).map(PyField).map_err(err)
    }
    #[staticmethod]
    fn zeros(grid: PyGrid) -> Self {
        PyField(heisenphase::Field::zeros(grid.0))
    }
    #[staticmethod]
    fn read_csv(path: &str) -> PyResult<Self> {
        grid::io::read_csv(path.as_ref()).map(PyField).map_err(err)
    }
    fn write_csv(&self, path: &str) -> PyResult<()> {
        grid::io::write_csv(&self.0, path.as_ref()).map_err(err)
    }
    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.spec)
    }
    #[getter]
    fn values(&self) -> Vec<C64> {
        self.0.values.clone()
    }
    fn norm(&self) -> f64 {
        self.0.norm()
    }
    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
    /// `⟨self, other⟩ = Δ^d Σ self·conj(other)`.
    fn inner(&self, other: &PyField) -> PyResult<C64> {
        grid::inner_product(&self.0, &other.0).map_err(err)
    }
    fn rel_dist(&self, other: &PyField) -> PyResult<f64> {
        self.0.rel_dist(&other.0).map_err(err)
    }
    fn max_dist(&self, other: &PyField) -> PyResult<f64> {
        self.0.max_dist(&other.0).map_err(err)
    }
    fn __add__(&self, other: &PyField) -> PyResult<Self> {
        self.0.add(&other.0).map(PyField).map_err(err)
    }
    fn __sub__(&self, other: &PyField) -> PyResult<Self> {
        self.0.sub(&other.0).map(PyField).map_err(err)
    }
    fn __mul__(&self, c: C64) -> Self {
        PyField(self.0.scale(c))
    }
    fn __rmul__(&self, c: C64) -> Self {
        PyField(self.0.scale(c))
    }
    fn __len__(&self) -> usize {
        self.0.len()
    }
    fn __repr__(&self) -> String {
        format!("Field(dim={}, points={}, norm={:.6e})", self.0.spec.dim, self.0.spec.points, self.0.norm())
    }
}

fn rep_tag(tag: &str) -> PyResult<reps::RepTag> {
    use reps::RepTag::*;
    Ok(match tag {
        "schrodinger" | "rho" => Schrodinger,
        "left" | "lambda" => LeftPulled,
        "right" | "R" => RightPulled,
        "xi_tilde" => XiTilde,
        "xi" => Xi,
        other => return Err(PyValueError::new_err(format!("unknown representation `{other}`"))),
    })
}

/// Acts by `tag(s, x, y)`; `tag` is one of schrodinger, left, right,
/// xi_tilde, xi.
#[pyfunction]
fn act(tag: &str, s: f64, x: Vec<f64>, y: Vec<f64>, f: &PyField, params: PyParams) -> PyResult<PyField> {
    let g = GroupElement::new(s, x, y).map_err(err)?;
    reps::act(rep_tag(tag)?, &g, &f.0, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn gaussian_vacuum(tau: f64, params: PyParams, grid: PyGrid) -> PyResult<PyField> {
    fsb::gaussian_vacuum(tau, &params.0, &grid.0).map(PyField).map_err(err)
}

#[pyfunction]
fn hermite_vector(m: usize, tau: f64, params: PyParams, grid: PyGrid) -> PyResult<PyField> {
    fsb::hermite_vector(m, tau, &params.0, &grid.0).map(PyField).map_err(err)
}

#[pyfunction]
fn fsb_gaussian(tau: f64, params: PyParams, grid: PyGrid) -> PyResult<PyField> {
    fsb::fsb_gaussian(tau, &params.0, &grid.0).map(PyField).map_err(err)
}

#[pyfunction]
fn mixed_gaussian(tau: f64, sigma: f64, params: PyParams, grid: PyGrid) -> PyResult<PyField> {
    fsb::mixed_gaussian(tau, sigma, &params.0, &grid.0).map(PyField).map_err(err)
}

fn window(w: &PyField) -> PyResult<transforms::Window> {
    transforms::Window::new(w.0.clone()).map_err(err)
}

/// `W(f, φ)` on the phase grid paired with `f`'s grid.
#[pyfunction]
fn fourier_wigner(f: &PyField, phi: &PyField, params: PyParams) -> PyResult<PyField> {
    transforms::fourier_wigner(&f.0, &window(phi)?, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn covariant(f: &PyField, theta: &PyField, params: PyParams) -> PyResult<PyField> {
    transforms::covariant(&f.0, &window(theta)?, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn contravariant(big_f: &PyField, psi: &PyField, params: PyParams) -> PyResult<PyField> {
    transforms::contravariant(&big_f.0, &window(psi)?, &params.0).map(PyField).map_err(err)
}

/// Peeled FSB transform; returns the field and the indices zeroed by the
/// overflow guard.
#[pyfunction]
fn fsb_transform(f: &PyField, tau: f64, params: PyParams) -> PyResult<(PyField, Vec<usize>)> {
    let p = transforms::fsb_transform(&f.0, tau, &params.0).map_err(err)?;
    Ok((PyField(p.field), p.flagged))
}

#[pyfunction]
fn symplectic_fourier(f: &PyField, params: PyParams) -> PyResult<PyField> {
    transforms::symplectic_fourier(&f.0, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn fsb_project(big_f: &PyField, tau: f64, params: PyParams) -> PyResult<PyField> {
    fsb::fsb_project(&big_f.0, tau, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn membership_residual(big_f: &PyField, tau: f64, params: PyParams) -> PyResult<f64> {
    fsb::membership_residual(&big_f.0, tau, &params.0).map_err(err)
}

#[pyfunction]
fn twisted_convolution(k1: &PyField, k2: &PyField, params: PyParams) -> PyResult<PyField> {
    calculus::twisted_convolution(&k1.0, &k2.0, &params.0).map(PyField).map_err(err)
}

/// `T_ψ F = P_ς(ψF)` for `F ∈ F_τ`.
#[pyfunction]
fn cross_toeplitz_apply(psi: &PyField, big_f: &PyField, tau: f64, sigma: f64, params: PyParams) -> PyResult<PyField> {
    calculus::cross_toeplitz_apply(&psi.0, &big_f.0, tau, sigma, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn guillemin_symbol(psi: &PyField, tau: f64, sigma: f64, params: PyParams) -> PyResult<PyField> {
    calculus::guillemin_symbol(&psi.0, tau, sigma, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn pdo_apply(a: &PyField, f: &PyField, params: PyParams) -> PyResult<PyField> {
    calculus::pdo_apply(&a.0, &f.0, &params.0).map(PyField).map_err(err)
}

#[pyfunction]
fn moyal_compose(a1: &PyField, a2: &PyField, order: usize, params: PyParams) -> PyResult<PyField> {
    calculus::moyal_compose(&a1.0, &a2.0, order, &params.0).map(PyField).map_err(err)
}

/// Doubled symbol `a#` on `R^4`, axes `(x1, x2, y1, y2)`.
#[pyfunction]
fn cross_toeplitz_pdo_symbol(psi: &PyField, tau: f64, sigma: f64, params: PyParams) -> PyResult<PyField> {
    twosided::cross_toeplitz_pdo_symbol(&psi.0, tau, sigma, &params.0).map(|s| PyField(s.values)).map_err(err)
}

/// `{"delta_q", "delta_p", "product", "bound"}` for a state on `R`.
#[pyfunction]
fn uncertainty<'py>(py: Python<'py>, f: &PyField, params: PyParams) -> PyResult<Bound<'py, PyDict>> {
    let u = fsb::uncertainty(&f.0, &params.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("delta_q", u.delta_q)?;
    d.set_item("delta_p", u.delta_p)?;
    d.set_item("product", u.product())?;
    d.set_item("bound", u.bound)?;
    Ok(d)
}

/// Runs verification suites (all by default) and returns one dict per check.
#[pyfunction]
#[pyo3(signature = (suites = None, tol = "default", seed = 42))]
fn verify<'py>(py: Python<'py>, suites: Option<&str>, tol: &str, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = ScenarioConfig { seed, ..ScenarioConfig::default() };
    cfg.tolerance_tier = tol.parse::<Tier>().map_err(PyValueError::new_err)?;
    if let Some(s) = suites {
        cfg.suites = parse_suites(s).map_err(PyValueError::new_err)?;
    }
    let report = py.detach(|| heisenphase_cli::run_verify(&cfg)).map_err(cli_err)?;
    report
        .checks()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("suite", c.suite.name())?;
            d.set_item("check", &c.check)?;
            d.set_item("residual", c.residual)?;
            d.set_item("tolerance", c.tolerance)?;
            d.set_item("pass", c.pass)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn heisenphase_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(act, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_vacuum, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_vector, m)?)?;
    m.add_function(wrap_pyfunction!(fsb_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(covariant, m)?)?;
    m.add_function(wrap_pyfunction!(contravariant, m)?)?;
    m.add_function(wrap_pyfunction!(fsb_transform, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(fsb_project, m)?)?;
    m.add_function(wrap_pyfunction!(membership_residual, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_convolution, m)?)?;
    m.add_function(wrap_pyfunction!(cross_toeplitz_apply, m)?)?;
    m.add_function(wrap_pyfunction!(guillemin_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(pdo_apply, m)?)?;
    m.add_function(wrap_pyfunction!(moyal_compose, m)?)?;
    m.add_function(wrap_pyfunction!(cross_toeplitz_pdo_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
