//! Python bindings: `import sqg`.
//!
//! Reports come back as plain dicts (via JSON), fields as `sqg.Field`
//! objects holding spectral coefficients.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqg_core::decay::{decay_experiment as run_decay, DecayOptions};
use sqg_core::lab::{self, EnsembleSpec, LemmaId, LemmaParams};
use sqg_core::solver::{energy_ledger, smallness_gate as gate};
use sqg_core::{FieldGenerator, FrequencyLattice, SolverConfig, SpectralField, SqgError};

create_exception!(sqg, InstabilityError, PyRuntimeError, "The time integration stopped early.");
create_exception!(sqg, GateError, PyRuntimeError, "The data failed the smallness gate.");

fn err(e: SqgError) -> PyErr {
    match e {
        SqgError::Instability { .. } => InstabilityError::new_err(e.to_string()),
        SqgError::GateFailed { .. } => GateError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Lattice", module = "sqg", skip_from_py_object)]
#[derive(Clone)]
struct PyLattice {
    inner: Arc<FrequencyLattice>,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (n, box_len = TAU))]
    fn new(n: usize, box_len: f64) -> PyResult<Self> {
        Ok(PyLattice { inner: sqg_core::make_lattice(n, box_len).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn box_len(&self) -> f64 {
        self.inner.box_len()
    }

    #[getter]
    fn k_min(&self) -> f64 {
        self.inner.k_min()
    }

    #[getter]
    fn k_max(&self) -> f64 {
        self.inner.k_max()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    /// Whether mode `(j1, j2)` survives dealiasing.
    fn kept(&self, j1: i64, j2: i64) -> bool {
        self.inner.dealias_mask()[self.inner.index_of(j1, j2)]
    }

    fn __repr__(&self) -> String {
        format!("Lattice(n={}, box_len={})", self.inner.n(), self.inner.box_len())
    }
}

#[pyclass(name = "Field", module = "sqg", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: SpectralField,
}

fn wrap(inner: SpectralField) -> PyField {
    PyField { inner }
}

#[pymethods]
impl PyField {
    #[staticmethod]
    fn zeros(lattice: &PyLattice) -> Self {
        wrap(SpectralField::zeros(&lattice.inner))
    }

    /// From `n²` physical samples in row-major order over `(x₁, x₂)`. The
    /// mean is removed.
    #[staticmethod]
    fn from_samples(lattice: &PyLattice, samples: Vec<f64>) -> PyResult<Self> {
        Ok(wrap(SpectralField::forward_transform(&lattice.inner, &samples).map_err(err)?))
    }

    /// `amplitude · cos(j₁x₁ + j₂x₂)` (in units of the fundamental wavenumber).
    #[staticmethod]
    #[pyo3(signature = (lattice, j1, j2, amplitude = 1.0))]
    fn single_mode(lattice: &PyLattice, j1: i64, j2: i64, amplitude: f64) -> Self {
        let g = FieldGenerator::SingleMode { j1, j2, amplitude };
        wrap(g.generate(&lattice.inner, &mut ChaCha8Rng::seed_from_u64(0)))
    }

    /// Random field: `kind` is `"grf"` (power-law spectrum with `slope`) or
    /// `"dyadic"` (shell amplitudes decaying like `2^{-slope·q}`).
    #[staticmethod]
    #[pyo3(signature = (lattice, slope = 3.0, seed = 0, kind = "grf"))]
    fn random(lattice: &PyLattice, slope: f64, seed: u64, kind: &str) -> PyResult<Self> {
        let g = match kind {
            "grf" => FieldGenerator::GaussianRandomField { slope },
            "dyadic" => FieldGenerator::DyadicBumps { decay: slope },
            other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
        };
        Ok(wrap(g.generate(&lattice.inner, &mut ChaCha8Rng::seed_from_u64(seed))))
    }

    #[getter]
    fn lattice(&self) -> PyLattice {
        PyLattice { inner: self.inner.lattice().clone() }
    }

    /// Physical values, row-major, length `n²`.
    fn samples(&self) -> Vec<f64> {
        self.inner.inverse_transform()
    }

    /// Raw (unnormalized) coefficient of mode `(j1, j2)`.
    fn coeff(&self, j1: i64, j2: i64) -> Complex64 {
        self.inner.coeff(j1, j2)
    }

    fn l2_norm(&self) -> f64 {
        sqg_core::l2_norm(&self.inner)
    }

    fn hom_norm(&self, s: f64) -> f64 {
        sqg_core::hom_norm(&self.inner, s)
    }

    fn inhom_norm(&self, s: f64) -> PyResult<f64> {
        sqg_core::inhom_norm(&self.inner, s).map_err(err)
    }

    #[pyo3(signature = (other, s, homogeneous = true))]
    fn scalar_product(&self, other: &PyField, s: f64, homogeneous: bool) -> PyResult<f64> {
        sqg_core::scalar_product(&self.inner, &other.inner, s, homogeneous).map_err(err)
    }

    fn scaled(&self, a: f64) -> Self {
        wrap(self.inner.scaled(a))
    }

    fn fractional_power(&self, s: f64) -> Self {
        wrap(sqg_core::fractional_power(&self.inner, s))
    }

    fn low_pass(&self, delta: f64) -> Self {
        wrap(sqg_core::low_pass(&self.inner, delta))
    }

    fn high_pass(&self, delta: f64) -> Self {
        wrap(sqg_core::high_pass(&self.inner, delta))
    }

    /// Velocity components `(u₁, u₂)`.
    fn riesz(&self) -> (Self, Self) {
        let u = sqg_core::riesz_velocity(&self.inner);
        (wrap(u.u1), wrap(u.u2))
    }

    fn rescale(&self, lam: f64, alpha: f64) -> PyResult<Self> {
        Ok(wrap(sqg_core::rescale_field(&self.inner, lam, alpha).map_err(err)?))
    }

    fn dealiased_product(&self, other: &PyField) -> PyResult<Self> {
        Ok(wrap(sqg_core::dealiased_product(&self.inner, &other.inner).map_err(err)?))
    }

    fn nonlinear_term(&self) -> Self {
        wrap(sqg_core::solver::nonlinear_term(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Field(n={}, l2={:.6e})", self.inner.lattice().n(), sqg_core::l2_norm(&self.inner))
    }
}

#[allow(clippy::too_many_arguments)]
fn solver_config(
    field: &PyField,
    alpha: f64,
    dt: f64,
    t_end: f64,
    eps0: Option<f64>,
    output_every: usize,
    nonlinear: bool,
    snapshot_every: usize,
) -> PyResult<SolverConfig> {
    let lat = field.inner.lattice();
    let eps0 = match eps0 {
        Some(e) => e,
        None => lab::default_eps0(alpha, 0).map_err(err)?,
    };
    let mut cfg = SolverConfig::new(alpha, dt, t_end, lat.n(), lat.box_len(), eps0);
    cfg.output_every = output_every;
    cfg.nonlinear = nonlinear;
    cfg.snapshot_every = snapshot_every;
    Ok(cfg)
}

/// Integrates from `field`; returns `{"series": [...], "ledger": {...},
/// "steps": int, "gate": {...}, "snapshots": [(t, Field), ...]}`.
#[pyfunction]
#[pyo3(signature = (field, alpha, dt, t_end, eps0 = None, output_every = 1, nonlinear = true, snapshot_every = 0))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    field: &PyField,
    alpha: f64,
    dt: f64,
    t_end: f64,
    eps0: Option<f64>,
    output_every: usize,
    nonlinear: bool,
    snapshot_every: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = solver_config(field, alpha, dt, t_end, eps0, output_every, nonlinear, snapshot_every)?;
    let decision = gate(&field.inner, &cfg).map_err(err)?;
    let traj = py.detach(|| sqg_core::simulate(&field.inner, &cfg)).map_err(err)?;
    let ledger = energy_ledger(&traj, 1e-4, 1e-3);
    let out = to_py(
        py,
        &serde_json::json!({
            "series": traj.series.samples,
            "ledger": ledger,
            "steps": traj.steps,
            "gate": decision,
            "max_pairing_ratio": traj.max_pairing_ratio,
        }),
    )?;
    let snaps: Vec<(f64, PyField)> = traj.snapshots.into_iter().map(|s| (s.t, wrap(s.field))).collect();
    out.set_item("snapshots", snaps)?;
    Ok(out)
}

#[pyfunction]
fn smallness_gate<'py>(py: Python<'py>, field: &PyField, alpha: f64, eps0: f64) -> PyResult<Bound<'py, PyAny>> {
    let lat = field.inner.lattice();
    let cfg = SolverConfig::new(alpha, 1.0, 1.0, lat.n(), lat.box_len(), eps0);
    to_py(py, &gate(&field.inner, &cfg).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (alpha, seed = 0))]
fn default_eps0(py: Python<'_>, alpha: f64, seed: u64) -> PyResult<f64> {
    py.detach(|| lab::default_eps0(alpha, seed)).map_err(err)
}

/// Ensemble estimate for one lemma id (full id or numeric prefix).
#[pyfunction]
#[pyo3(signature = (lemma, samples = 200, n = 64, alpha = 0.25, seed = 0))]
fn estimate_constant<'py>(
    py: Python<'py>,
    lemma: &str,
    samples: usize,
    n: usize,
    alpha: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let id: LemmaId = lemma.parse().map_err(err)?;
    let lat = sqg_core::make_lattice(n, TAU).map_err(err)?;
    let params = LemmaParams::for_alpha(alpha);
    let spec = EnsembleSpec::default_for(id, &params, &lat, samples, seed);
    let report = py.detach(|| lab::estimate_constant(&spec, id, &params)).map_err(err)?;
    to_py(py, &report)
}

/// `(lhs, rhs_two_term, rhs_one_term or None)`.
#[pyfunction]
fn check_product_law(f: &PyField, g: &PyField, s1: f64, s2: f64) -> PyResult<(f64, f64, Option<f64>)> {
    let c = lab::check_product_law(&f.inner, &g.inner, s1, s2).map_err(err)?;
    Ok((c.lhs, c.rhs_two_term, c.rhs_one_term))
}

/// `(lhs, rhs_without_constant)`.
#[pyfunction]
fn check_trilinear(theta: &PyField, sigma: f64, alpha: f64) -> PyResult<(f64, f64)> {
    let c = lab::check_trilinear(&theta.inner, sigma, alpha).map_err(err)?;
    Ok((c.lhs, c.rhs_without_c))
}

/// `(lhs, rhs_mixed, rhs_top)`.
#[pyfunction]
fn check_bilinear(omega: &PyField, theta: &PyField, alpha: f64) -> PyResult<(f64, f64, f64)> {
    let c = lab::check_bilinear(&omega.inner, &theta.inner, alpha).map_err(err)?;
    Ok((c.lhs, c.rhs_mixed, c.rhs_top))
}

#[pyfunction]
fn check_elementary(a: f64, c: f64, sigma: f64) -> PyResult<(f64, f64)> {
    lab::check_elementary(a, c, sigma).map_err(err)
}

#[pyfunction]
fn check_exp_kernel(h: Vec<f64>, horizon: f64, sigma: f64) -> PyResult<(f64, f64)> {
    lab::check_exp_kernel(&h, horizon, sigma).map_err(err)
}

/// Full decay pipeline; returns the report dict. Raises `GateError` on large
/// data unless `force`.
#[pyfunction]
#[pyo3(signature = (field, alpha, dt, t_end, eps0 = None, force = false, c_split = None, c_cauchy = None))]
#[allow(clippy::too_many_arguments)]
fn decay_experiment<'py>(
    py: Python<'py>,
    field: &PyField,
    alpha: f64,
    dt: f64,
    t_end: f64,
    eps0: Option<f64>,
    force: bool,
    c_split: Option<f64>,
    c_cauchy: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = solver_config(field, alpha, dt, t_end, eps0, 1, true, 0)?;
    let opts = DecayOptions { force, c_split, c_cauchy, ..Default::default() };
    let out = py.detach(|| run_decay(&cfg, &field.inner, &opts)).map_err(err)?;
    to_py(py, &out.report)
}

#[pymodule]
fn sqg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyField>()?;
    m.add("InstabilityError", m.py().get_type::<InstabilityError>())?;
    m.add("GateError", m.py().get_type::<GateError>())?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(smallness_gate, m)?)?;
    m.add_function(wrap_pyfunction!(default_eps0, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_constant, m)?)?;
    m.add_function(wrap_pyfunction!(check_product_law, m)?)?;
    m.add_function(wrap_pyfunction!(check_trilinear, m)?)?;
    m.add_function(wrap_pyfunction!(check_bilinear, m)?)?;
    m.add_function(wrap_pyfunction!(check_elementary, m)?)?;
    m.add_function(wrap_pyfunction!(check_exp_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(decay_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
