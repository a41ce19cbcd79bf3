//! Python bindings.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::halfspace_berry::berry::{self, PhaseConvention};
use ::halfspace_berry::dynamics::{self, DriveParams, Environment, InitialState, Solver};
use ::halfspace_berry::error::Error;
use ::halfspace_berry::permittivity;
use ::halfspace_berry::quadrature::PvSettings;
use ::halfspace_berry::surface::{self, DipoleOrientation, MarkovKernel};
use ::halfspace_berry::sweep::{self, OutputFormat};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Singular(_) => PyValueError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "LorentzMedium", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyMedium(permittivity::LorentzMedium);

#[pymethods]
impl PyMedium {
    #[new]
    fn new(omega_p: f64, gamma: f64) -> PyResult<Self> {
        permittivity::LorentzMedium::new(omega_p, gamma).map(Self).map_err(py_err)
    }

    #[getter]
    fn omega_p(&self) -> f64 {
        self.0.omega_p()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    fn permittivity(&self, omega: f64) -> PyResult<Complex64> {
        self.0.permittivity(omega).map(|e| e.to_complex()).map_err(py_err)
    }

    fn band_edges(&self) -> (f64, f64) {
        self.0.band_edges()
    }

    fn in_band_gap(&self, omega: f64) -> bool {
        self.0.in_band_gap(omega)
    }

    fn surface_resonance(&self) -> f64 {
        self.0.surface_resonance()
    }

    fn kramers_kronig_residual(&self, omega: f64) -> PyResult<f64> {
        self.0
            .kramers_kronig_residual(omega, &PvSettings::default())
            .map(|r| r.residual)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("LorentzMedium(omega_p={}, gamma={})", self.0.omega_p(), self.0.gamma())
    }
}

#[pyclass(name = "AtomSurfaceConfig", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyAtom(surface::AtomSurfaceConfig);

#[pymethods]
impl PyAtom {
    #[new]
    #[pyo3(signature = (omega0, z_a, medium, dz_over_d_sq = 0.0, omega0_over_gamma0 = 50.0, total_rate = false))]
    fn new(
        omega0: f64,
        z_a: f64,
        medium: PyMedium,
        dz_over_d_sq: f64,
        omega0_over_gamma0: f64,
        total_rate: bool,
    ) -> PyResult<Self> {
        let cfg = surface::AtomSurfaceConfig {
            omega0,
            z_a,
            orientation: DipoleOrientation::new(dz_over_d_sq).map_err(py_err)?,
            medium: medium.0,
            omega0_over_gamma0,
            total_rate,
        };
        cfg.validate().map_err(py_err)?;
        Ok(Self(cfg))
    }

    fn decay_rate(&self) -> PyResult<f64> {
        surface::decay_rate_halfspace(&self.0).map_err(py_err)
    }

    fn line_shift(&self) -> PyResult<f64> {
        surface::line_shift_halfspace(&self.0).map_err(py_err)
    }

    /// (value, resonant part, counter-rotating part, error estimate).
    fn line_shift_pv(&self) -> PyResult<(f64, f64, f64, f64)> {
        let l = surface::line_shift_pv(&self.0, &PvSettings::default()).map_err(py_err)?;
        Ok((l.value, l.resonant, l.counter_rotating, l.error))
    }

    /// (ϖ, δω₀) of the Markov kernel −ϖ + iδω₀.
    fn markov_kernel(&self) -> PyResult<(f64, f64)> {
        let k = surface::markov_kernel(&self.0).map_err(py_err)?;
        Ok((k.varpi, k.shift))
    }

    fn short_distance_violated(&self) -> bool {
        self.0.short_distance_violated()
    }
}

fn environment(varpi: Option<f64>, shift: f64) -> Environment {
    match varpi {
        None => Environment::FreeSpace { gamma0: 1.0 },
        Some(varpi) => Environment::HalfSpace(MarkovKernel { varpi, shift }),
    }
}

fn solver(name: &str, memory_width: f64) -> PyResult<Solver> {
    match name {
        "closed" => Ok(Solver::Closed),
        "oracle" => Ok(Solver::Oracle),
        "volterra" => Ok(Solver::Volterra { memory_width }),
        other => Err(PyValueError::new_err(format!("unknown solver `{other}`"))),
    }
}

/// Characteristic roots (r1, r2, degenerate) for free-space damping Γ₀.
#[pyfunction]
#[pyo3(signature = (gamma0, rabi, detuning = 0.0, phase = 0.0))]
fn roots_free(gamma0: f64, rabi: f64, detuning: f64, phase: f64) -> PyResult<(Complex64, Complex64, bool)> {
    let drive = DriveParams::new(rabi, detuning, phase).map_err(py_err)?;
    let r = dynamics::roots_free(gamma0, &drive);
    Ok((r.r1, r.r2, r.degenerate))
}

/// Amplitudes [(t, C1, C2)]; free space unless `varpi` is given.
#[pyfunction]
#[pyo3(signature = (times, c1, c2, rabi, detuning = 0.0, phase = 0.0, varpi = None, shift = 0.0, solver = "closed", memory_width = 1e4))]
#[allow(clippy::too_many_arguments)]
fn evolve(
    times: Vec<f64>,
    c1: Complex64,
    c2: Complex64,
    rabi: f64,
    detuning: f64,
    phase: f64,
    varpi: Option<f64>,
    shift: f64,
    solver: &str,
    memory_width: f64,
) -> PyResult<Vec<(f64, Complex64, Complex64)>> {
    let ic = InitialState::new(c1, c2).map_err(py_err)?;
    let drive = DriveParams::new(rabi, detuning, phase).map_err(py_err)?;
    let traj = dynamics::evolve(&environment(varpi, shift), &ic, &drive, self::solver(solver, memory_width)?, &times)
        .map_err(py_err)?;
    Ok(traj.points.iter().map(|p| (p.t, p.c1, p.c2)).collect())
}

/// Dict of lists: times, x, y, phi, defined, p1, p2.
#[pyfunction]
#[pyo3(signature = (times, c1, c2, rabi, detuning = 0.0, phase = 0.0, varpi = None, shift = 0.0, omega0_over_gamma0 = 50.0, convention = "arcsin"))]
#[allow(clippy::too_many_arguments)]
fn phase_trace<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    c1: Complex64,
    c2: Complex64,
    rabi: f64,
    detuning: f64,
    phase: f64,
    varpi: Option<f64>,
    shift: f64,
    omega0_over_gamma0: f64,
    convention: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let convention = match convention {
        "arcsin" => PhaseConvention::Arcsin,
        "atan2" => PhaseConvention::Atan2,
        other => return Err(PyValueError::new_err(format!("unknown phase convention `{other}`"))),
    };
    let ic = InitialState::new(c1, c2).map_err(py_err)?;
    let drive = DriveParams::new(rabi, detuning, phase).map_err(py_err)?;
    let trace = berry::phase_trace(
        &ic,
        &environment(varpi, shift),
        omega0_over_gamma0,
        &drive,
        Solver::Closed,
        &times,
        convention,
    )
    .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("times", trace.times.clone())?;
    out.set_item("x", trace.points.iter().map(|p| p.x).collect::<Vec<_>>())?;
    out.set_item("y", trace.points.iter().map(|p| p.y).collect::<Vec<_>>())?;
    out.set_item("phi", trace.points.iter().map(|p| p.phi_t).collect::<Vec<_>>())?;
    out.set_item("defined", trace.points.iter().map(|p| p.defined).collect::<Vec<_>>())?;
    out.set_item("p1", trace.populations.iter().map(|p| p.0).collect::<Vec<_>>())?;
    out.set_item("p2", trace.populations.iter().map(|p| p.1).collect::<Vec<_>>())?;
    Ok(out)
}

/// (X, Y) → φ_t, or None when the overlap underflows.
#[pyfunction]
#[pyo3(signature = (x, y, convention = "arcsin"))]
fn total_phase(x: f64, y: f64, convention: &str) -> PyResult<Option<f64>> {
    let c = match convention {
        "arcsin" => PhaseConvention::Arcsin,
        "atan2" => PhaseConvention::Atan2,
        other => return Err(PyValueError::new_err(format!("unknown phase convention `{other}`"))),
    };
    Ok(berry::total_phase(x, y, c))
}

/// Runs a sweep from a TOML document and returns the rendered dataset.
#[pyfunction]
#[pyo3(signature = (config, workers = 1))]
fn run_sweep(py: Python<'_>, config: &str, workers: usize) -> PyResult<String> {
    let spec = sweep::parse_config(config).map_err(|e| py_err(e.into()))?;
    let ds = py.detach(|| sweep::run_sweep(&spec, workers)).map_err(py_err)?;
    Ok(sweep::render(&ds.to_table(), OutputFormat::from(spec.format)))
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    sweep::PRESETS.to_vec()
}

#[pymodule]
#[pyo3(name = "halfspace_berry")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMedium>()?;
    m.add_class::<PyAtom>()?;
    m.add_function(wrap_pyfunction!(roots_free, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(phase_trace, m)?)?;
    m.add_function(wrap_pyfunction!(total_phase, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
