//! Python bindings: grid states, collapse walks, GUE sampling, diffusion
//! splitting, detector probabilities and the semiclassical checks.

use collapse_core::collapse::{self, AbsorbMode, Outcome, StepDistribution};
use collapse_core::{detector, diffusion, gue, hilbert, rng, semiclassics, Complex64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: collapse_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Gaussian state parameters: centre, width and wavenumber.
#[pyclass(name = "GaussianParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGaussianParams(hilbert::GaussianParams);

#[pymethods]
impl PyGaussianParams {
    #[new]
    #[pyo3(signature = (center, width, momentum = 0.0))]
    fn new(center: f64, width: f64, momentum: f64) -> PyResult<Self> {
        hilbert::GaussianParams::new(center, width, momentum).map(Self).map_err(err)
    }

    #[getter]
    fn center(&self) -> f64 {
        self.0.center
    }

    #[getter]
    fn width(&self) -> f64 {
        self.0.width
    }

    #[getter]
    fn momentum(&self) -> f64 {
        self.0.momentum
    }

    fn amplitude(&self, z: f64) -> Complex64 {
        self.0.amplitude(z)
    }

    fn __repr__(&self) -> String {
        format!("GaussianParams(center={}, width={}, momentum={})", self.0.center, self.0.width, self.0.momentum)
    }
}

/// Uniform grid on `[z_min, z_max]`.
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGrid(hilbert::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(z_min: f64, z_max: f64, n_points: usize) -> PyResult<Self> {
        hilbert::Grid::new(z_min, z_max, n_points).map(Self).map_err(err)
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn points(&self) -> Vec<f64> {
        self.0.points().collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Normalized state sampled on a grid.
#[pyclass(name = "Wavefunction", frozen)]
pub struct PyWavefunction(hilbert::GridWavefunction);

#[pymethods]
impl PyWavefunction {
    #[staticmethod]
    fn gaussian(params: PyGaussianParams, grid: PyGrid) -> PyResult<Self> {
        hilbert::make_gaussian(params.0, grid.0).map(Self).map_err(err)
    }

    /// Normalizes `sum(c_k psi_k)`.
    #[staticmethod]
    fn superpose(terms: Vec<(Complex64, PyRef<'_, PyWavefunction>)>) -> PyResult<Self> {
        let refs: Vec<(Complex64, &hilbert::GridWavefunction)> = terms.iter().map(|(c, w)| (*c, &w.0)).collect();
        hilbert::GridWavefunction::superpose(&refs).map(Self).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn density(&self) -> Vec<f64> {
        self.0.density()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `(mu_z, delta_z)`.
    fn moments(&self) -> PyResult<(f64, f64)> {
        let m = hilbert::moments(&self.0).map_err(err)?;
        Ok((m.mu_z, m.delta_z))
    }

    fn inner(&self, other: &PyWavefunction) -> PyResult<Complex64> {
        hilbert::inner_product(&self.0, &other.0).map_err(err)
    }

    fn distance(&self, other: &PyWavefunction) -> PyResult<f64> {
        hilbert::fubini_study_distance(&self.0, &other.0).map_err(err)
    }

    fn squeeze_translate(&self, tau: f64, lam: f64) -> PyResult<Self> {
        hilbert::squeeze_translate(&self.0, tau, lam).map(Self).map_err(err)
    }

    fn step_orthogonality(&self) -> PyResult<f64> {
        hilbert::step_orthogonality(&self.0).map_err(err)
    }
}

/// Parameters of the reduced collapse walk.
#[pyclass(name = "WalkConfig", from_py_object)]
#[derive(Clone)]
pub struct PyWalkConfig(collapse::WalkConfig);

#[pymethods]
impl PyWalkConfig {
    #[new]
    #[pyo3(signature = (
        a = -10.0, b = 10.0, alpha_sq = 0.25, *, step_tau = 1.0, step_s = 1.0, drift_h = 0.5,
        delta_detect = 1.0, steps = "fixed", absorb = "joint", max_steps = collapse::DEFAULT_MAX_STEPS,
        seed = 0, reflect_at = None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        a: f64,
        b: f64,
        alpha_sq: f64,
        step_tau: f64,
        step_s: f64,
        drift_h: f64,
        delta_detect: f64,
        steps: &str,
        absorb: &str,
        max_steps: u64,
        seed: u64,
        reflect_at: Option<f64>,
    ) -> PyResult<Self> {
        let step_distribution = match steps {
            "fixed" => StepDistribution::Fixed,
            "normal" => StepDistribution::Normal,
            _ => return Err(PyValueError::new_err(format!("steps must be 'fixed' or 'normal', got '{steps}'"))),
        };
        let absorb_mode = match absorb {
            "joint" => AbsorbMode::Joint,
            "tau_only" => AbsorbMode::TauOnly,
            _ => return Err(PyValueError::new_err(format!("absorb must be 'joint' or 'tau_only', got '{absorb}'"))),
        };
        let mut cfg = collapse::WalkConfig {
            a,
            b,
            alpha_sq,
            beta_sq: 1.0 - alpha_sq,
            step_tau,
            step_s,
            drift_h,
            delta_detect,
            step_distribution,
            max_steps,
            seed,
            reflect_at,
            absorb_mode,
        };
        if cfg.reflect_at.is_none() && cfg.initial_delta() > 0.0 {
            cfg.reflect_at = Some(cfg.initial_delta());
        }
        cfg.validate().map_err(err)?;
        Ok(Self(cfg))
    }

    #[getter]
    fn initial_tau(&self) -> f64 {
        self.0.initial_tau()
    }

    #[getter]
    fn initial_delta(&self) -> f64 {
        self.0.initial_delta()
    }

    #[getter]
    fn beta_sq(&self) -> f64 {
        self.0.beta_sq
    }
}

fn label(o: Outcome) -> &'static str {
    o.label()
}

/// One walk drawn from stream `run` of the config seed. Returns the outcome
/// label and the trajectory as `(step, tau, s, mu_z, delta_z)` tuples.
#[pyfunction]
#[pyo3(signature = (config, run = 0))]
#[allow(clippy::type_complexity)]
fn run_collapse(config: &PyWalkConfig, run: u64) -> PyResult<(&'static str, Vec<(u64, f64, f64, f64, f64)>)> {
    let out = collapse::run_collapse(&config.0, &mut rng::stream(config.0.seed, run)).map_err(err)?;
    let traj = out.trajectory.iter().map(|p| (p.step, p.tau, p.s, p.mu_z, p.delta_z)).collect();
    Ok((label(out.absorbed_at), traj))
}

/// Outcome counts of a seeded ensemble.
#[pyclass(name = "Ensemble", frozen)]
pub struct PyEnsemble(collapse::EnsembleResult);

#[pymethods]
impl PyEnsemble {
    #[getter]
    fn n_runs(&self) -> u64 {
        self.0.n_runs()
    }

    fn count(&self, outcome: &str) -> PyResult<u64> {
        let o = match outcome {
            "slit_a" => Outcome::SlitA,
            "slit_b" => Outcome::SlitB,
            "none" => Outcome::None,
            _ => return Err(PyValueError::new_err(format!("unknown outcome '{outcome}'"))),
        };
        Ok(self.0.count(o))
    }

    fn conditional_frequency_b(&self) -> f64 {
        self.0.conditional_frequency_b()
    }

    /// Binomial band `(lo, hi)` around `p` for the absorbed sample size.
    #[pyo3(signature = (p, level = 0.99))]
    fn interval_around(&self, p: f64, level: f64) -> (f64, f64) {
        let i = self.0.interval_around(p, level);
        (i.lo, i.hi)
    }

    fn outcomes(&self) -> Vec<&'static str> {
        self.0.runs.iter().map(|r| label(r.outcome)).collect()
    }
}

#[pyfunction]
fn ensemble_run(py: Python<'_>, config: &PyWalkConfig, n_runs: u64) -> PyResult<PyEnsemble> {
    let cfg = config.0.clone();
    py.detach(|| collapse::ensemble_run(&cfg, n_runs)).map(PyEnsemble).map_err(err)
}

#[pyfunction]
fn gambler_ruin_probability(mu_z: f64, a: f64, b: f64) -> PyResult<f64> {
    collapse::gambler_ruin_probability(mu_z, a, b).map_err(err)
}

/// Absorption probabilities `(p_a, p_b)` of diffusion from `c` on `[a, b]`.
#[pyfunction]
#[pyo3(signature = (a, b, c, coefficient = 0.5, n_points = 401, t_max = 5000.0))]
fn splitting_probabilities(a: f64, b: f64, c: f64, coefficient: f64, n_points: usize, t_max: f64) -> PyResult<(f64, f64)> {
    let s = diffusion::splitting_probabilities(a, b, c, coefficient, n_points, t_max).map_err(err)?;
    Ok((s.p_a, s.p_b))
}

/// Eigenvalues of GUE sample `index` under `seed`.
#[pyfunction]
#[pyo3(signature = (dim, scale = 1.0, seed = 0, index = 0))]
fn gue_eigenvalues(dim: usize, scale: f64, seed: u64, index: u64) -> PyResult<Vec<f64>> {
    let p = gue::GueParams::new(dim, scale, seed).map_err(err)?;
    gue::sample_gue(&p, &mut rng::stream(seed, index)).eigenvalues().map_err(err)
}

#[pyfunction]
fn wigner_surmise_cdf(s: f64) -> f64 {
    gue::wigner_surmise_cdf(s)
}

/// `(log|<g1, g2>|, arg<g1, g2>)` in closed form.
#[pyfunction]
fn gaussian_overlap(p1: PyGaussianParams, p2: PyGaussianParams) -> (f64, f64) {
    hilbert::gaussian_overlap_analytic(p1.0, p2.0)
}

#[pyfunction]
fn gaussian_distance(p1: PyGaussianParams, p2: PyGaussianParams) -> f64 {
    hilbert::gaussian_distance_analytic(p1.0, p2.0)
}

/// Probability that a cell detector of `length` centred on `center` fires.
#[pyfunction]
#[pyo3(signature = (state, center, length, cell_size, epsilon = detector::DEFAULT_EPSILON))]
fn detection_probability(state: &PyWavefunction, center: f64, length: f64, cell_size: f64, epsilon: f64) -> PyResult<f64> {
    let det = detector::DetectorConfig::new(center, length, cell_size, epsilon).map_err(err)?;
    detector::detection_probability(&state.0, &det).map_err(err)
}

#[pyfunction]
fn two_gaussian_class_distance(beta_modulus: f64) -> f64 {
    detector::two_gaussian_class_distance(beta_modulus)
}

/// Numeric and three-term squared state speed of a Gaussian packet, as a
/// dict with keys `classical`, `acceleration`, `spreading`,
/// `numeric_total` and `relative_error`.
#[pyfunction]
#[pyo3(signature = (packet, grid, mass = 1.0, hbar = 1.0, omega = None))]
fn velocity_decomposition(
    packet: PyGaussianParams,
    grid: PyGrid,
    mass: f64,
    hbar: f64,
    omega: Option<f64>,
) -> PyResult<std::collections::HashMap<&'static str, f64>> {
    let params = match omega {
        Some(w) => semiclassics::ParticleParams::harmonic(mass, hbar, w, packet.0, grid.0),
        None => semiclassics::ParticleParams::free(mass, hbar, packet.0, grid.0),
    }
    .map_err(err)?;
    let d = semiclassics::velocity_decomposition(&params).map_err(err)?;
    Ok([
        ("classical", d.classical),
        ("acceleration", d.acceleration),
        ("spreading", d.spreading),
        ("numeric_total", d.numeric_total),
        ("relative_error", d.relative_error()),
    ]
    .into_iter()
    .collect())
}

#[pyfunction]
fn fringe_period(half_separation: f64, sigma: f64, mass: f64, hbar: f64, t: f64) -> f64 {
    semiclassics::fringe_period(half_separation, sigma, mass, hbar, t)
}

/// Bloch-sphere point `(x, y, z)` of the two-slit amplitudes.
#[pyfunction]
fn to_sphere(alpha: Complex64, beta: Complex64) -> PyResult<(f64, f64, f64)> {
    let p = semiclassics::to_sphere(alpha, beta).map_err(err)?;
    Ok((p.x, p.y, p.z))
}

#[pymodule]
pub fn collapse_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGaussianParams>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyWavefunction>()?;
    m.add_class::<PyWalkConfig>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(run_collapse, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_run, m)?)?;
    m.add_function(wrap_pyfunction!(gambler_ruin_probability, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(gue_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_surmise_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_distance, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(two_gaussian_class_distance, m)?)?;
    m.add_function(wrap_pyfunction!(velocity_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(fringe_period, m)?)?;
    m.add_function(wrap_pyfunction!(to_sphere, m)?)?;
    Ok(())
}
