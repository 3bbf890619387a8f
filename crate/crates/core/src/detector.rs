//! A detector of finite resolution modelled as a partition of an interval
//! `D` into equal cells, detection probabilities, the classes of states it
//! cannot tell apart, and distances to such classes.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ensure, Error, Result};
use crate::hilbert::calculus::integrate_linear;
use crate::hilbert::{
    inner_product, make_gaussian, moments, squeeze_translate, GaussianParams, Grid, GridFunction, GridWavefunction,
    MIN_POINTS_PER_WIDTH,
};

/// Default half-width, in standard deviations, of the interval that must
/// fit inside the detector. Tail mass beyond 5σ is below 6e-7.
pub const DEFAULT_R_SIGMA: f64 = 5.0;

pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub center: f64,
    pub length: f64,
    pub cell_size: f64,
    pub epsilon: f64,
}

impl DetectorConfig {
    pub fn new(center: f64, length: f64, cell_size: f64, epsilon: f64) -> Result<Self> {
        ensure(center.is_finite(), || format!("detector center must be finite, got {center}"))?;
        ensure(length > 0.0 && length.is_finite(), || format!("detector length must be positive, got {length}"))?;
        ensure(cell_size > 0.0 && cell_size <= length, || {
            format!("cell size must lie in (0, length], got {cell_size}")
        })?;
        ensure(epsilon > 0.0 && epsilon < 1.0, || format!("epsilon must lie in (0, 1), got {epsilon}"))?;
        Ok(Self {
            center,
            length,
            cell_size,
            epsilon,
        })
    }

    pub fn lo(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    pub fn hi(&self) -> f64 {
        self.center + 0.5 * self.length
    }

    pub fn n_cells(&self) -> usize {
        ((self.length / self.cell_size).round() as usize).max(1)
    }

    /// Actual cell width after fitting a whole number of cells into `D`.
    pub fn cell_width(&self) -> f64 {
        self.length / self.n_cells() as f64
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let w = self.cell_width();
        let lo = self.lo();
        (0..self.n_cells()).map(move |k| (lo + w * k as f64, lo + w * (k + 1) as f64))
    }

    fn check_inside(&self, grid: &Grid) -> Result<()> {
        if self.lo() < grid.z_min() || self.hi() > grid.z_max() {
            return Err(Error::DetectorOutsideGrid {
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        Ok(())
    }
}

/// `Σ_k |⟨η_k, φ⟩|²` with `η_k` the normalized indicator of cell `k`. The
/// cell integrals are exact for the linear interpolant of `φ`.
pub fn detection_probability(phi: &GridFunction, det: &DetectorConfig) -> Result<f64> {
    let grid = phi.grid();
    det.check_inside(grid)?;
    let (x0, h) = (grid.z_min(), grid.spacing());
    let w = det.cell_width();
    let p = det
        .cells()
        .map(|(lo, hi)| integrate_linear(x0, h, phi.values(), lo, hi).norm_sqr() / w)
        .sum::<f64>();
    Ok(p.clamp(0.0, 1.0))
}

/// States the detector identifies with a reference state: those whose
/// detection probability is within `ε` of the reference's.
#[derive(Debug, Clone)]
pub struct PhysicalEigenstateClass {
    pub detector: DetectorConfig,
    pub reference: GridWavefunction,
    pub reference_probability: f64,
}

impl PhysicalEigenstateClass {
    pub fn new(detector: DetectorConfig, reference: GridWavefunction) -> Result<Self> {
        let p = detection_probability(&reference, &detector)?;
        ensure(p > 0.0, || "reference state is invisible to the detector".into())?;
        Ok(Self {
            detector,
            reference,
            reference_probability: p,
        })
    }

    /// Class of `g_{c,δ}` for a detector centred at `c`.
    pub fn gaussian(detector: DetectorConfig, width: f64, grid: Grid) -> Result<Self> {
        let g = make_gaussian(GaussianParams::real(detector.center, width)?, grid)?;
        Self::new(detector, g)
    }

    pub fn threshold(&self) -> f64 {
        self.reference_probability - self.detector.epsilon
    }
}

pub fn is_physical_eigenstate(phi: &GridFunction, class: &PhysicalEigenstateClass) -> Result<bool> {
    Ok(detection_probability(phi, &class.detector)? >= class.threshold())
}

/// Whether `(μ_z − rδ_z, μ_z + rδ_z)` lies inside the detector.
pub fn r_sigma_contained(phi: &GridWavefunction, det: &DetectorConfig, r: f64) -> Result<bool> {
    let m = moments(phi)?;
    Ok(m.mu_z - r * m.delta_z >= det.lo() && m.mu_z + r * m.delta_z <= det.hi())
}

/// `arccos|β|`, the distance from `αg_a + βg_b` to the class of `g_b` when
/// the two Gaussians are orthogonal.
pub fn two_gaussian_class_distance(beta_modulus: f64) -> f64 {
    beta_modulus.clamp(0.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistance {
    pub angle: f64,
    /// Translation and log squeeze of the closest family member found.
    pub tau: f64,
    pub s: f64,
}

/// Distance from `phi` to the class, approximated by maximizing
/// `|⟨φ, ψ_{τ,s}⟩|` over translated and squeezed copies of the class
/// reference whose `r`-sigma interval stays inside the detector. The true
/// class is larger than this family, so the result is an upper bound.
///
/// Translations are scanned exactly on the grid lattice by FFT
/// cross-correlation for a ladder of squeezes; the best point is then
/// refined by a compass search in continuous `(τ, s)`.
pub fn class_distance(phi: &GridWavefunction, class: &PhysicalEigenstateClass, r: f64) -> Result<ClassDistance> {
    ensure(r > 0.0 && r.is_finite(), || format!("r must be positive, got {r}"))?;
    let grid = *phi.grid();
    if class.reference.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let det = class.detector;
    let m = moments(&class.reference)?;
    let s_lo = (2.0 * r * m.delta_z / det.length).ln();
    let s_hi = (m.delta_z / (MIN_POINTS_PER_WIDTH * grid.spacing())).ln();
    ensure(s_lo <= s_hi, || "detector cannot contain any resolvable member of the class".into())?;
    let feasible = |tau: f64, s: f64| {
        let w = m.delta_z * (-s).exp();
        let mu = m.mu_z + tau;
        s >= s_lo && s <= s_hi && mu - r * w >= det.lo() && mu + r * w <= det.hi()
    };
    let overlap = |tau: f64, s: f64| -> f64 {
        if !feasible(tau, s) {
            return -1.0;
        }
        match squeeze_translate(&class.reference, tau, s.exp()) {
            Ok(psi) => inner_product(phi, &psi).map(|c| c.norm()).unwrap_or(-1.0),
            Err(_) => -1.0,
        }
    };

    let corr = Correlator::new(phi);
    let dz = grid.spacing();
    let ladder = ((s_hi - s_lo) / 0.1).ceil().max(1.0) as usize;
    let mut best = (-1.0, 0.0, 0.0);
    for j in 0..=ladder {
        let s = s_lo + (s_hi - s_lo) * j as f64 / ladder as f64;
        let Ok(psi) = squeeze_translate(&class.reference, 0.0, s.exp()) else {
            continue;
        };
        for (k, value) in corr.scan(&psi) {
            let tau = k as f64 * dz;
            if value > best.0 && feasible(tau, s) {
                best = (value, tau, s);
            }
        }
    }
    ensure(best.0 >= 0.0, || "no feasible member of the class on this grid".into())?;

    let (mut val, mut tau, mut s) = (overlap(best.1, best.2), best.1, best.2);
    let (mut step_tau, mut step_s) = (dz, 0.05);
    while step_tau > 1e-3 * dz || step_s > 1e-4 {
        let mut moved = false;
        for (dt, ds) in [(step_tau, 0.0), (-step_tau, 0.0), (0.0, step_s), (0.0, -step_s)] {
            let v = overlap(tau + dt, s + ds);
            if v > val {
                (val, tau, s) = (v, tau + dt, s + ds);
                moved = true;
            }
        }
        if !moved {
            step_tau *= 0.5;
            step_s *= 0.5;
        }
    }
    Ok(ClassDistance {
        angle: val.min(1.0).acos(),
        tau,
        s,
    })
}

/// Cross-correlation of a fixed state with arbitrary profiles over all
/// lattice shifts.
struct Correlator {
    n: usize,
    len: usize,
    dz: f64,
    conj_spectrum: Vec<Complex64>,
    planner: std::cell::RefCell<FftPlanner<f64>>,
}

impl Correlator {
    fn new(phi: &GridFunction) -> Self {
        let n = phi.values().len();
        let len = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[..n].copy_from_slice(phi.values());
        planner.plan_fft_forward(len).process(&mut buf);
        let conj_spectrum = buf.into_iter().map(|z| z.conj()).collect();
        Self {
            n,
            len,
            dz: phi.grid().spacing(),
            conj_spectrum,
            planner: std::cell::RefCell::new(planner),
        }
    }

    /// `(k, |Σ_j conj(φ_j)·ψ_{j−k}·dz|)` for every shift `k` with
    /// `|k| < n`. Uses plain sums, which differ from the trapezoid rule only
    /// by the negligible end values.
    fn scan(&self, psi: &GridFunction) -> Vec<(i64, f64)> {
        let mut planner = self.planner.borrow_mut();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        buf[..self.n].copy_from_slice(psi.values());
        planner.plan_fft_forward(self.len).process(&mut buf);
        for (b, c) in buf.iter_mut().zip(&self.conj_spectrum) {
            *b *= c;
        }
        planner.plan_fft_inverse(self.len).process(&mut buf);
        let scale = self.dz / self.len as f64;
        // buf[m] = Σ_j conj(φ_j) ψ_{j+m}; a shift by k reads m = −k
        (-(self.n as i64) + 1..self.n as i64)
            .map(|k| {
                let m = (-k).rem_euclid(self.len as i64) as usize;
                (k, buf[m].norm() * scale)
            })
            .collect()
    }
}

/// The double-slit geometry: slits at `a` and `b`, state width `delta` and a
/// detector of length `detector_length` centred on `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitGeometry {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub detector_length: f64,
    pub cell_size: f64,
    pub epsilon: f64,
}

impl SlitGeometry {
    /// Slits `10⁻⁵` apart, states of width `10⁻⁹`, a detector half the slit
    /// separation long with atom-sized cells.
    pub fn double_slit() -> Self {
        Self {
            a: -5e-6,
            b: 5e-6,
            delta: 1e-9,
            detector_length: 5e-6,
            cell_size: 1e-10,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn detector(&self) -> Result<DetectorConfig> {
        DetectorConfig::new(self.b, self.detector_length, self.cell_size, self.epsilon)
    }

    /// Grid covering both slits and the detector with `points_per_width`
    /// nodes per `delta`.
    pub fn grid(&self, points_per_width: f64) -> Result<Grid> {
        let margin = 20.0 * self.delta;
        let lo = self.a.min(self.b - 0.5 * self.detector_length) - margin;
        let hi = self.b.max(self.a).max(self.b + 0.5 * self.detector_length) + margin;
        let n = ((hi - lo) / (self.delta / points_per_width)).ceil() as usize + 1;
        Grid::new(lo, hi, n)
    }
}
