use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{Grid, GridWavefunction};
use crate::error::{ensure, Error, Result};
use crate::stats::normal_cdf;

/// Mass a Gaussian may lose to the grid edges before it counts as clipped.
pub const CLIP_TOLERANCE: f64 = 1e-8;

/// Smallest number of grid spacings per standard deviation.
pub const MIN_POINTS_PER_WIDTH: f64 = 4.0;

/// Gaussian state `g_{a,σ}(z)·e^{ipz}` whose density `|g|²` is the normal
/// density with mean `center` and standard deviation `width`. `momentum` is
/// a wavenumber (momentum in units of ħ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

impl GaussianParams {
    pub fn new(center: f64, width: f64, momentum: f64) -> Result<Self> {
        ensure(center.is_finite() && momentum.is_finite(), || {
            format!("gaussian center/momentum must be finite, got ({center}, {momentum})")
        })?;
        ensure(width > 0.0 && width.is_finite(), || format!("gaussian width must be positive, got {width}"))?;
        Ok(Self {
            center,
            width,
            momentum,
        })
    }

    /// Real Gaussian (zero momentum).
    pub fn real(center: f64, width: f64) -> Result<Self> {
        Self::new(center, width, 0.0)
    }

    /// Analytic amplitude at `z`.
    pub fn amplitude(&self, z: f64) -> Complex64 {
        let s2 = self.width * self.width;
        let mag = (2.0 * PI * s2).powf(-0.25) * (-(z - self.center).powi(2) / (4.0 * s2)).exp();
        Complex64::from_polar(mag, self.momentum * z)
    }

    /// Probability mass of `|g|²` outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        normal_cdf((lo - self.center) / self.width) + normal_cdf((self.center - hi) / self.width)
    }
}

/// Samples the Gaussian on `grid` and renormalizes with the trapezoid rule.
pub fn make_gaussian(params: GaussianParams, grid: Grid) -> Result<GridWavefunction> {
    let max_spacing = params.width / MIN_POINTS_PER_WIDTH;
    if grid.spacing() > max_spacing {
        return Err(Error::GridTooCoarse {
            width: params.width,
            spacing: grid.spacing(),
            max_spacing,
        });
    }
    let lost = params.mass_outside(grid.z_min(), grid.z_max());
    if lost > CLIP_TOLERANCE {
        return Err(Error::SupportClipped { lost_mass: lost });
    }
    GridWavefunction::from_fn(grid, |z| params.amplitude(z))
}

/// Closed-form overlap `⟨g₁, g₂⟩` returned as `(ln|⟨g₁,g₂⟩|, arg⟨g₁,g₂⟩)`.
///
/// With `Δk = k₂ − k₁`:
///
/// ```text
/// ln|⟨g₁,g₂⟩| = ½ ln(2σδ/(σ²+δ²)) − (a−b)²/(4(σ²+δ²)) − Δk²σ²δ²/(σ²+δ²)
/// arg⟨g₁,g₂⟩  = Δk·(aδ² + bσ²)/(σ²+δ²)
/// ```
///
/// Working in log space keeps separations of thousands of widths finite.
pub fn gaussian_overlap_analytic(p1: GaussianParams, p2: GaussianParams) -> (f64, f64) {
    let (s, d) = (p1.width, p2.width);
    let (s2, d2) = (s * s, d * d);
    let sum = s2 + d2;
    let dk = p2.momentum - p1.momentum;
    let dx = p1.center - p2.center;
    let log_mag = 0.5 * (2.0 * s * d / sum).ln() - dx * dx / (4.0 * sum) - dk * dk * s2 * d2 / sum;
    let phase = dk * (p1.center * d2 + p2.center * s2) / sum;
    (log_mag, phase)
}

/// Fubini-Study distance between two Gaussians from the closed form.
pub fn gaussian_distance_analytic(p1: GaussianParams, p2: GaussianParams) -> f64 {
    let (log_mag, _) = gaussian_overlap_analytic(p1, p2);
    log_mag.exp().min(1.0).acos()
}
