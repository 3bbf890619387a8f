//! The two-parameter family `φ_{τ,λ}(z) = √λ·φ(λ(z − μ_z − τ) + μ_z)` of
//! translated and squeezed copies of a reference state, its tangent
//! vectors, and the position moments that coordinatize it.

use num_complex::Complex64;

use super::calculus::{derivative, CubicSpline};
use super::gaussian::{CLIP_TOLERANCE, MIN_POINTS_PER_WIDTH};
use super::grid::{inner_product, GridFunction, GridWavefunction};
use crate::error::{ensure, Error, Result};

/// Mass allowed in the outer edge band of the grid before moments are
/// considered unreliable.
pub const BOUNDARY_MASS_TOLERANCE: f64 = 1e-8;

/// Minimum separation, in component widths, for Gaussians to be treated as
/// mutually orthogonal (overlap `e^{-18} ≈ 1.5e-8`).
pub const WELL_SEPARATED: f64 = 12.0;

/// Position moments `(μ_z, δ_z)` of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mu_z: f64,
    pub delta_z: f64,
}

fn edge_band(n: usize) -> usize {
    (n / 100).max(2)
}

pub fn moments(psi: &GridWavefunction) -> Result<Moments> {
    let grid = psi.grid();
    let dens = psi.density();
    let n = dens.len();
    let band = edge_band(n);
    let edge: f64 = (0..band)
        .chain(n - band..n)
        .map(|i| grid.weight(i) * dens[i])
        .sum();
    if edge > BOUNDARY_MASS_TOLERANCE {
        return Err(Error::BoundaryMass { mass: edge });
    }
    let norm = grid.integrate(&dens);
    let first: Vec<f64> = grid.points().zip(&dens).map(|(z, d)| z * d).collect();
    let mu = grid.integrate(&first) / norm;
    let second: Vec<f64> = grid.points().zip(&dens).map(|(z, d)| (z - mu).powi(2) * d).collect();
    let var = grid.integrate(&second) / norm;
    Ok(Moments {
        mu_z: mu,
        delta_z: var.sqrt(),
    })
}

/// Realizes `φ_{τ,λ}` by natural cubic-spline interpolation of `phi`,
/// then renormalizes.
pub fn squeeze_translate(phi: &GridWavefunction, tau: f64, lambda: f64) -> Result<GridWavefunction> {
    ensure(lambda > 0.0 && lambda.is_finite(), || format!("lambda must be positive, got {lambda}"))?;
    ensure(tau.is_finite(), || format!("tau must be finite, got {tau}"))?;
    let grid = *phi.grid();
    let m = moments(phi)?;
    let min_width = MIN_POINTS_PER_WIDTH * grid.spacing();
    let width = m.delta_z / lambda;
    if width < min_width {
        return Err(Error::ResolutionLoss { width, min_width });
    }
    let map = |z: f64| lambda * (z - m.mu_z - tau) + m.mu_z;
    let lost = phi.mass_outside(map(grid.z_min()), map(grid.z_max()));
    if lost > CLIP_TOLERANCE {
        return Err(Error::SupportClipped { lost_mass: lost });
    }
    let spline = CubicSpline::new(grid.z_min(), grid.spacing(), phi.values());
    let root = lambda.sqrt();
    GridWavefunction::from_fn(grid, |z| spline.eval(map(z)) * root)
}

/// `dφ_τ/dτ` at `τ = 0`, i.e. `−dφ/dz`.
pub fn tangent_tau(phi: &GridWavefunction) -> GridFunction {
    let d = derivative(phi.values(), phi.grid().spacing());
    GridFunction::new(*phi.grid(), d.into_iter().map(|v| -v).collect()).expect("derivative keeps grid shape")
}

/// `dφ_λ/dλ` at `λ = 1`, i.e. `½φ + (z − μ_z)·dφ/dz`. Equals `dφ_s/ds` at
/// `s = 0` for `s = ln λ`.
pub fn tangent_s(phi: &GridWavefunction) -> Result<GridFunction> {
    let mu = moments(phi)?.mu_z;
    let grid = *phi.grid();
    let d = derivative(phi.values(), grid.spacing());
    let values = grid
        .points()
        .zip(phi.values().iter().zip(d))
        .map(|(z, (v, dv))| v * 0.5 + dv * (z - mu))
        .collect();
    GridFunction::new(grid, values)
}

/// Normalized real inner product of the two manifold tangents,
/// `Re⟨t_s, t_τ⟩ / (‖t_s‖·‖t_τ‖)`.
pub fn step_orthogonality(phi: &GridWavefunction) -> Result<f64> {
    let ts = tangent_s(phi)?;
    let tt = tangent_tau(phi);
    Ok(inner_product(&ts, &tt)?.re / (ts.norm() * tt.norm()))
}

/// Component of `v` along the fibre direction `iφ`: `Re⟨iφ, v⟩`.
pub fn fibre_component(phi: &GridWavefunction, v: &GridFunction) -> Result<f64> {
    let i_phi = phi.scaled(Complex64::new(0.0, 1.0));
    Ok(inner_product(&i_phi, v)?.re)
}

/// A point `(τ, s)` of the manifold generated by `reference`.
#[derive(Debug, Clone)]
pub struct ManifoldState {
    pub reference: GridWavefunction,
    pub tau: f64,
    pub s: f64,
}

impl ManifoldState {
    pub fn new(reference: GridWavefunction, tau: f64, s: f64) -> Self {
        Self { reference, tau, s }
    }

    pub fn realize(&self) -> Result<GridWavefunction> {
        squeeze_translate(&self.reference, self.tau, self.s.exp())
    }

    /// Moments the realized state should have: `(μ_φ + τ, δ_φ·e^{−s})`.
    pub fn expected_moments(&self) -> Result<Moments> {
        let m = moments(&self.reference)?;
        Ok(Moments {
            mu_z: m.mu_z + self.tau,
            delta_z: m.delta_z * (-self.s).exp(),
        })
    }
}

/// Mean and separation-driven variance of `αg̃_c + βg̃_d` for orthogonal
/// components: `μ_z = |α|²c + |β|²d`, `δ_z² = |α|²|β|²(c − d)²`.
pub fn two_gaussian_moments(alpha_sq: f64, beta_sq: f64, c: f64, d: f64) -> (f64, f64) {
    (alpha_sq * c + beta_sq * d, alpha_sq * beta_sq * (c - d).powi(2))
}

/// Inverts [`two_gaussian_moments`]: centres `(c, d)` with `c < d` from
/// `(μ_z, δ_z²)`. Requires both weights non-zero.
pub fn two_gaussian_centers(alpha_sq: f64, beta_sq: f64, mu_z: f64, var_z: f64) -> Result<(f64, f64)> {
    ensure(alpha_sq > 0.0 && beta_sq > 0.0, || "both weights must be non-zero".into())?;
    ensure(var_z >= 0.0, || format!("variance must be non-negative, got {var_z}"))?;
    let sep = var_z.sqrt() / (alpha_sq * beta_sq).sqrt();
    Ok((mu_z - beta_sq * sep, mu_z + alpha_sq * sep))
}
