//! Semiclassical cross-checks: the split of a Gaussian packet's projective
//! speed into classical, acceleration and spreading parts, free spreading,
//! double-slit screen patterns with and without a which-way detector, and
//! the sphere picture of a two-state superposition.

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::hilbert::calculus::{fourier_multiply, second_derivative};
use crate::hilbert::{inner_product, make_gaussian, GaussianParams, Grid, GridFunction, GridWavefunction};

/// Relative disagreement between the grid speed and the three-term formula
/// beyond which the grid is reported as too coarse.
pub const DECOMPOSITION_TOLERANCE: f64 = 0.05;

/// Minimum distance, in packet widths, from the packet centre to either end
/// of the grid.
pub const EDGE_CLEARANCE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleParams {
    pub mass: f64,
    pub hbar: f64,
    /// `momentum` is a wavenumber, so the momentum is `ħ·k`.
    pub packet: GaussianParams,
    pub grid: Grid,
    pub potential: Vec<f64>,
}

impl ParticleParams {
    pub fn new(mass: f64, hbar: f64, packet: GaussianParams, grid: Grid, potential: impl Fn(f64) -> f64) -> Result<Self> {
        ensure(mass > 0.0 && mass.is_finite(), || format!("mass must be positive, got {mass}"))?;
        ensure(hbar > 0.0 && hbar.is_finite(), || format!("hbar must be positive, got {hbar}"))?;
        let potential: Vec<f64> = grid.points().map(potential).collect();
        ensure(potential.iter().all(|v| v.is_finite()), || "potential must be finite on the grid".into())?;
        Ok(Self {
            mass,
            hbar,
            packet,
            grid,
            potential,
        })
    }

    pub fn free(mass: f64, hbar: f64, packet: GaussianParams, grid: Grid) -> Result<Self> {
        Self::new(mass, hbar, packet, grid, |_| 0.0)
    }

    /// `V(z) = ½mω²z²`.
    pub fn harmonic(mass: f64, hbar: f64, omega: f64, packet: GaussianParams, grid: Grid) -> Result<Self> {
        Self::new(mass, hbar, packet, grid, |z| 0.5 * mass * omega * omega * z * z)
    }

    pub fn velocity(&self) -> f64 {
        self.hbar * self.packet.momentum / self.mass
    }

    /// `w = −V′(a)/m` from the sampled potential.
    pub fn acceleration(&self) -> f64 {
        let g = &self.grid;
        let h = g.spacing();
        let u = ((self.packet.center - g.z_min()) / h).clamp(1.0, (g.len() - 2) as f64);
        let i = (u.floor() as usize).min(g.len() - 3);
        let slope = |j: usize| (self.potential[j + 1] - self.potential[j - 1]) / (2.0 * h);
        let t = u - i as f64;
        -((1.0 - t) * slope(i) + t * slope(i + 1)) / self.mass
    }

    /// `(−ħ²/2m)∂²ψ + Vψ`.
    pub fn hamiltonian_apply(&self, psi: &GridFunction) -> Result<GridFunction> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let d2 = second_derivative(psi.values(), self.grid.spacing());
        let kin = -self.hbar * self.hbar / (2.0 * self.mass);
        let values = psi
            .values()
            .iter()
            .zip(d2)
            .zip(&self.potential)
            .map(|((v, d), pot)| d * kin + v * pot)
            .collect();
        GridFunction::new(self.grid, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDecomposition {
    /// `v²/4σ²`
    pub classical: f64,
    /// `m²w²σ²/ħ²`
    pub acceleration: f64,
    /// `ħ²/(32σ⁴m²)`
    pub spreading: f64,
    /// `‖ψ̇‖² − |⟨ψ,ψ̇⟩|²` on the grid.
    pub numeric_total: f64,
}

impl VelocityDecomposition {
    pub fn analytic_total(&self) -> f64 {
        self.classical + self.acceleration + self.spreading
    }

    pub fn relative_error(&self) -> f64 {
        (self.numeric_total - self.analytic_total()).abs() / self.numeric_total
    }
}

/// Squared Fubini-Study speed of `ψ` under `ψ̇ = −(i/ħ)Hψ`.
pub fn projective_speed_sqr(params: &ParticleParams, psi: &GridWavefunction) -> Result<f64> {
    let h_psi = params.hamiltonian_apply(psi)?;
    let dot = h_psi.scaled(Complex64::new(0.0, -1.0 / params.hbar));
    let along = inner_product(psi, &dot)?;
    Ok(dot.norm_sqr() - along.norm_sqr())
}

pub fn velocity_decomposition(params: &ParticleParams) -> Result<VelocityDecomposition> {
    let p = params.packet;
    let g = params.grid;
    let clearance = EDGE_CLEARANCE * p.width;
    if p.center - clearance < g.z_min() || p.center + clearance > g.z_max() {
        return Err(Error::SupportClipped {
            lost_mass: p.mass_outside(g.z_min(), g.z_max()),
        });
    }
    let psi = make_gaussian(p, g)?;
    let (m, hbar, s) = (params.mass, params.hbar, p.width);
    let v = params.velocity();
    let w = params.acceleration();
    let d = VelocityDecomposition {
        classical: v * v / (4.0 * s * s),
        acceleration: m * m * w * w * s * s / (hbar * hbar),
        spreading: hbar * hbar / (32.0 * s.powi(4) * m * m),
        numeric_total: projective_speed_sqr(params, &psi)?,
    };
    if d.relative_error() > DECOMPOSITION_TOLERANCE {
        return Err(Error::GridTooCoarse {
            width: s,
            spacing: g.spacing(),
            max_spacing: s / crate::hilbert::MIN_POINTS_PER_WIDTH,
        });
    }
    Ok(d)
}

/// Envelope of a freely evolved Gaussian after time `t`: width
/// `√(σ² + (ħt/2mσ)²)` and centre `a + (ħk/m)t`. The quadratic phase the
/// packet acquires is not part of the returned parameters.
pub fn free_spread(packet: GaussianParams, mass: f64, hbar: f64, t: f64) -> Result<GaussianParams> {
    ensure(t >= 0.0 && t.is_finite(), || format!("time must be non-negative, got {t}"))?;
    ensure(mass > 0.0 && hbar > 0.0, || "mass and hbar must be positive".into())?;
    let s = packet.width;
    let width = (s * s + (hbar * t / (2.0 * mass * s)).powi(2)).sqrt();
    let center = packet.center + hbar * packet.momentum / mass * t;
    GaussianParams::new(center, width, packet.momentum)
}

/// Free Schrödinger evolution by the exact spectral propagator
/// `exp(−iħk²t/2m)`. The grid is treated as periodic, so the state must
/// stay clear of its ends.
pub fn free_evolve(psi: &GridWavefunction, mass: f64, hbar: f64, t: f64) -> Result<GridWavefunction> {
    ensure(t >= 0.0 && t.is_finite(), || format!("time must be non-negative, got {t}"))?;
    let c = hbar * t / (2.0 * mass);
    let values = fourier_multiply(psi.values(), psi.grid().spacing(), |k| Complex64::from_polar(1.0, -c * k * k));
    GridWavefunction::from_amplitudes(*psi.grid(), values)
}

/// `g̃`: the Gaussian `packet` sampled on `grid` and evolved freely for `t`.
pub fn spread_packet(packet: GaussianParams, mass: f64, hbar: f64, t: f64, grid: Grid) -> Result<GridWavefunction> {
    free_evolve(&make_gaussian(packet, grid)?, mass, hbar, t)
}

/// Period of the fringes between two equal packets of initial width `sigma`
/// released from `±half_separation` and spread freely for `t`.
pub fn fringe_period(half_separation: f64, sigma: f64, mass: f64, hbar: f64, t: f64) -> f64 {
    let b = hbar * t / mass;
    let k = 2.0 * b / (16.0 * sigma.powi(4) + 4.0 * b * b);
    2.0 * std::f64::consts::PI / (4.0 * half_separation * k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPattern {
    pub grid: Grid,
    pub density: Vec<f64>,
}

impl ScreenPattern {
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.density)
    }

    /// `(P_max − P_min)/(P_max + P_min)` over grid nodes in `[lo, hi]`.
    pub fn visibility(&self, lo: f64, hi: f64) -> f64 {
        let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
        for (z, &p) in self.grid.points().zip(&self.density) {
            if (lo..=hi).contains(&z) {
                max = max.max(p);
                min = min.min(p);
            }
        }
        (max - min) / (max + min)
    }
}

/// Density on the screen. With the which-way detector present the slit
/// contributions add incoherently, `|α|²|g̃_a|² + |β|²|g̃_b|²`; without it
/// the amplitudes interfere, `|αg̃_a + βg̃_b|²`, renormalized because the
/// spread packets overlap.
pub fn screen_pattern(
    alpha: Complex64,
    beta: Complex64,
    g_a: &GridWavefunction,
    g_b: &GridWavefunction,
    detector_present: bool,
) -> Result<ScreenPattern> {
    let total = alpha.norm_sqr() + beta.norm_sqr();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(total));
    }
    if g_a.grid() != g_b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *g_a.grid();
    let density = if detector_present {
        let (wa, wb) = (alpha.norm_sqr(), beta.norm_sqr());
        g_a.values()
            .iter()
            .zip(g_b.values())
            .map(|(x, y)| wa * x.norm_sqr() + wb * y.norm_sqr())
            .collect()
    } else {
        let raw: Vec<f64> = g_a
            .values()
            .iter()
            .zip(g_b.values())
            .map(|(x, y)| (alpha * x + beta * y).norm_sqr())
            .collect();
        let mass = grid.integrate(&raw);
        ensure(mass > 0.0, || "amplitudes cancel completely".into())?;
        raw.into_iter().map(|p| p / mass).collect()
    };
    Ok(ScreenPattern { grid, density })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// Bundle projection of `αe_a + βe_b`: `x = 2Re(αβ̄)`, `y = −2Im(αβ̄)`,
/// `z = |β|² − |α|²`.
pub fn to_sphere(alpha: Complex64, beta: Complex64) -> Result<SpherePoint> {
    let total = alpha.norm_sqr() + beta.norm_sqr();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(total));
    }
    let c = alpha * beta.conj();
    Ok(SpherePoint {
        x: 2.0 * c.re,
        y: -2.0 * c.im,
        z: beta.norm_sqr() - alpha.norm_sqr(),
    })
}

/// Places each `(μ_z, θ)` on the sphere at height `μ_z` and azimuth `θ`, so
/// that `δ_z² = 1 − μ_z²`.
pub fn sphere_walk_view(trajectory: &[(f64, f64)]) -> Result<Vec<SpherePoint>> {
    trajectory
        .iter()
        .map(|&(mu, theta)| {
            if !(-1.0..=1.0).contains(&mu) {
                return Err(Error::OutOfInterval { value: mu, lo: -1.0, hi: 1.0 });
            }
            let r = (1.0 - mu * mu).sqrt();
            Ok(SpherePoint {
                x: r * theta.cos(),
                y: r * theta.sin(),
                z: mu,
            })
        })
        .collect()
}
