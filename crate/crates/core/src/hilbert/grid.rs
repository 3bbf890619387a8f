use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

/// Smallest grid the laboratory accepts.
pub const MIN_POINTS: usize = 16;

/// Uniform grid on `[z_min, z_max]` including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    z_min: f64,
    z_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        ensure(z_min.is_finite() && z_max.is_finite(), || {
            format!("grid bounds must be finite, got [{z_min}, {z_max}]")
        })?;
        ensure(z_min < z_max, || format!("grid needs z_min < z_max, got [{z_min}, {z_max}]"))?;
        ensure(n_points >= MIN_POINTS, || {
            format!("grid needs at least {MIN_POINTS} points, got {n_points}")
        })?;
        Ok(Self {
            z_min,
            z_max,
            n_points,
        })
    }

    /// Default grid for states centred around `a` and `b`: the domain
    /// `±8·max(|a|, |b|)` with 4096 points.
    pub fn default_for(a: f64, b: f64) -> Result<Self> {
        let half = 8.0 * a.abs().max(b.abs());
        Self::new(-half, half, 4096)
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.z_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let dz = self.spacing();
        (0..self.n_points).map(move |i| self.z_min + dz * i as f64)
    }

    /// Trapezoid-rule weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_points {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    /// Trapezoid integral of real samples.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        self.spacing() * (inner + 0.5 * (values[0] + values[n - 1]))
    }

    pub fn contains(&self, z: f64) -> bool {
        self.z_min <= z && z <= self.z_max
    }
}

/// Complex samples on a grid with no normalization constraint (tangent
/// vectors, velocities, unnormalized superpositions).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        ensure(values.iter().all(|v| v.re.is_finite() && v.im.is_finite()), || {
            "grid function has non-finite samples".into()
        })?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        let d: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        self.grid.integrate(&d)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|ψ(z)|²` at every node.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise linear combination `Σ c_k f_k`.
    pub fn combine(terms: &[(Complex64, &GridFunction)]) -> Result<GridFunction> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
        let grid = first.grid;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (c, f) in terms {
            if f.grid != grid {
                return Err(Error::GridMismatch);
            }
            for (acc, v) in values.iter_mut().zip(&f.values) {
                *acc += c * v;
            }
        }
        GridFunction::new(grid, values)
    }

    /// Mass `∫|f|²` carried by nodes outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        self.grid
            .points()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (z, _))| *z < lo || *z > hi)
            .map(|(i, (_, v))| self.grid.weight(i) * v.norm_sqr())
            .sum()
    }
}

/// A unit-norm state on a grid, `Σ w_k |ψ_k|² = 1` with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction(GridFunction);

impl GridWavefunction {
    /// Normalizes `values` into a state. Fails on zero or non-finite input.
    pub fn from_amplitudes(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        Self::normalize(GridFunction::new(grid, values)?)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::normalize(GridFunction::from_fn(grid, f)?)
    }

    pub fn normalize(f: GridFunction) -> Result<Self> {
        let n = f.norm();
        ensure(n > 0.0 && n.is_finite(), || format!("cannot normalize function with norm {n}"))?;
        Ok(Self(f.scaled(Complex64::new(1.0 / n, 0.0))))
    }

    /// Normalized superposition `Σ c_k ψ_k`.
    pub fn superpose(terms: &[(Complex64, &GridWavefunction)]) -> Result<Self> {
        let parts: Vec<(Complex64, &GridFunction)> = terms.iter().map(|(c, s)| (*c, &s.0)).collect();
        Self::normalize(GridFunction::combine(&parts)?)
    }

    /// `e^{iθ}ψ`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self(self.0.scaled(Complex64::from_polar(1.0, theta)))
    }

    pub fn as_function(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_function(self) -> GridFunction {
        self.0
    }
}

impl Deref for GridWavefunction {
    type Target = GridFunction;

    fn deref(&self) -> &GridFunction {
        &self.0
    }
}

/// Trapezoid quadrature of `conj(ψ)·φ`.
pub fn inner_product(psi: &GridFunction, phi: &GridFunction) -> Result<Complex64> {
    if psi.grid != phi.grid {
        return Err(Error::GridMismatch);
    }
    let n = psi.values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 1..n - 1 {
        acc += psi.values[i].conj() * phi.values[i];
    }
    acc += 0.5 * (psi.values[0].conj() * phi.values[0] + psi.values[n - 1].conj() * phi.values[n - 1]);
    Ok(acc * psi.grid.spacing())
}

/// Fubini-Study distance `arccos|⟨ψ,φ⟩|` between the rays through `ψ` and
/// `φ`, in `[0, π/2]`.
///
/// Near-parallel states use `2·asin(‖φ − uψ‖/2)` with the phase `u` aligned,
/// which keeps small distances accurate.
pub fn fubini_study_distance(psi: &GridFunction, phi: &GridFunction) -> Result<f64> {
    let ov = inner_product(psi, phi)?;
    let (np, nf) = (psi.norm(), phi.norm());
    let c = (ov.norm() / (np * nf)).min(1.0);
    if c < 0.9 {
        return Ok(c.acos());
    }
    let u = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    let diff: Vec<Complex64> = psi
        .values
        .iter()
        .zip(&phi.values)
        .map(|(p, f)| f / nf - u * p / np)
        .collect();
    let chord = GridFunction::new(psi.grid, diff)?.norm();
    Ok(2.0 * (0.5 * chord).min(1.0).asin())
}

/// Squared norm of the component of `v` orthogonal to the unit state `phi`:
/// `‖v‖² − |⟨φ,v⟩|²`, the Fubini-Study squared length of a velocity.
pub fn projective_norm_sqr(phi: &GridWavefunction, v: &GridFunction) -> Result<f64> {
    let ov = inner_product(phi, v)?;
    Ok(v.norm_sqr() - ov.norm_sqr())
}
