//! Gaussian Unitary Ensemble sampling and random unitary walks of finite
//! dimensional states driven by independent GUE Hamiltonians.
//!
//! A sample is built as `H = (A + A†)/√2` with `A` having iid complex
//! normal entries whose real and imaginary parts have variance `d²`. The
//! off-diagonal entries of `H` then have real/imaginary variance `d²` and
//! the diagonal is real with variance `2d²`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Error, Result};
use crate::hilbert::{inner_product, projective_norm_sqr, tangent_s, tangent_tau, Grid, GridFunction, GridWavefunction};
use crate::rng::{stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GueParams {
    pub dim: usize,
    /// Standard deviation `d` of the real and imaginary parts of
    /// off-diagonal entries.
    pub scale: f64,
    pub seed: u64,
}

impl GueParams {
    pub fn new(dim: usize, scale: f64, seed: u64) -> Result<Self> {
        // dim = 1 is allowed: it degenerates to a single real normal sample
        ensure(dim >= 1, || "GUE dimension must be positive".into())?;
        ensure(scale > 0.0 && scale.is_finite(), || format!("GUE scale must be positive, got {scale}"))?;
        Ok(Self { dim, scale, seed })
    }

    pub fn rng(&self) -> StreamRng {
        stream(self.seed, 0)
    }

    /// Step time giving a root-mean-square Fubini-Study step of `angle`
    /// radians for small steps: `E[ρ²] ≈ 2d²(N − 1)·dt²`.
    pub fn step_time_for_rms_angle(&self, angle: f64) -> f64 {
        angle / (self.scale * (2.0 * (self.dim as f64 - 1.0)).sqrt())
    }
}

/// Default root-mean-square step angle of the unitary walk.
pub const DEFAULT_RMS_STEP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Wraps `m` after checking it equals its conjugate transpose exactly.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        ensure(m.is_square(), || "matrix must be square".into())?;
        ensure(m == m.adjoint(), || "matrix is not Hermitian".into())?;
        ensure(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()), || "non-finite entry".into())?;
        Ok(Self(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Conjugation `U†HU` by a unitary.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> HermitianMatrix {
        let m = u.adjoint() * &self.0 * u;
        // restore exact Hermiticity lost to rounding
        let h = (&m + m.adjoint()).map(|z| z * 0.5);
        HermitianMatrix(h)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::try_new(self.0.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }
}

pub fn sample_gue<R: Rng + ?Sized>(params: &GueParams, rng: &mut R) -> HermitianMatrix {
    let n = params.dim;
    let d = params.scale;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut normal = || -> f64 { rng.sample::<f64, _>(StandardNormal) };
    for i in 0..n {
        m[(i, i)] = Complex64::new(SQRT_2 * d * normal(), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(d * normal(), d * normal());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix(m)
}

/// Unit vector in `ℂ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Normalizes `v`.
    pub fn new(v: DVector<Complex64>) -> Result<Self> {
        let n = v.norm();
        ensure(n > 0.0 && n.is_finite(), || format!("cannot normalize vector of norm {n}"))?;
        Ok(Self(v.unscale(n)))
    }

    pub fn from_slice(v: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    /// Uniformly distributed (Haar) unit vector.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let v = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        Self::new(v).expect("gaussian vector is almost surely non-zero")
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Fubini-Study distance `arccos|⟨v,w⟩|`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        let c = self.0.dotc(&other.0).norm().min(1.0);
        if c < 0.9 {
            return c.acos();
        }
        let ov = self.0.dotc(&other.0);
        let u = ov / ov.norm();
        let chord = (&other.0 - self.0.map(|z| z * u)).norm();
        2.0 * (0.5 * chord).min(1.0).asin()
    }
}

/// `exp(−iH·dt)·v` by spectral decomposition.
pub fn evolve_step(v: &StateVector, h: &HermitianMatrix, dt: f64) -> Result<StateVector> {
    if v.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: v.dim(),
        });
    }
    ensure(dt > 0.0 && dt.is_finite(), || format!("dt must be positive, got {dt}"))?;
    let eig = SymmetricEigen::try_new(h.0.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let u = &eig.eigenvectors;
    let mut coeff = u.adjoint() * &v.0;
    for (c, lam) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= Complex64::from_polar(1.0, -lam * dt);
    }
    Ok(StateVector(u * coeff))
}

/// Walk of `v0` under a fresh, independent GUE Hamiltonian at every step.
/// Returns `steps + 1` states starting with `v0`.
pub fn rm_walk(v0: &StateVector, steps: usize, dt: f64, params: &GueParams) -> Result<Vec<StateVector>> {
    if v0.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            actual: v0.dim(),
        });
    }
    let mut rng = params.rng();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(v0.clone());
    for _ in 0..steps {
        let h = sample_gue(params, &mut rng);
        let next = evolve_step(out.last().expect("non-empty"), &h, dt)?;
        out.push(next);
    }
    Ok(out)
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix with the phases of `R`'s diagonal absorbed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// Wigner surmise for β = 2, `p(s) = (32/π²)s²·e^{−4s²/π}`.
pub fn wigner_surmise_pdf(s: f64) -> f64 {
    32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp()
}

/// CDF of the β = 2 Wigner surmise, `erf(2s/√π) − (4s/π)e^{−4s²/π}`.
pub fn wigner_surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    statrs::function::erf::erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
}

/// Nearest-neighbour spacings of the central half of a GUE spectrum,
/// unfolded with the semicircle counting function (radius `2d·√(2N)`).
/// Spacings are in units of the local mean level spacing.
pub fn unfolded_spacings(eigenvalues: &[f64], scale: f64) -> Vec<f64> {
    let n = eigenvalues.len();
    let r = 2.0 * scale * (2.0 * n as f64).sqrt();
    let counting = |x: f64| {
        let u = (x / r).clamp(-1.0, 1.0);
        n as f64 * (0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI)
    };
    let lo = n / 4;
    let hi = (3 * n) / 4;
    eigenvalues[lo..hi.max(lo + 1).min(n)]
        .windows(2)
        .map(|w| counting(w[1]) - counting(w[0]))
        .collect()
}

/// Orthonormal frame on the grid whose first three vectors span `φ` and its
/// two manifold tangents; the rest are Gram-Schmidt-orthogonalized random
/// smooth Gaussians.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub vectors: Vec<GridFunction>,
    /// `⟨t̂_τ, e_k⟩` for the normalized horizontal τ-tangent.
    pub tau_coeffs: Vec<Complex64>,
    /// `⟨t̂_s, e_k⟩` for the normalized horizontal s-tangent.
    pub s_coeffs: Vec<Complex64>,
}

pub const DEFAULT_FRAME_SIZE: usize = 32;

const GRAM_SCHMIDT_FLOOR: f64 = 1e-6;

fn horizontal_unit(phi: &GridWavefunction, t: &GridFunction) -> Result<GridFunction> {
    let norm = projective_norm_sqr(phi, t)?.max(0.0).sqrt();
    if norm < 1e-12 {
        return Err(Error::FrameDegeneracy { norm });
    }
    let ov = inner_product(phi, t)?;
    let h = GridFunction::combine(&[(Complex64::new(1.0, 0.0), t), (-ov, phi)])?;
    Ok(h.scaled(Complex64::new(1.0 / norm, 0.0)))
}

fn orthogonalize(v: &GridFunction, frame: &[GridFunction]) -> Result<GridFunction> {
    let mut w = v.clone();
    // two passes for numerical orthogonality
    for _ in 0..2 {
        for e in frame {
            let c = inner_product(e, &w)?;
            w = GridFunction::combine(&[(Complex64::new(1.0, 0.0), &w), (-c, e)])?;
        }
    }
    Ok(w)
}

impl TangentFrame {
    pub fn build<R: Rng + ?Sized>(phi: &GridWavefunction, size: usize, rng: &mut R) -> Result<Self> {
        ensure(size >= 3, || format!("frame needs at least 3 vectors, got {size}"))?;
        let t_tau = horizontal_unit(phi, &tangent_tau(phi))?;
        let t_s = horizontal_unit(phi, &tangent_s(phi)?)?;
        let grid: Grid = *phi.grid();
        let mut vectors: Vec<GridFunction> = vec![phi.as_function().clone()];
        let push = |v: &GridFunction, vectors: &mut Vec<GridFunction>| -> Result<bool> {
            let w = orthogonalize(v, vectors)?;
            let n = w.norm();
            if n < GRAM_SCHMIDT_FLOOR * v.norm() {
                return Ok(false);
            }
            vectors.push(w.scaled(Complex64::new(1.0 / n, 0.0)));
            Ok(true)
        };
        for t in [&t_tau, &t_s] {
            if !push(t, &mut vectors)? {
                return Err(Error::FrameDegeneracy { norm: 0.0 });
            }
        }
        let len = grid.z_max() - grid.z_min();
        let min_w = 8.0 * grid.spacing();
        let max_w = (0.04 * len).max(min_w * 1.5);
        let mut attempts = 0;
        while vectors.len() < size {
            attempts += 1;
            if attempts > 50 * size {
                return Err(Error::FrameDegeneracy { norm: 0.0 });
            }
            let c = grid.z_min() + len * rng.random_range(0.25..0.75);
            let w = rng.random_range(min_w..max_w);
            let k = rng.random_range(-1.0..1.0) / w;
            let v = GridFunction::from_fn(grid, |z| {
                Complex64::from_polar((-(z - c).powi(2) / (4.0 * w * w)).exp(), k * z)
            })?;
            push(&v, &mut vectors)?;
        }
        let tau_coeffs = vectors.iter().map(|e| inner_product(&t_tau, e)).collect::<Result<_>>()?;
        let s_coeffs = vectors.iter().map(|e| inner_product(&t_s, e)).collect::<Result<_>>()?;
        Ok(Self {
            vectors,
            tau_coeffs,
            s_coeffs,
        })
    }

    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    /// Components `(Re⟨t̂_τ, δφ⟩, Re⟨t̂_s, δφ⟩)` of the step
    /// `δφ = −i·dt·H·φ`, with `H` acting on frame coordinates.
    pub fn project_step(&self, h: &HermitianMatrix, dt: f64) -> (f64, f64) {
        let mut dtau = 0.0;
        let mut ds = 0.0;
        for k in 0..self.size() {
            let step = Complex64::new(0.0, -dt) * h.get(k, 0);
            dtau += (self.tau_coeffs[k] * step).re;
            ds += (self.s_coeffs[k] * step).re;
        }
        (dtau, ds)
    }
}

/// Samples `(dτ, ds)` components of GUE-driven steps from `phi`.
pub fn induced_manifold_steps(
    phi: &GridWavefunction,
    frame_size: usize,
    dt: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    ensure(dt > 0.0, || format!("dt must be positive, got {dt}"))?;
    let mut frame_rng = stream(seed, 0);
    let frame = TangentFrame::build(phi, frame_size, &mut frame_rng)?;
    let params = GueParams::new(frame.size(), 1.0, seed)?;
    let mut rng = stream(seed, 1);
    Ok((0..n_samples)
        .map(|_| frame.project_step(&sample_gue(&params, &mut rng), dt))
        .collect())
}
