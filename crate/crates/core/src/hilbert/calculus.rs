//! Grid calculus: derivatives, cubic-spline interpolation, interval
//! integrals of the linear interpolant and a constant coefficient
//! tridiagonal solver.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Spectral differentiation is used when the grid size is a power of two,
/// fourth-order central differences otherwise.
pub fn derivative(values: &[Complex64], dz: f64) -> Vec<Complex64> {
    if values.len().is_power_of_two() {
        spectral_derivative(values, dz, 1)
    } else {
        central_derivative(values, dz)
    }
}

pub fn second_derivative(values: &[Complex64], dz: f64) -> Vec<Complex64> {
    if values.len().is_power_of_two() {
        spectral_derivative(values, dz, 2)
    } else {
        central_second_derivative(values, dz)
    }
}

/// Angular wavenumbers in FFT order.
pub fn wavenumbers(n: usize, dz: f64) -> Vec<f64> {
    let l = n as f64 * dz;
    (0..n)
        .map(|j| {
            let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * jj / l
        })
        .collect()
}

/// Applies the Fourier multiplier `mult(k)` to `values`.
pub fn fourier_multiply(values: &[Complex64], dz: f64, mult: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    for (b, k) in buf.iter_mut().zip(wavenumbers(n, dz)) {
        *b *= mult(k);
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|b| *b *= scale);
    buf
}

fn spectral_derivative(values: &[Complex64], dz: f64, order: u32) -> Vec<Complex64> {
    let n = values.len();
    let nyquist = 2.0 * PI * (n / 2) as f64 / (n as f64 * dz);
    fourier_multiply(values, dz, |k| {
        // the Nyquist mode has no well-defined odd derivative
        if order % 2 == 1 && (k - nyquist).abs() < 1e-9 * nyquist {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, k).powu(order)
    })
}

fn central_derivative(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n.saturating_sub(2) {
        d[i] = (y[i - 2] - y[i - 1] * 8.0 + y[i + 1] * 8.0 - y[i + 2]) / (12.0 * h);
    }
    if n >= 3 {
        d[1] = (y[2] - y[0]) / (2.0 * h);
        d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * h);
        d[0] = (y[1] - y[0]) / h;
        d[n - 1] = (y[n - 1] - y[n - 2]) / h;
    }
    d
}

fn central_second_derivative(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let h2 = h * h;
    for i in 2..n.saturating_sub(2) {
        d[i] = (-y[i - 2] + y[i - 1] * 16.0 - y[i] * 30.0 + y[i + 1] * 16.0 - y[i + 2]) / (12.0 * h2);
    }
    if n >= 3 {
        d[1] = (y[0] - y[1] * 2.0 + y[2]) / h2;
        d[n - 2] = (y[n - 3] - y[n - 2] * 2.0 + y[n - 1]) / h2;
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    d
}

/// Solves a tridiagonal system with constant coefficients
/// `sub·x[i-1] + diag·x[i] + sup·x[i+1] = rhs[i]` in place (Thomas algorithm).
pub fn solve_tridiagonal_constant<T>(sub: f64, diag: f64, sup: f64, rhs: &mut [T])
where
    T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = rhs.len();
    if n == 0 {
        return;
    }
    let mut c = vec![0.0; n];
    c[0] = sup / diag;
    rhs[0] = rhs[0] * (1.0 / diag);
    for i in 1..n {
        let m = diag - sub * c[i - 1];
        c[i] = sup / m;
        rhs[i] = (rhs[i] - rhs[i - 1] * sub) * (1.0 / m);
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - rhs[i + 1] * c[i];
    }
}

/// Integral over `[lo, hi]` of the piecewise-linear interpolant of samples
/// at `x0 + i·h`. The interpolant is zero outside the sampled range.
pub fn integrate_linear<T>(x0: f64, h: f64, values: &[T], lo: f64, hi: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    let x_last = x0 + h * (n - 1) as f64;
    let (lo, hi) = (lo.max(x0), hi.min(x_last));
    let mut acc = T::default();
    if n < 2 || hi <= lo {
        return acc;
    }
    let at = |j: usize, x: f64| {
        let t = ((x - x0) / h - j as f64).clamp(0.0, 1.0);
        values[j] * (1.0 - t) + values[j + 1] * t
    };
    let first = (((lo - x0) / h).floor() as usize).min(n - 2);
    let last = (((hi - x0) / h).floor() as usize).min(n - 2);
    for j in first..=last {
        let l = lo.max(x0 + h * j as f64);
        let r = hi.min(x0 + h * (j + 1) as f64);
        if r > l {
            acc = acc + (at(j, l) + at(j, r)) * (0.5 * (r - l));
        }
    }
    acc
}

/// Natural cubic spline through complex samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<Complex64>,
    m: Vec<Complex64>,
}

impl CubicSpline {
    pub fn new(x0: f64, h: f64, y: &[Complex64]) -> Self {
        let n = y.len();
        assert!(n >= 3, "spline needs at least 3 samples");
        let mut m = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs: Vec<Complex64> = (1..n - 1)
            .map(|i| (y[i - 1] - y[i] * 2.0 + y[i + 1]) * (6.0 / (h * h)))
            .collect();
        solve_tridiagonal_constant(1.0, 4.0, 1.0, &mut rhs);
        m[1..n - 1].copy_from_slice(&rhs);
        Self {
            x0,
            h,
            y: y.to_vec(),
            m,
        }
    }

    /// Value at `x`; zero outside the sampled interval.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.y.len();
        let u = (x - self.x0) / self.h;
        let last = (n - 1) as f64;
        if !(u >= -1e-9 && u <= last + 1e-9) {
            return Complex64::new(0.0, 0.0);
        }
        let u = u.clamp(0.0, last);
        let i = (u.floor() as usize).min(n - 2);
        let t = u - i as f64;
        let s = 1.0 - t;
        let h2 = self.h * self.h / 6.0;
        self.y[i] * s
            + self.y[i + 1] * t
            + (self.m[i] * (s * s * s - s) + self.m[i + 1] * (t * t * t - t)) * h2
    }
}
