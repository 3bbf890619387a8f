//! Crank-Nicolson solver for `∂u/∂t = 𝔻·∂²u/∂z²` on a truncated line or on
//! an interval with absorbing ends, and the comparison of walk histograms
//! against its solutions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::hilbert::calculus::integrate_linear;
use crate::hilbert::{Grid, GridWavefunction};
use crate::stats::Histogram;

/// Largest `𝔻·dt/dz²` for which Crank-Nicolson keeps densities
/// non-negative.
pub const MAX_MESH_RATIO: f64 = 1.0;

/// Interior mass below which an interval problem counts as fully absorbed.
pub const ABSORBED_THRESHOLD: f64 = 1e-3;

/// Standard deviation, in grid spacings, of the kernel that stands in for a
/// point source at the start time.
const SOURCE_WIDTH_IN_SPACINGS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// A window of the real line, wide enough that no mass reaches its
    /// edges. Edges are zero-flux, so mass is conserved exactly.
    WholeLine { z_min: f64, z_max: f64 },
    /// `[a, b]` with absorbing ends.
    Interval { a: f64, b: f64 },
}

impl Domain {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::WholeLine { z_min, z_max } => (z_min, z_max),
            Domain::Interval { a, b } => (a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub position: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionProblem {
    pub diffusion_coefficient: f64,
    pub domain: Domain,
    pub sources: Vec<Source>,
    pub t_final: f64,
    pub n_points: usize,
    /// Time step. `None` picks the largest step allowed by
    /// [`MAX_MESH_RATIO`].
    pub dt: Option<f64>,
}

impl DiffusionProblem {
    pub fn new(diffusion_coefficient: f64, domain: Domain, sources: Vec<Source>, t_final: f64, n_points: usize) -> Self {
        Self {
            diffusion_coefficient,
            domain,
            sources,
            t_final,
            n_points,
            dt: None,
        }
    }

    /// Single unit source at `c`.
    pub fn point(diffusion_coefficient: f64, domain: Domain, c: f64, t_final: f64, n_points: usize) -> Self {
        Self::new(diffusion_coefficient, domain, vec![Source { position: c, weight: 1.0 }], t_final, n_points)
    }

    pub fn grid(&self) -> Result<Grid> {
        let (lo, hi) = self.domain.bounds();
        Grid::new(lo, hi, self.n_points)
    }

    fn validate(&self) -> Result<()> {
        let d = self.diffusion_coefficient;
        ensure(d > 0.0 && d.is_finite(), || format!("diffusion coefficient must be positive, got {d}"))?;
        ensure(!self.sources.is_empty(), || "need at least one source".into())?;
        let total: f64 = self.sources.iter().map(|s| s.weight).sum();
        ensure(self.sources.iter().all(|s| s.weight >= 0.0), || "source weights must be non-negative".into())?;
        ensure((total - 1.0).abs() < 1e-12, || format!("source weights must sum to 1, got {total}"))?;
        let (lo, hi) = self.domain.bounds();
        for s in &self.sources {
            match self.domain {
                Domain::Interval { .. } if s.position <= lo || s.position >= hi => {
                    return Err(Error::SourceOnBoundary(s.position));
                }
                _ if !(lo..=hi).contains(&s.position) => {
                    return Err(Error::OutOfInterval {
                        value: s.position,
                        lo,
                        hi,
                    });
                }
                _ => {}
            }
        }
        ensure(self.t_final.is_finite() && self.t_final > 0.0, || {
            format!("t_final must be positive, got {}", self.t_final)
        })?;
        Ok(())
    }
}

/// Free heat kernel `exp(−(x−c)²/(4𝔻t))/√(4π𝔻t)`.
pub fn heat_kernel(x: f64, c: f64, diffusion_coefficient: f64, t: f64) -> f64 {
    let var = 2.0 * diffusion_coefficient * t;
    (-(x - c).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Absorbing-boundary kernel on `[a, b]` by the method of images.
pub fn interval_kernel(x: f64, c: f64, a: f64, b: f64, diffusion_coefficient: f64, t: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    let len = b - a;
    let sd = (2.0 * diffusion_coefficient * t).sqrt();
    let k_max = (10.0 * sd / (2.0 * len)).ceil() as i64 + 1;
    (-k_max..=k_max)
        .map(|k| {
            let shift = 2.0 * len * k as f64;
            heat_kernel(x, c + shift, diffusion_coefficient, t)
                - heat_kernel(x, 2.0 * a - c + shift, diffusion_coefficient, t)
        })
        .sum()
}

/// Density on a grid with exact integrals of its linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DensityProfile {
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        integrate_linear(self.grid.z_min(), self.grid.spacing(), &self.values, lo, hi)
    }

    pub fn mean(&self) -> f64 {
        let first: Vec<f64> = self.grid.points().zip(&self.values).map(|(z, u)| z * u).collect();
        self.grid.integrate(&first) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let second: Vec<f64> = self.grid.points().zip(&self.values).map(|(z, u)| (z - m).powi(2) * u).collect();
        self.grid.integrate(&second) / self.mass()
    }
}

/// Mass absorbed at each end of an interval problem.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AbsorbedLedger {
    pub at_a: f64,
    pub at_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSolution {
    pub density: DensityProfile,
    pub ledger: AbsorbedLedger,
    pub time: f64,
}

impl DiffusionSolution {
    pub fn interior_mass(&self) -> f64 {
        self.density.mass()
    }
}

/// Factored tridiagonal matrix for repeated solves.
#[derive(Debug, Clone)]
struct Tridiagonal {
    sub: Vec<f64>,
    c: Vec<f64>,
    m: Vec<f64>,
}

impl Tridiagonal {
    fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        let n = diag.len();
        let mut c = vec![0.0; n];
        let mut m = vec![0.0; n];
        m[0] = diag[0];
        c[0] = sup[0] / m[0];
        for i in 1..n {
            m[i] = diag[i] - sub[i] * c[i - 1];
            c[i] = if i + 1 < n { sup[i] / m[i] } else { 0.0 };
        }
        Self { sub, c, m }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] /= self.m[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) / self.m[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c[i] * rhs[i + 1];
        }
    }
}

/// Left-hand Crank-Nicolson matrix `I − (r/2)·L`. Whole-line windows use
/// ghost-node reflection at both edges.
fn cn_matrix(n: usize, r: f64, whole: bool) -> Tridiagonal {
    let (mut sub, diag, mut sup) = (vec![-0.5 * r; n], vec![1.0 + r; n], vec![-0.5 * r; n]);
    if whole {
        sup[0] = -r;
        sub[n - 1] = -r;
    }
    sub[0] = 0.0;
    sup[n - 1] = 0.0;
    Tridiagonal::new(sub, diag, sup)
}

/// Time stepper. For interval domains the unknowns are the interior nodes
/// and the end values are held at zero.
#[derive(Debug, Clone)]
pub struct DiffusionSolver {
    problem: DiffusionProblem,
    grid: Grid,
    u: Vec<f64>,
    ratio: f64,
    dt: f64,
    time: f64,
    ledger: AbsorbedLedger,
    lhs: Tridiagonal,
}

impl DiffusionSolver {
    pub fn new(problem: DiffusionProblem) -> Result<Self> {
        problem.validate()?;
        let grid = problem.grid()?;
        let dz = grid.spacing();
        let coef = problem.diffusion_coefficient;
        let sd0 = SOURCE_WIDTH_IN_SPACINGS * dz;
        let t0 = sd0 * sd0 / (2.0 * coef);
        ensure(problem.t_final > t0, || {
            format!("t_final {} is shorter than the source start time {t0}; refine the grid", problem.t_final)
        })?;
        let dt = problem.dt.unwrap_or(MAX_MESH_RATIO * dz * dz / coef);
        ensure(dt > 0.0 && dt.is_finite(), || format!("dt must be positive, got {dt}"))?;
        let ratio = coef * dt / (dz * dz);
        if ratio > MAX_MESH_RATIO * (1.0 + 1e-12) {
            return Err(Error::Instability(format!(
                "mesh ratio D*dt/dz^2 = {ratio} exceeds {MAX_MESH_RATIO}"
            )));
        }
        let (u, ledger) = initial_density(&problem, &grid, t0);
        let whole = matches!(problem.domain, Domain::WholeLine { .. });
        let lhs = cn_matrix(u.len(), ratio, whole);
        Ok(Self {
            grid,
            u,
            ratio,
            dt,
            time: t0,
            ledger,
            lhs,
            problem,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn ledger(&self) -> AbsorbedLedger {
        self.ledger
    }

    fn apply_rhs(&self, out: &mut [f64], r: f64) {
        let u = &self.u;
        let n = u.len();
        let whole = matches!(self.problem.domain, Domain::WholeLine { .. });
        for i in 0..n {
            let left = if i > 0 { u[i - 1] } else if whole { u[1] } else { 0.0 };
            let right = if i + 1 < n { u[i + 1] } else if whole { u[n - 2] } else { 0.0 };
            out[i] = u[i] + 0.5 * r * (left - 2.0 * u[i] + right);
        }
    }

    fn step_with(&mut self, r: f64, lhs: &Tridiagonal) {
        let mut next = vec![0.0; self.u.len()];
        self.apply_rhs(&mut next, r);
        lhs.solve(&mut next);
        if let Domain::Interval { .. } = self.problem.domain {
            // flux through each end, exact for the discrete scheme
            let n = next.len();
            let dz = self.grid.spacing();
            self.ledger.at_a += dz * 0.5 * r * (next[0] + self.u[0]);
            self.ledger.at_b += dz * 0.5 * r * (next[n - 1] + self.u[n - 1]);
        }
        self.u = next;
    }

    /// Advances by one full time step.
    pub fn step(&mut self) {
        let lhs = self.lhs.clone();
        self.step_with(self.ratio, &lhs);
        self.time += self.dt;
    }

    /// Advances to exactly `t`, shortening the last step if needed.
    pub fn advance_to(&mut self, t: f64) {
        while self.time + self.dt <= t * (1.0 + 1e-14) {
            self.step();
        }
        let rest = t - self.time;
        if rest > 1e-12 * self.dt {
            let r = self.ratio * rest / self.dt;
            let whole = matches!(self.problem.domain, Domain::WholeLine { .. });
            let lhs = cn_matrix(self.u.len(), r, whole);
            self.step_with(r, &lhs);
            self.time = t;
        }
    }

    pub fn solution(&self) -> DiffusionSolution {
        let values = match self.problem.domain {
            Domain::WholeLine { .. } => self.u.clone(),
            Domain::Interval { .. } => {
                let mut v = Vec::with_capacity(self.u.len() + 2);
                v.push(0.0);
                v.extend_from_slice(&self.u);
                v.push(0.0);
                v
            }
        };
        DiffusionSolution {
            density: DensityProfile { grid: self.grid, values },
            ledger: self.ledger,
            time: self.time,
        }
    }
}

/// Sum of source kernels at the start time. Whole-line kernels are
/// normalized to unit discrete mass. Interval kernels keep their absorbing
/// image form and the mass already lost is booked to the nearer end, since
/// the far end's share is of order `erfc(L/σ₀)`.
fn initial_density(problem: &DiffusionProblem, grid: &Grid, t0: f64) -> (Vec<f64>, AbsorbedLedger) {
    let coef = problem.diffusion_coefficient;
    let dz = grid.spacing();
    let mut ledger = AbsorbedLedger::default();
    match problem.domain {
        Domain::WholeLine { .. } => {
            let mut u = vec![0.0; grid.len()];
            for src in &problem.sources {
                let k: Vec<f64> = grid.points().map(|x| heat_kernel(x, src.position, coef, t0)).collect();
                let mass = grid.integrate(&k);
                for (ui, ki) in u.iter_mut().zip(&k) {
                    *ui += src.weight * ki / mass;
                }
            }
            (u, ledger)
        }
        Domain::Interval { a, b } => {
            let nodes: Vec<f64> = grid.points().skip(1).take(grid.len() - 2).collect();
            let mut u = vec![0.0; nodes.len()];
            for src in &problem.sources {
                let k: Vec<f64> = nodes
                    .iter()
                    .map(|&x| interval_kernel(x, src.position, a, b, coef, t0).max(0.0))
                    .collect();
                let mass = dz * k.iter().sum::<f64>();
                let scale = mass.max(1.0);
                let lost = (1.0 - mass).max(0.0);
                if src.position - a <= b - src.position {
                    ledger.at_a += src.weight * lost;
                } else {
                    ledger.at_b += src.weight * lost;
                }
                for (ui, ki) in u.iter_mut().zip(&k) {
                    *ui += src.weight * ki / scale;
                }
            }
            (u, ledger)
        }
    }
}

/// Density at `t_final` and the absorbed-mass ledger.
pub fn solve(problem: &DiffusionProblem) -> Result<DiffusionSolution> {
    let mut s = DiffusionSolver::new(problem.clone())?;
    s.advance_to(problem.t_final);
    Ok(s.solution())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splitting {
    pub p_a: f64,
    pub p_b: f64,
    /// Time at which the interior mass dropped below the threshold.
    pub time: f64,
    /// Interior mass left at that time, apportioned by harmonic measure.
    pub residual: f64,
}

/// Absorption probabilities at the ends of `[a, b]` for a walker started at
/// `c`. Steps until the interior mass falls below [`ABSORBED_THRESHOLD`];
/// the residue is split linearly in position, which is the exact harmonic
/// measure of the interval.
pub fn splitting_probabilities(
    a: f64,
    b: f64,
    c: f64,
    diffusion_coefficient: f64,
    n_points: usize,
    t_max: f64,
) -> Result<Splitting> {
    let problem = DiffusionProblem::point(diffusion_coefficient, Domain::Interval { a, b }, c, t_max, n_points);
    let mut s = DiffusionSolver::new(problem)?;
    let dz = s.grid.spacing();
    loop {
        let interior = dz * s.u.iter().sum::<f64>();
        if interior < ABSORBED_THRESHOLD {
            let sol = s.solution();
            let toward_b = if interior > 0.0 { (sol.density.mean() - a) / (b - a) } else { 0.0 };
            return Ok(Splitting {
                p_a: s.ledger.at_a + interior * (1.0 - toward_b),
                p_b: s.ledger.at_b + interior * toward_b,
                time: s.time,
                residual: interior,
            });
        }
        if s.time + s.dt > t_max {
            return Err(Error::NonConvergence {
                absorbed: 1.0 - interior,
                required: 1.0 - ABSORBED_THRESHOLD,
            });
        }
        s.step();
    }
}

/// Interval state `r_{c,σ}`: square root of the absorbing-boundary solution
/// with `𝔻 = 1/2` at `t = σ²`, so the free-space variance is `σ²`.
pub fn interval_state(c: f64, sigma: f64, a: f64, b: f64, n_points: usize) -> Result<GridWavefunction> {
    ensure(sigma > 0.0 && sigma.is_finite(), || format!("sigma must be positive, got {sigma}"))?;
    let problem = DiffusionProblem::point(0.5, Domain::Interval { a, b }, c, sigma * sigma, n_points);
    let sol = solve(&problem)?;
    let amps = sol
        .density
        .values
        .iter()
        .map(|&u| Complex64::new(u.max(0.0).sqrt(), 0.0))
        .collect();
    GridWavefunction::from_amplitudes(sol.density.grid, amps)
}

/// Diffusion coefficient matching a walk with per-step variance `var`.
pub fn matched_coefficient(step_variance: f64) -> f64 {
    0.5 * step_variance
}

/// L1 distance between histogram bin masses and a reference that gives the
/// mass of any interval; mass outside the histogram range is compared as
/// one extra bin.
pub fn compare_histogram(hist: &Histogram, reference: impl Fn(f64, f64) -> f64) -> Result<f64> {
    ensure(hist.total() > 0, || "histogram is empty".into())?;
    let edges = hist.edges();
    let masses = hist.masses();
    let mut inside = 0.0;
    let mut l1 = 0.0;
    for (w, m) in edges.windows(2).zip(&masses) {
        let r = reference(w[0], w[1]);
        inside += r;
        l1 += (m - r).abs();
    }
    l1 += (hist.outside_mass() - (1.0 - inside).max(0.0)).abs();
    Ok(l1.min(2.0))
}

/// [`compare_histogram`] against a density on a grid. The grid must resolve
/// the bins and overlap the histogram range.
pub fn compare_histogram_density(hist: &Histogram, density: &DensityProfile) -> Result<f64> {
    let g = density.grid;
    if g.spacing() > hist.bin_width() || g.z_max() <= hist.lo || g.z_min() >= hist.hi {
        return Err(Error::BinningMismatch { lo: hist.lo, hi: hist.hi });
    }
    let total = density.mass();
    compare_histogram(hist, |lo, hi| density.mass_between(lo, hi) / total)
}
