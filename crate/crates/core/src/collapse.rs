//! Random walk on the `(τ, s)` coordinates of the translated/squeezed
//! manifold, with drift in `s`, a reflecting bound on the spread and
//! absorbing slits in `τ`.
//!
//! `τ` is the mean position `μ_z` of the state and `s` the log squeeze, so
//! the spread is `δ_z = e^{−s}·δ_{z0}`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::rng::stream;
use crate::stats::{binomial_interval, Histogram, Interval};

/// Trajectories longer than this are thinned by doubling the stride.
pub const TRAJECTORY_LIMIT: usize = 100_000;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDistribution {
    /// `±step` with equal probability.
    Fixed,
    /// Centred normal with standard deviation `step`.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbMode {
    /// A slit absorbs only once the spread is below `delta_detect`;
    /// otherwise `τ` is reflected back into the interval.
    Joint,
    /// A slit absorbs as soon as `τ` reaches it.
    TauOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    SlitA,
    SlitB,
    None,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::SlitA => "slit_a",
            Outcome::SlitB => "slit_b",
            Outcome::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub a: f64,
    pub b: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub step_tau: f64,
    pub step_s: f64,
    pub drift_h: f64,
    pub delta_detect: f64,
    pub step_distribution: StepDistribution,
    pub max_steps: u64,
    pub seed: u64,
    /// Spread at which `s` is reflected. `None` leaves `s` unbounded.
    pub reflect_at: Option<f64>,
    pub absorb_mode: AbsorbMode,
}

impl WalkConfig {
    /// Unit steps, drift 1/2, detector resolution 1 and reflection at the
    /// initial spread.
    pub fn new(a: f64, b: f64, alpha_sq: f64) -> Result<Self> {
        let mut cfg = Self {
            a,
            b,
            alpha_sq,
            beta_sq: 1.0 - alpha_sq,
            step_tau: 1.0,
            step_s: 1.0,
            drift_h: 0.5,
            delta_detect: 1.0,
            step_distribution: StepDistribution::Fixed,
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
            reflect_at: None,
            absorb_mode: AbsorbMode::Joint,
        };
        cfg.reflect_at = Some(cfg.initial_delta());
        cfg.validate()?;
        Ok(cfg)
    }

    /// The double-slit setting `a = −10`, `b = 10`, `|α|² = 1/4`.
    pub fn double_slit() -> Self {
        Self::new(-10.0, 10.0, 0.25).expect("double-slit parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.alpha_sq, self.beta_sq, self.step_tau, self.step_s, self.drift_h, self.delta_detect];
        ensure(finite.iter().all(|x| x.is_finite()), || "walk parameters must be finite".into())?;
        ensure(self.a < self.b, || format!("need a < b, got a={} b={}", self.a, self.b))?;
        ensure((0.0..=1.0).contains(&self.alpha_sq) && (0.0..=1.0).contains(&self.beta_sq), || {
            "weights must lie in [0, 1]".into()
        })?;
        ensure((self.alpha_sq + self.beta_sq - 1.0).abs() <= 1e-12, || {
            format!("weights must sum to 1, got {}", self.alpha_sq + self.beta_sq)
        })?;
        ensure(self.step_tau > 0.0 && self.step_s >= 0.0, || "step sizes must be positive".into())?;
        ensure(self.drift_h >= 0.0, || format!("drift must be non-negative, got {}", self.drift_h))?;
        ensure(self.delta_detect > 0.0 && self.delta_detect < 0.5 * (self.b - self.a), || {
            format!("delta_detect must lie in (0, (b-a)/2), got {}", self.delta_detect)
        })?;
        if let Some(r) = self.reflect_at {
            ensure(r > 0.0 && r.is_finite(), || format!("reflect_at must be positive, got {r}"))?;
        }
        Ok(())
    }

    pub fn initial_tau(&self) -> f64 {
        self.alpha_sq * self.a + self.beta_sq * self.b
    }

    pub fn initial_delta(&self) -> f64 {
        (self.alpha_sq * self.beta_sq).sqrt() * (self.b - self.a)
    }

    pub fn delta_z(&self, s: f64) -> f64 {
        (-s).exp() * self.initial_delta()
    }

    /// Value of `s` below which the walk is folded back, if any.
    fn reflect_s(&self) -> Option<f64> {
        let d0 = self.initial_delta();
        self.reflect_at.filter(|_| d0 > 0.0).map(|r| (d0 / r).ln())
    }

    /// Affine image `z ↦ factor·z + offset` of the position scales. The
    /// `s` walk is dimensionless and unchanged.
    pub fn rescaled(&self, factor: f64, offset: f64) -> Result<Self> {
        ensure(factor > 0.0 && factor.is_finite(), || format!("scale factor must be positive, got {factor}"))?;
        let cfg = Self {
            a: factor * self.a + offset,
            b: factor * self.b + offset,
            step_tau: factor * self.step_tau,
            delta_detect: factor * self.delta_detect,
            reflect_at: self.reflect_at.map(|r| factor * r),
            ..self.clone()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkState {
    pub tau: f64,
    pub s: f64,
}

fn draw<R: Rng + ?Sized>(dist: StepDistribution, step: f64, rng: &mut R) -> f64 {
    match dist {
        StepDistribution::Fixed => {
            if rng.random_bool(0.5) {
                step
            } else {
                -step
            }
        }
        StepDistribution::Normal => step * rng.sample::<f64, _>(StandardNormal),
    }
}

/// One step `τ' = τ + ξ`, `s' = s + h + η`, folding `s` at the reflecting
/// bound. Boundaries in `τ` are left to the caller.
pub fn walk_step<R: Rng + ?Sized>(state: WalkState, cfg: &WalkConfig, rng: &mut R) -> WalkState {
    let xi = draw(cfg.step_distribution, cfg.step_tau, rng);
    let eta = draw(cfg.step_distribution, cfg.step_s, rng);
    let tau = state.tau + xi;
    let mut s = state.s + cfg.drift_h + eta;
    if let Some(floor) = cfg.reflect_s() {
        if s < floor {
            s = 2.0 * floor - s;
        }
    }
    WalkState { tau, s }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: u64,
    pub tau: f64,
    pub s: f64,
    pub mu_z: f64,
    pub delta_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub absorbed_at: Outcome,
    pub steps_taken: u64,
    /// Whether the spread was below `delta_detect` at the last step. Always
    /// true for slit outcomes in joint mode.
    pub localized: bool,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl WalkOutcome {
    pub fn final_point(&self) -> &TrajectoryPoint {
        self.trajectory.last().expect("trajectory holds the initial point")
    }
}

struct Recorder {
    points: Vec<TrajectoryPoint>,
    stride: u64,
}

impl Recorder {
    fn push(&mut self, p: TrajectoryPoint) {
        if !p.step.is_multiple_of(self.stride) {
            return;
        }
        self.points.push(p);
        if self.points.len() >= TRAJECTORY_LIMIT {
            self.stride *= 2;
            let stride = self.stride;
            self.points.retain(|q| q.step % stride == 0);
        }
    }

    fn finish(mut self, p: TrajectoryPoint) -> Vec<TrajectoryPoint> {
        if self.points.last().map(|q| q.step) != Some(p.step) {
            self.points.push(p);
        }
        self.points
    }
}

/// Runs one walk from `τ₀ = |α|²a + |β|²b`, `s₀ = 0` until a slit absorbs
/// it or `max_steps` is exhausted.
pub fn run_collapse<R: Rng + ?Sized>(cfg: &WalkConfig, rng: &mut R) -> Result<WalkOutcome> {
    cfg.validate()?;
    let eps = 1e-9 * (cfg.b - cfg.a);
    let point = |step: u64, st: WalkState| TrajectoryPoint {
        step,
        tau: st.tau,
        s: st.s,
        mu_z: st.tau,
        delta_z: cfg.delta_z(st.s),
    };
    let mut state = WalkState {
        tau: cfg.initial_tau(),
        s: 0.0,
    };
    let mut rec = Recorder {
        points: Vec::new(),
        stride: 1,
    };
    let mut outcome = Outcome::None;
    let mut step = 0;
    loop {
        let localized = cfg.delta_z(state.s) < cfg.delta_detect;
        let at_b = state.tau >= cfg.b - eps;
        let at_a = state.tau <= cfg.a + eps;
        if at_a || at_b {
            let bound = if at_b { cfg.b } else { cfg.a };
            if localized || cfg.absorb_mode == AbsorbMode::TauOnly {
                state.tau = bound;
                outcome = if at_b { Outcome::SlitB } else { Outcome::SlitA };
                break;
            }
            state.tau = 2.0 * bound - state.tau;
        }
        rec.push(point(step, state));
        if step >= cfg.max_steps {
            break;
        }
        state = walk_step(state, cfg, rng);
        step += 1;
    }
    Ok(WalkOutcome {
        absorbed_at: outcome,
        steps_taken: step,
        localized: cfg.delta_z(state.s) < cfg.delta_detect,
        trajectory: rec.finish(point(step, state)),
    })
}

/// Probability `(μ_z − a)/(b − a)` of absorption at `b`.
pub fn gambler_ruin_probability(mu_z: f64, a: f64, b: f64) -> Result<f64> {
    ensure(a < b, || format!("need a < b, got a={a} b={b}"))?;
    if !(a..=b).contains(&mu_z) {
        return Err(Error::OutOfInterval { value: mu_z, lo: a, hi: b });
    }
    Ok((mu_z - a) / (b - a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub outcome: Outcome,
    pub steps_taken: u64,
    pub localized: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleResult {
    pub runs: Vec<RunRecord>,
}

impl EnsembleResult {
    pub fn count(&self, o: Outcome) -> u64 {
        self.runs.iter().filter(|r| r.outcome == o).count() as u64
    }

    pub fn n_runs(&self) -> u64 {
        self.runs.len() as u64
    }

    pub fn absorbed(&self) -> u64 {
        self.n_runs() - self.count(Outcome::None)
    }

    /// Frequency of `slit_b` among absorbed runs.
    pub fn conditional_frequency_b(&self) -> f64 {
        self.count(Outcome::SlitB) as f64 / self.absorbed().max(1) as f64
    }

    pub fn frequency(&self, o: Outcome) -> f64 {
        self.count(o) as f64 / self.n_runs().max(1) as f64
    }

    /// Binomial interval at `level` around `p` for the absorbed sample size.
    pub fn interval_around(&self, p: f64, level: f64) -> Interval {
        binomial_interval(p, self.absorbed(), level)
    }

    /// Fraction of absorbed runs whose spread was below `delta_detect` when
    /// absorbed.
    pub fn localized_fraction(&self) -> f64 {
        let loc = self.runs.iter().filter(|r| r.outcome != Outcome::None && r.localized).count();
        loc as f64 / self.absorbed().max(1) as f64
    }
}

/// `n_runs` independent walks, run `i` drawing from stream `i` of
/// `cfg.seed`. Trajectories are discarded.
pub fn ensemble_run(cfg: &WalkConfig, n_runs: u64) -> Result<EnsembleResult> {
    cfg.validate()?;
    let runs = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let out = run_collapse(cfg, &mut rng)?;
            Ok(RunRecord {
                outcome: out.absorbed_at,
                steps_taken: out.steps_taken,
                localized: out.localized,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult { runs })
}

/// Final `τ` of `n_runs` boundary-free walks of `n_steps` steps.
pub fn tau_marginal_samples(cfg: &WalkConfig, n_runs: u64, n_steps: u64) -> Vec<f64> {
    (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let mut st = WalkState {
                tau: cfg.initial_tau(),
                s: 0.0,
            };
            for _ in 0..n_steps {
                st = walk_step(st, cfg, &mut rng);
            }
            st.tau
        })
        .collect()
}

/// Variance of a single `τ` step.
pub fn step_variance(cfg: &WalkConfig) -> f64 {
    cfg.step_tau * cfg.step_tau
}

/// Histogram of [`tau_marginal_samples`] over `τ₀ ± 6` standard
/// deviations. Fixed-magnitude steps get bins of width `2·step` centred on
/// the reachable lattice sites; normal steps get 20 bins per deviation.
pub fn tau_marginal_histogram(cfg: &WalkConfig, n_runs: u64, n_steps: u64) -> Result<Histogram> {
    ensure(n_steps >= 1, || "need at least one step".into())?;
    let samples = tau_marginal_samples(cfg, n_runs, n_steps);
    let sd = (step_variance(cfg) * n_steps as f64).sqrt();
    let tau0 = cfg.initial_tau();
    let mut hist = match cfg.step_distribution {
        StepDistribution::Fixed => {
            let w = 2.0 * cfg.step_tau;
            let half_bins = (6.0 * sd / w).ceil() as usize + 1;
            let parity = (n_steps % 2) as f64 * cfg.step_tau;
            let lo = tau0 + parity - w * (half_bins as f64 + 0.5);
            Histogram::new(lo, lo + w * (2 * half_bins + 1) as f64, 2 * half_bins + 1)
        }
        StepDistribution::Normal => Histogram::new(tau0 - 6.0 * sd, tau0 + 6.0 * sd, 240),
    };
    for x in samples {
        hist.add(x);
    }
    Ok(hist)
}
