//! Subcommand bodies. Each turns a resolved configuration into CSV
//! artifacts and summary rows; nothing here touches the file system.

use collapse_core::collapse::{
    ensemble_run, gambler_ruin_probability, run_collapse, step_variance, tau_marginal_histogram, AbsorbMode,
    StepDistribution, WalkConfig,
};
use collapse_core::detector::{
    class_distance, is_physical_eigenstate, two_gaussian_class_distance, PhysicalEigenstateClass, SlitGeometry,
    DEFAULT_R_SIGMA,
};
use collapse_core::diffusion::{
    compare_histogram_density, matched_coefficient, solve, splitting_probabilities, DiffusionProblem, Domain,
};
use collapse_core::gue::{
    induced_manifold_steps, sample_gue, unfolded_spacings, wigner_surmise_cdf, wigner_surmise_pdf, GueParams,
};
use collapse_core::hilbert::{
    fubini_study_distance, gaussian_distance_analytic, gaussian_overlap_analytic, inner_product, make_gaussian,
    GaussianParams, Grid, GridWavefunction,
};
use collapse_core::rng::stream;
use collapse_core::semiclassics::{fringe_period, screen_pattern, spread_packet, velocity_decomposition, ParticleParams};
use collapse_core::stats::{
    anderson_darling_normal, binomial_interval, correlation, ks_statistic, variance, Histogram,
    ANDERSON_DARLING_CRITICAL_1PCT,
};
use collapse_core::Complex64;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{num, table, Artifact, SummaryRow};
use crate::CliError;

/// Files and summary rows produced by one subcommand.
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub files: Vec<Artifact>,
    pub summary: Vec<SummaryRow>,
}

pub fn walk_config(cfg: &ExperimentConfig) -> Result<WalkConfig, CliError> {
    let alpha_sq = cfg.f64("alpha_sq");
    let mut wc = WalkConfig {
        a: cfg.f64("a"),
        b: cfg.f64("b"),
        alpha_sq,
        beta_sq: 1.0 - alpha_sq,
        step_tau: cfg.f64("step_tau"),
        step_s: cfg.f64("step_s"),
        drift_h: cfg.f64("drift_h"),
        delta_detect: cfg.f64("delta_detect"),
        step_distribution: match cfg.raw("steps") {
            "normal" => StepDistribution::Normal,
            _ => StepDistribution::Fixed,
        },
        max_steps: cfg.u64("max_steps"),
        seed: cfg.u64("seed"),
        reflect_at: None,
        absorb_mode: match cfg.raw("absorb") {
            "tau_only" => AbsorbMode::TauOnly,
            _ => AbsorbMode::Joint,
        },
    };
    let r = cfg.f64("reflect_at");
    wc.reflect_at = Some(if r > 0.0 { r } else { wc.initial_delta() });
    if wc.initial_delta() == 0.0 {
        // a pure slit state has no spread to reflect against
        wc.reflect_at = None;
    }
    wc.validate()?;
    Ok(wc)
}

pub fn born(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let wc = walk_config(cfg)?;
    let level = cfg.f64("level");
    let ens = ensemble_run(&wc, cfg.u64("runs"))?;
    let runs = ens.runs.iter().enumerate().map(|(i, r)| {
        vec![i.to_string(), r.outcome.label().into(), r.steps_taken.to_string(), r.localized.to_string()]
    });
    let ensemble = table("born_ensemble.csv", &["run", "outcome", "steps_taken", "localized"], runs);

    let freq = ens.conditional_frequency_b();
    let band = ens.interval_around(wc.beta_sq, level);
    let ci = binomial_interval(freq, ens.absorbed(), level);
    let summary = vec![
        SummaryRow::within("freq_b", freq, wc.beta_sq, band.lo, band.hi),
        SummaryRow::info("freq_b_ci_lower", ci.lo),
        SummaryRow::info("freq_b_ci_upper", ci.hi),
        SummaryRow::info("absorbed_fraction", ens.absorbed() as f64 / ens.n_runs() as f64),
        SummaryRow::info("localized_fraction", ens.localized_fraction()),
    ];
    Ok(Outputs { files: vec![ensemble], summary })
}

pub fn walk(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let wc = walk_config(cfg)?;
    let mut points = Vec::new();
    let mut finals = Vec::new();
    let mut summary = Vec::new();
    for i in 0..cfg.u64("runs") {
        let out = run_collapse(&wc, &mut stream(wc.seed, i))?;
        for p in &out.trajectory {
            points.push(vec![i.to_string(), p.step.to_string(), num(p.tau), num(p.s), num(p.mu_z), num(p.delta_z)]);
        }
        let last = out.final_point();
        finals.push(vec![
            i.to_string(),
            out.absorbed_at.label().into(),
            out.steps_taken.to_string(),
            num(last.tau),
            num(last.delta_z),
            out.localized.to_string(),
        ]);
        let done = out.absorbed_at != collapse_core::collapse::Outcome::None && out.localized;
        summary.push(SummaryRow::flag(&format!("run_{i}_localized_at_slit"), done, true));
    }
    let files = vec![
        table("walk_trajectories.csv", &["run", "step", "tau", "s", "mu_z", "delta_z"], points),
        table("walk_runs.csv", &["run", "outcome", "steps_taken", "final_tau", "final_delta_z", "localized"], finals),
    ];
    Ok(Outputs { files, summary })
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn variance(&self) -> f64 {
        (self.sum_sq - self.sum * self.sum / self.n) / (self.n - 1.0)
    }
}

pub fn gue(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let seed = cfg.u64("seed");
    let params = GueParams::new(cfg.usize("dim"), cfg.f64("scale"), seed)?;
    let per_sample = (0..cfg.u64("runs"))
        .into_par_iter()
        .map(|k| {
            let h = sample_gue(&params, &mut stream(seed, k));
            let (mut diag, mut re, mut im) = (Moments::default(), Moments::default(), Moments::default());
            for i in 0..params.dim {
                diag.add(h.get(i, i).re);
                for j in i + 1..params.dim {
                    re.add(h.get(i, j).re);
                    im.add(h.get(i, j).im);
                }
            }
            Ok(([diag, re, im], unfolded_spacings(&h.eigenvalues()?, params.scale)))
        })
        .collect::<collapse_core::Result<Vec<_>>>()?;
    // fold in sample order so the result is independent of scheduling
    let mut m = [Moments::default(); 3];
    let mut spacings = Vec::new();
    for (mom, sp) in per_sample {
        for (acc, x) in m.iter_mut().zip(&mom) {
            acc.merge(x);
        }
        spacings.extend(sp);
    }
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let normalized: Vec<f64> = spacings.iter().map(|s| s / mean).collect();
    let ks = ks_statistic(&normalized, wigner_surmise_cdf);
    let mut hist = Histogram::new(0.0, 4.0, 40);
    normalized.iter().for_each(|&s| hist.add(s));
    let w = hist.bin_width();
    let rows = hist.counts.iter().enumerate().map(|(i, &c)| {
        let lo = hist.lo + i as f64 * w;
        let density = c as f64 / (hist.total() as f64 * w);
        vec![num(lo), num(lo + w), num(density), num(wigner_surmise_pdf(lo + 0.5 * w))]
    });
    let spacing_csv = table("gue_spacings.csv", &["bin_lo", "bin_hi", "density", "wigner_pdf"], rows);

    let grid = Grid::default_for(-10.0, 10.0)?;
    let g = |c| make_gaussian(GaussianParams::real(c, 1.0)?, grid);
    let phi = GridWavefunction::superpose(&[(Complex64::new(0.5, 0.0), &g(-10.0)?), (Complex64::new(0.75f64.sqrt(), 0.0), &g(10.0)?)])?;
    let steps = induced_manifold_steps(&phi, cfg.usize("frame_size"), cfg.f64("dt"), cfg.usize("isotropy_samples"), seed)?;
    let dtau: Vec<f64> = steps.iter().map(|s| s.0).collect();
    let ds: Vec<f64> = steps.iter().map(|s| s.1).collect();

    let d2 = params.scale * params.scale;
    let summary = vec![
        SummaryRow::near("diag_over_offdiag_variance", m[0].variance() / m[1].variance(), 2.0, 0.1),
        SummaryRow::near("diag_variance", m[0].variance(), 2.0 * d2, 0.1 * d2),
        SummaryRow::near("offdiag_re_over_im_variance", m[1].variance() / m[2].variance(), 1.0, 0.05),
        SummaryRow::below("spacing_ks_vs_wigner", ks, 0.05),
        SummaryRow::below("induced_step_abs_correlation", correlation(&dtau, &ds).abs(), 0.05),
        SummaryRow::near("induced_step_variance_ratio", variance(&dtau) / variance(&ds), 1.0, 0.1),
        SummaryRow::below("induced_dtau_anderson_darling", anderson_darling_normal(&dtau), ANDERSON_DARLING_CRITICAL_1PCT),
        SummaryRow::below("induced_ds_anderson_darling", anderson_darling_normal(&ds), ANDERSON_DARLING_CRITICAL_1PCT),
    ];
    Ok(Outputs { files: vec![spacing_csv], summary })
}

/// Grid points per unit step used for the kernel comparison.
const KERNEL_POINTS_PER_STEP: f64 = 4.0;

pub fn diffusion(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let (a, b, c) = (cfg.f64("a"), cfg.f64("b"), cfg.f64("c"));
    if !(a < c && c < b) {
        return Err(CliError::Config(format!("need a < c < b, got a={a} c={c} b={b}")));
    }
    let split = splitting_probabilities(a, b, c, cfg.f64("coefficient"), cfg.usize("n_points"), cfg.f64("t_max"))?;
    let p_b = gambler_ruin_probability(c, a, b)?;
    let mut summary = vec![
        SummaryRow::near("splitting_p_a", split.p_a, 1.0 - p_b, 0.005),
        SummaryRow::near("splitting_p_b", split.p_b, p_b, 0.005),
        SummaryRow::info("splitting_time", split.time),
    ];
    let mut files = vec![table(
        "diffusion_splitting.csv",
        &["a", "b", "c", "p_a", "p_b", "gambler_p_b", "time", "residual"],
        [vec![num(a), num(b), num(c), num(split.p_a), num(split.p_b), num(p_b), num(split.time), num(split.residual)]],
    )];

    let runs = cfg.u64("runs");
    if runs > 0 {
        // free unit-step walk from c against the heat kernel with matched coefficient
        let wc = WalkConfig {
            seed: cfg.u64("seed"),
            ..WalkConfig::new(a, b, (b - c) / (b - a))?
        };
        let n_steps = cfg.u64("n_steps");
        let hist = tau_marginal_histogram(&wc, runs, n_steps)?;
        let coef = matched_coefficient(step_variance(&wc));
        let half = 10.0 * (step_variance(&wc) * n_steps as f64).sqrt();
        let n = (2.0 * half * KERNEL_POINTS_PER_STEP / wc.step_tau).ceil() as usize + 1;
        let domain = Domain::WholeLine { z_min: c - half, z_max: c + half };
        let density = |k: f64| solve(&DiffusionProblem::point(k * coef, domain, c, n_steps as f64, n)).map(|s| s.density);
        let (matched, wrong) = (density(1.0)?, density(4.0)?);
        let l1 = compare_histogram_density(&hist, &matched)?;
        let l1_wrong = compare_histogram_density(&hist, &wrong)?;
        summary.push(SummaryRow::below("walk_kernel_l1", l1, 0.05));
        summary.push(SummaryRow::above("walk_kernel_l1_coefficient_x4", l1_wrong, 0.2));

        let w = hist.bin_width();
        let total = hist.total() as f64;
        let rows = hist.counts.iter().enumerate().map(|(i, &k)| {
            let lo = hist.lo + i as f64 * w;
            vec![num(lo), num(lo + w), num(k as f64 / total), num(matched.mass_between(lo, lo + w))]
        });
        files.push(table("diffusion_histogram.csv", &["bin_lo", "bin_hi", "walk_mass", "kernel_mass"], rows));
    }
    Ok(Outputs { files, summary })
}

pub fn distance(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let geo = SlitGeometry {
        a: cfg.f64("a"),
        b: cfg.f64("b"),
        delta: cfg.f64("delta"),
        detector_length: cfg.f64("detector_length"),
        cell_size: cfg.f64("cell_size"),
        epsilon: cfg.f64("epsilon"),
    };
    if geo.a >= geo.b {
        return Err(CliError::Config(format!("need a < b, got a={} b={}", geo.a, geo.b)));
    }
    let grid = geo.grid(cfg.f64("points_per_width"))?;
    let class_b = PhysicalEigenstateClass::gaussian(geo.detector()?, geo.delta, grid)?;
    let g = |c: f64, w: f64| make_gaussian(GaussianParams::real(c, w)?, grid);
    let f = cfg.f64("width_factor");
    let (d, b) = (geo.delta, geo.b);

    let wide = g(b, f * d)?;
    let shifted = g(b - 10.0 * d, d)?;
    let g_a = g(geo.a, d)?;
    let rho_wide = fubini_study_distance(&class_b.reference, &wide)?;
    let rho_closed = gaussian_distance_analytic(GaussianParams::real(b, d)?, GaussianParams::real(b, f * d)?);
    let log_shift = inner_product(&class_b.reference, &shifted)?.norm().ln();
    let (log_far, _) = gaussian_overlap_analytic(GaussianParams::real(geo.a, d)?, GaussianParams::real(b, f * d)?);

    let alpha_sq = cfg.f64("alpha_sq");
    let beta = (1.0 - alpha_sq).sqrt();
    let phi = GridWavefunction::superpose(&[(Complex64::new(alpha_sq.sqrt(), 0.0), &g_a), (Complex64::new(beta, 0.0), &class_b.reference)])?;
    let dist = class_distance(&phi, &class_b, DEFAULT_R_SIGMA)?;

    let summary = vec![
        SummaryRow::near("rho_wide_rad", rho_wide, rho_closed, 0.002),
        SummaryRow::near("log_overlap_shift_10_widths", log_shift, -12.5, 0.01),
        SummaryRow::info("log_overlap_far_analytic", log_far),
        SummaryRow::flag("wide_in_class_b", is_physical_eigenstate(&wide, &class_b)?, true),
        SummaryRow::flag("shifted_in_class_b", is_physical_eigenstate(&shifted, &class_b)?, true),
        SummaryRow::flag("superposition_in_class_b", is_physical_eigenstate(&phi, &class_b)?, alpha_sq == 0.0),
        SummaryRow::near("superposition_class_distance_rad", dist.angle, two_gaussian_class_distance(beta), 1e-3),
    ];
    Ok(Outputs { files: Vec::new(), summary })
}

pub fn decompose(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let hw = cfg.f64("half_width");
    let grid = Grid::new(-hw, hw, cfg.usize("n_points"))?;
    let packet = GaussianParams::new(cfg.f64("center"), cfg.f64("width"), cfg.f64("momentum"))?;
    let (m, hbar) = (cfg.f64("mass"), cfg.f64("hbar"));
    let params = match cfg.raw("potential") {
        "harmonic" => ParticleParams::harmonic(m, hbar, cfg.f64("omega"), packet, grid)?,
        _ => ParticleParams::free(m, hbar, packet, grid)?,
    };
    let d = velocity_decomposition(&params)?;
    let row = vec![
        num(d.classical),
        num(d.acceleration),
        num(d.spreading),
        num(d.analytic_total()),
        num(d.numeric_total),
        num(d.relative_error()),
    ];
    let header = ["classical", "acceleration", "spreading", "analytic_total", "numeric_total", "relative_error"];
    let summary = vec![
        SummaryRow::below("relative_error", d.relative_error(), 0.01),
        SummaryRow::info("classical", d.classical),
        SummaryRow::info("acceleration", d.acceleration),
        SummaryRow::info("spreading", d.spreading),
    ];
    Ok(Outputs { files: vec![table("decompose.csv", &header, [row])], summary })
}

pub fn pattern(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let hw = cfg.f64("half_width");
    let grid = Grid::new(-hw, hw, cfg.usize("n_points"))?;
    let (d, sigma, t) = (cfg.f64("half_separation"), cfg.f64("sigma"), cfg.f64("time"));
    let (m, hbar) = (cfg.f64("mass"), cfg.f64("hbar"));
    let g_a = spread_packet(GaussianParams::real(-d, sigma)?, m, hbar, t, grid)?;
    let g_b = spread_packet(GaussianParams::real(d, sigma)?, m, hbar, t, grid)?;
    let alpha_sq = cfg.f64("alpha_sq");
    let (alpha, beta) = (Complex64::new(alpha_sq.sqrt(), 0.0), Complex64::new((1.0 - alpha_sq).sqrt(), 0.0));
    let incoherent = screen_pattern(alpha, beta, &g_a, &g_b, true)?;
    let coherent = screen_pattern(alpha, beta, &g_a, &g_b, false)?;

    let cross = incoherent
        .density
        .iter()
        .zip(g_a.values().iter().zip(g_b.values()))
        .map(|(p, (x, y))| (p - alpha.norm_sqr() * x.norm_sqr() - beta.norm_sqr() * y.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let period = fringe_period(d, sigma, m, hbar, t);
    let (lo, hi) = (-0.5 * period, 0.5 * period);
    // dividing by the incoherent envelope leaves the fringe contrast alone
    let ratio = collapse_core::semiclassics::ScreenPattern {
        grid,
        density: coherent.density.iter().zip(&incoherent.density).map(|(p, e)| p / e).collect(),
    };
    let expected = 2.0 * alpha.norm() * beta.norm();
    let summary = vec![
        SummaryRow::below("incoherent_cross_term", cross, 1e-10),
        SummaryRow::near("incoherent_mass", incoherent.mass(), 1.0, 1e-8),
        SummaryRow::near("coherent_mass", coherent.mass(), 1.0, 1e-8),
        SummaryRow::near("fringe_visibility", ratio.visibility(lo, hi), expected, 5e-3),
        SummaryRow::info("coherent_visibility_raw", coherent.visibility(lo, hi)),
        SummaryRow::info("incoherent_visibility", incoherent.visibility(lo, hi)),
        SummaryRow::info("fringe_period", period),
    ];
    let stride = cfg.usize("stride");
    let rows = (0..grid.len()).step_by(stride).map(|i| {
        vec![num(grid.point(i)), num(incoherent.density[i]), num(coherent.density[i])]
    });
    Ok(Outputs { files: vec![table("pattern.csv", &["z", "incoherent", "coherent"], rows)], summary })
}
