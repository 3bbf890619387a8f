//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use collapse_cli::{execute, replay, Subcommand};
use collapse_core::collapse::{
    ensemble_run, gambler_ruin_probability, step_variance, tau_marginal_histogram, AbsorbMode, Outcome, WalkConfig,
};
use collapse_core::diffusion::{
    compare_histogram_density, matched_coefficient, solve, splitting_probabilities, DiffusionProblem, Domain,
};
use collapse_core::gue::{
    induced_manifold_steps, sample_gue, unfolded_spacings, wigner_surmise_cdf, GueParams, DEFAULT_FRAME_SIZE,
};
use collapse_core::hilbert::*;
use collapse_core::rng::stream;
use collapse_core::semiclassics::{
    fringe_period, screen_pattern, spread_packet, velocity_decomposition, ParticleParams,
};
use collapse_core::stats::{correlation, ks_statistic, mean, variance};
use collapse_core::Complex64;
use rand::Rng;
use rayon::prelude::*;

struct Verdict {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn verdict(id: &'static str, title: &'static str, pass: bool, detail: String) -> Verdict {
    Verdict { id, title, pass, detail }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gauss(center: f64, width: f64, grid: Grid) -> GridWavefunction {
    make_gaussian(GaussianParams::real(center, width).unwrap(), grid).unwrap()
}

fn born_rule() -> Verdict {
    let start = Instant::now();
    let cfg = WalkConfig { seed: 1, ..WalkConfig::double_slit() };
    let small = ensemble_run(&cfg, 1500).unwrap();
    let large = ensemble_run(&WalkConfig { seed: 2, ..cfg.clone() }, 100_000).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (f_small, f_large) = (small.conditional_frequency_b(), large.conditional_frequency_b());
    let pass = (0.721..=0.779).contains(&f_small) && (f_large - 0.75).abs() <= 0.005 && secs < 10.0;
    verdict(
        "1",
        "Born rule at the double-slit setting",
        pass,
        format!("freq_b {f_small:.4} (1500 runs, band [0.721, 0.779]), {f_large:.4} (1e5 runs, 0.75 +- 0.005), {secs:.2} s"),
    )
}

fn gambler_triple() -> Verdict {
    let start = Instant::now();
    let (a, b) = (-10.0, 10.0);
    let mut worst: f64 = 0.0;
    for (i, &src) in [-6.0, -3.0, 0.0, 4.0, 7.0].iter().enumerate() {
        let cfg = WalkConfig {
            absorb_mode: AbsorbMode::TauOnly,
            seed: 100 + i as u64,
            ..WalkConfig::new(a, b, (b - src) / (b - a)).unwrap()
        };
        let mc = ensemble_run(&cfg, 100_000).unwrap().frequency(Outcome::SlitB);
        let exact = gambler_ruin_probability(src, a, b).unwrap();
        let pde = splitting_probabilities(a, b, src, 0.5, 401, 5000.0).unwrap().p_b;
        worst = worst.max((mc - exact).abs()).max((mc - pde).abs()).max((pde - exact).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "2",
        "gambler's ruin: walk, closed form and diffusion agree",
        worst <= 0.005 && secs < 60.0,
        format!("max pairwise gap {worst:.4} over 5 sources (limit 0.005), {secs:.2} s"),
    )
}

fn golden_values() -> Vec<Verdict> {
    let (a, b, d) = (-5e-6, 5e-6, 1e-9);
    let rho = gaussian_distance_analytic(GaussianParams::real(b, d).unwrap(), GaussianParams::real(b, 100.0 * d).unwrap());
    let grid = Grid::new(b - 40.0 * d, b + 30.0 * d, 4096).unwrap();
    let log_shift = inner_product(&gauss(b, d, grid), &gauss(b - 10.0 * d, d, grid)).unwrap().norm().ln();
    let (log_far, _) =
        gaussian_overlap_analytic(GaussianParams::real(a, d).unwrap(), GaussianParams::real(b, 100.0 * d).unwrap());
    vec![
        verdict(
            "3a",
            "distance to a 100x wider packet",
            (rho - 1.429).abs() <= 0.002,
            format!("{rho:.5} rad (target 1.429 +- 0.002)"),
        ),
        verdict(
            "3b",
            "log overlap at a 10-width shift",
            (log_shift + 12.5).abs() <= 0.01,
            format!("{log_shift:.6} (target -12.5 +- 0.01)"),
        ),
        verdict(
            "3c",
            "log overlap across the slits, analytic path",
            log_far < -1e4,
            format!("{log_far:.2} (target < -1e4)"),
        ),
    ]
}

fn moment_formulas() -> Verdict {
    let mut rng = stream(44, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let sigma: f64 = rng.random_range(0.5..1.5);
        let sep = rng.random_range(12.0..24.0) * sigma;
        let mid = rng.random_range(-5.0..5.0);
        let (za, zb) = (mid - 0.5 * sep, mid + 0.5 * sep);
        let alpha_sq: f64 = rng.random_range(0.05..0.95);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let margin = 14.0 * sigma;
        let n = ((zb - za + 2.0 * margin) / (sigma / 16.0)).ceil() as usize;
        let grid = Grid::new(za - margin, zb + margin, n).unwrap();
        let phi = GridWavefunction::superpose(&[
            (c(alpha_sq.sqrt()), &gauss(za, sigma, grid)),
            (Complex64::from_polar((1.0 - alpha_sq).sqrt(), phase), &gauss(zb, sigma, grid)),
        ])
        .unwrap();
        let m = moments(&phi).unwrap();
        let (mu, var) = two_gaussian_moments(alpha_sq, 1.0 - alpha_sq, za, zb);
        // a grid state also carries the component variance sigma^2
        worst = worst.max((m.mu_z - mu).abs()).max((m.delta_z.powi(2) - var - sigma * sigma).abs());
    }
    verdict(
        "4",
        "superposition moments match the two-Gaussian formulas",
        worst <= 1e-6,
        format!("max deviation {worst:.2e} over 20 draws, separation 12-24 widths (limit 1e-6)"),
    )
}

fn orthogonality() -> Verdict {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let two = |al: Complex64, be: Complex64| {
        GridWavefunction::superpose(&[(al, &gauss(-10.0, 1.0, grid)), (be, &gauss(10.0, 1.0, grid))]).unwrap()
    };
    let mut states = vec![
        two(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)),
        two(c(0.5), Complex64::from_polar(0.75f64.sqrt(), 2.0)),
        two(Complex64::from_polar(0.6, 0.4), Complex64::from_polar(0.8, -1.1)),
    ];
    let wide = Grid::new(-60.0, 60.0, 8192).unwrap();
    states.push(
        GridWavefunction::superpose(&[
            (c(0.5), &gauss(-20.0, 1.0, wide)),
            (Complex64::from_polar(0.7, 1.0), &gauss(0.0, 1.0, wide)),
            (c(0.2), &gauss(24.0, 1.0, wide)),
        ])
        .unwrap(),
    );
    let (mut orth, mut fibre): (f64, f64) = (0.0, 0.0);
    for phi in &states {
        orth = orth.max(step_orthogonality(phi).unwrap().abs());
        fibre = fibre.max(fibre_component(phi, &tangent_tau(phi)).unwrap().abs());
        fibre = fibre.max(fibre_component(phi, &tangent_s(phi).unwrap()).unwrap().abs());
    }
    verdict(
        "5",
        "manifold steps are orthogonal and horizontal",
        orth < 1e-6 && fibre < 1e-8,
        format!("step orthogonality {orth:.2e} (limit 1e-6), fibre component {fibre:.2e} (limit 1e-8)"),
    )
}

fn gue_statistics() -> Verdict {
    let p = GueParams::new(32, 1.0, 66).unwrap();
    let samples: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let h = sample_gue(&p, &mut stream(66, k));
            let diag = (0..32).map(|i| h.get(i, i).re).collect();
            let off = (0..32).flat_map(|i| (i + 1..32).map(move |j| (i, j))).map(|(i, j)| h.get(i, j).re).collect();
            (diag, off, unfolded_spacings(&h.eigenvalues().unwrap(), p.scale))
        })
        .collect();
    let diag: Vec<f64> = samples.iter().flat_map(|s| s.0.iter().copied()).collect();
    let off: Vec<f64> = samples.iter().flat_map(|s| s.1.iter().copied()).collect();
    let spacings: Vec<f64> = samples.iter().flat_map(|s| s.2.iter().copied()).collect();
    let ratio = variance(&diag) / variance(&off);
    let m = mean(&spacings);
    let ks = ks_statistic(&spacings.iter().map(|s| s / m).collect::<Vec<_>>(), wigner_surmise_cdf);

    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let phi = GridWavefunction::superpose(&[(c(0.5), &gauss(-10.0, 1.0, grid)), (c(0.75f64.sqrt()), &gauss(10.0, 1.0, grid))])
        .unwrap();
    let steps = induced_manifold_steps(&phi, DEFAULT_FRAME_SIZE, 0.01, 10_000, 67).unwrap();
    let dtau: Vec<f64> = steps.iter().map(|s| s.0).collect();
    let ds: Vec<f64> = steps.iter().map(|s| s.1).collect();
    let corr = correlation(&dtau, &ds);
    let var_ratio = variance(&dtau) / variance(&ds);
    let pass = (ratio / 2.0 - 1.0).abs() <= 0.05 && ks < 0.05 && corr.abs() < 0.05 && (var_ratio - 1.0).abs() <= 0.1;
    verdict(
        "6",
        "GUE entry variances, spacings and induced steps",
        pass,
        format!("variance ratio {ratio:.4} (2 +- 5%), KS {ks:.4} (< 0.05), corr {corr:.4} (< 0.05), step variance ratio {var_ratio:.4} (1 +- 10%)"),
    )
}

fn diffusion_limit() -> Verdict {
    let cfg = WalkConfig { seed: 77, ..WalkConfig::double_slit() };
    let n_steps = 400;
    let hist = tau_marginal_histogram(&cfg, 100_000, n_steps).unwrap();
    let coef = matched_coefficient(step_variance(&cfg));
    let tau0 = cfg.initial_tau();
    let domain = Domain::WholeLine { z_min: tau0 - 200.0, z_max: tau0 + 200.0 };
    let l1 = |k: f64| {
        let sol = solve(&DiffusionProblem::point(k, domain, tau0, n_steps as f64, 1601)).unwrap();
        compare_histogram_density(&hist, &sol.density).unwrap()
    };
    let (matched, wrong) = (l1(coef), l1(4.0 * coef));
    verdict(
        "7",
        "walk histogram converges to the heat kernel",
        matched < 0.05 && wrong > 0.2,
        format!("L1 {matched:.4} matched (< 0.05), {wrong:.4} with 4x coefficient (> 0.2)"),
    )
}

fn velocity_decompositions() -> Verdict {
    let grid = Grid::new(-40.0, 40.0, 4096).unwrap();
    let cases = [
        ("free", ParticleParams::free(1.0, 1.0, GaussianParams::real(0.0, 1.0).unwrap(), grid).unwrap()),
        ("boosted", ParticleParams::free(1.0, 1.0, GaussianParams::new(0.0, 1.0, 1.5).unwrap(), grid).unwrap()),
        (
            "harmonic",
            ParticleParams::harmonic(1.0, 1.0, 1.0, GaussianParams::new(15.0, 1.0, 0.5).unwrap(), grid).unwrap(),
        ),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, p) in &cases {
        let err = velocity_decomposition(p).unwrap().relative_error();
        pass &= err < 0.01;
        parts.push(format!("{name} {err:.2e}"));
    }
    verdict(
        "8",
        "squared state speed matches the three-term decomposition",
        pass,
        format!("relative errors {} (limit 1e-2)", parts.join(", ")),
    )
}

fn screen_patterns() -> Verdict {
    let (sigma, t, d) = (0.2, 40.0, 2.0);
    let grid = Grid::new(-600.0, 600.0, 65536).unwrap();
    let g_a = spread_packet(GaussianParams::real(-d, sigma).unwrap(), 1.0, 1.0, t, grid).unwrap();
    let g_b = spread_packet(GaussianParams::real(d, sigma).unwrap(), 1.0, 1.0, t, grid).unwrap();
    let h = c(FRAC_1_SQRT_2);
    let incoherent = screen_pattern(h, h, &g_a, &g_b, true).unwrap();
    let dev = incoherent
        .density
        .iter()
        .zip(g_a.values().iter().zip(g_b.values()))
        .map(|(p, (x, y))| (p - 0.5 * x.norm_sqr() - 0.5 * y.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let period = fringe_period(d, sigma, 1.0, 1.0, t);
    let vis = screen_pattern(h, h, &g_a, &g_b, false).unwrap().visibility(-0.5 * period, 0.5 * period);
    verdict(
        "9",
        "which-way detector removes the fringes",
        dev < 1e-10 && (vis - 1.0).abs() <= 1e-3,
        format!("incoherent cross term {dev:.2e} (< 1e-10), coherent visibility {vis:.5} (1 +- 1e-3)"),
    )
}

fn determinism() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for cmd in Subcommand::ALL {
        let cfg = cmd.resolve(&[]).unwrap();
        let first = root.path().join(cmd.name()).join("first");
        let again = root.path().join(cmd.name()).join("again");
        let run = execute(cmd, &cfg, &first).unwrap();
        let rep = replay(&first.join("manifest.txt"), &again).unwrap();
        differing.extend(rep.mismatched.iter().map(|f| format!("{}:{f}", cmd.name())));
        for file in run.manifest.checksums.keys() {
            if std::fs::read(first.join(file)).unwrap() != std::fs::read(again.join(file)).unwrap() {
                differing.push(format!("{}:{file}", cmd.name()));
            }
        }
    }
    let detail = if differing.is_empty() {
        format!("all {} subcommands replayed byte-identically", Subcommand::ALL.len())
    } else {
        format!("differing outputs: {}", differing.join(", "))
    };
    verdict("10", "replay from manifest reproduces outputs", differing.is_empty(), detail)
}

fn main() {
    let mut verdicts = vec![born_rule(), gambler_triple()];
    verdicts.extend(golden_values());
    verdicts.extend([
        moment_formulas(),
        orthogonality(),
        gue_statistics(),
        diffusion_limit(),
        velocity_decompositions(),
        screen_patterns(),
        determinism(),
    ]);
    println!();
    for v in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:<4} {}: {}", v.id, v.title, v.detail);
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("\n{passed}/{} acceptance criteria passed", verdicts.len());
    if passed != verdicts.len() {
        std::process::exit(1);
    }
}
