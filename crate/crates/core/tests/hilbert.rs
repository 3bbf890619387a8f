use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use collapse_core::hilbert::*;
use collapse_core::Complex64;
use proptest::prelude::*;

fn gauss(c: f64, w: f64, grid: Grid) -> GridWavefunction {
    make_gaussian(GaussianParams::real(c, w).unwrap(), grid).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn make_gaussian_standard_moments() {
    let grid = Grid::default_for(-2.0, 2.0).unwrap();
    let g = gauss(0.0, 1.0, grid);
    let m = moments(&g).unwrap();
    assert!(m.mu_z.abs() < 1e-12);
    assert!((m.delta_z - 1.0).abs() < 1e-9);
    assert!((g.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn same_width_overlap_matches_closed_form() {
    // ⟨g_a, g_b⟩² = exp(−(a−b)²/(4σ²)) for every separation up to 8σ
    let grid = Grid::new(-20.0, 20.0, 4096).unwrap();
    for sep in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let q = inner_product(&gauss(-sep / 2.0, 1.0, grid), &gauss(sep / 2.0, 1.0, grid)).unwrap();
        let closed = (-sep * sep / 4.0f64).exp();
        assert!((q.norm_sqr() - closed).abs() < 1e-8, "sep {sep}");
    }
}

#[test]
fn ten_width_displacement_overlap() {
    let grid = Grid::new(-10.0, 20.0, 4096).unwrap();
    let q = inner_product(&gauss(0.0, 1.0, grid), &gauss(10.0, 1.0, grid)).unwrap();
    assert!((q.norm().ln() + 12.5).abs() < 1e-6, "{}", q.norm().ln());
}

#[test]
fn unequal_width_overlap_quadrature_oracle() {
    // one-dimensional form: |⟨g_{a,σ}, g_{b,δ}⟩|² = (2σδ/(σ²+δ²))·exp(−(a−b)²/(2(σ²+δ²)))
    let grid = Grid::new(-45.0, 45.0, 8192).unwrap();
    for (a, s, b, d) in [(0.0, 1.0, 1.0, 2.0), (-2.0, 0.5, 1.0, 3.0), (0.0, 1.0, 0.0, 5.0)] {
        let q = inner_product(&gauss(a, s, grid), &gauss(b, d, grid)).unwrap();
        let closed = 2.0 * s * d / (s * s + d * d) * (-(a - b) * (a - b) / (2.0 * (s * s + d * d))).exp();
        assert!((q.norm_sqr() - closed).abs() < 1e-10);
        let (lm, _) = gaussian_overlap_analytic(
            GaussianParams::real(a, s).unwrap(),
            GaussianParams::real(b, d).unwrap(),
        );
        assert!((2.0 * lm - closed.ln()).abs() < 1e-9);
    }
}

#[test]
fn equal_width_zero_momentum_log_magnitude() {
    let p = |c| GaussianParams::real(c, 0.7).unwrap();
    let (lm, _) = gaussian_overlap_analytic(p(0.3), p(2.1));
    assert!((lm + (1.8f64).powi(2) / (8.0 * 0.49)).abs() < 1e-14);
    let grid = Grid::new(-10.0, 12.0, 4096).unwrap();
    let q = inner_product(&make_gaussian(p(0.3), grid).unwrap(), &make_gaussian(p(2.1), grid).unwrap()).unwrap();
    assert!((q.norm().ln() - lm).abs() < 1e-8);
}

#[test]
fn momentum_overlap_matches_phase_space_formula() {
    // |⟨g_a e^{ipz}, g_b e^{iqz}⟩|² = exp(−(a−b)²/(4σ²) − (p−q)²σ²)
    let (a, b, p, q, s) = (0.5, -0.7, 1.3, -0.4, 0.9);
    let (lm, _) = gaussian_overlap_analytic(
        GaussianParams::new(a, s, p).unwrap(),
        GaussianParams::new(b, s, q).unwrap(),
    );
    let expected = -(a - b) * (a - b) / (4.0 * s * s) - (p - q) * (p - q) * s * s;
    assert!((2.0 * lm - expected).abs() < 1e-13);
}

#[test]
fn fubini_study_golden_values() {
    let p1 = GaussianParams::real(0.0, 1.0).unwrap();
    let p2 = GaussianParams::real(0.0, 100.0).unwrap();
    let rho = gaussian_distance_analytic(p1, p2);
    assert!((rho - 1.429).abs() < 0.002, "{rho}");

    // quadrature cross-check at 10x width ratio on a grid that resolves both
    let grid = Grid::new(-12.0, 12.0, 8192).unwrap();
    let rho_q = fubini_study_distance(&gauss(0.0, 0.2, grid), &gauss(0.0, 2.0, grid)).unwrap();
    let rho_a = gaussian_distance_analytic(GaussianParams::real(0.0, 0.2).unwrap(), GaussianParams::real(0.0, 2.0).unwrap());
    assert!((rho_q - rho_a).abs() < 1e-9);

    let grid = Grid::new(-12.0, 14.0, 4096).unwrap();
    let rho2 = fubini_study_distance(&gauss(0.0, 1.0, grid), &gauss(2.0, 1.0, grid)).unwrap();
    assert!((rho2 - (-0.5f64).exp().acos()).abs() < 1e-9);
    assert!((rho2 - 0.9191).abs() < 1e-4);
    assert_eq!(fubini_study_distance(&gauss(0.0, 1.0, grid), &gauss(0.0, 1.0, grid)).unwrap(), 0.0);
}

#[test]
fn superposition_moments_match_two_gaussian_formulas() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let (al, be) = (0.5, 3f64.sqrt() / 2.0);
    let phi = GridWavefunction::superpose(&[
        (c(al), &gauss(-10.0, 1.0, grid)),
        (Complex64::from_polar(be, 0.7), &gauss(10.0, 1.0, grid)),
    ])
    .unwrap();
    let m = moments(&phi).unwrap();
    let (mu, var) = two_gaussian_moments(al * al, be * be, -10.0, 10.0);
    assert!((m.mu_z - mu).abs() < 1e-8);
    // component variance σ² = 1 adds to the separation term
    assert!((m.delta_z.powi(2) - (var + 1.0)).abs() < 1e-7);
}

#[test]
fn squeeze_translate_moves_moments() {
    let grid = Grid::new(-12.0, 12.0, 4096).unwrap();
    let phi = gauss(0.0, 1.0, grid);
    let psi = squeeze_translate(&phi, 3.0, 2.0).unwrap();
    let m = moments(&psi).unwrap();
    assert!((m.mu_z - 3.0).abs() < 1e-8);
    assert!((m.delta_z - 0.5).abs() < 1e-8);
    assert!((psi.norm() - 1.0).abs() < 1e-10);
    // the squeezed Gaussian is exactly g_{3, 1/2}
    let d = fubini_study_distance(&psi, &gauss(3.0, 0.5, grid)).unwrap();
    assert!(d < 1e-6, "{d}");
}

#[test]
fn manifold_state_realizes_expected_moments() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let phi = GridWavefunction::superpose(&[(c(0.6), &gauss(-10.0, 1.0, grid)), (c(0.8), &gauss(10.0, 1.0, grid))]).unwrap();
    let st = ManifoldState::new(phi, -4.0, 0.7);
    let real = moments(&st.realize().unwrap()).unwrap();
    let exp = st.expected_moments().unwrap();
    assert!((real.mu_z - exp.mu_z).abs() < 1e-7);
    assert!((real.delta_z - exp.delta_z).abs() < 1e-7);
}

#[test]
fn tangent_tau_of_gaussian_is_analytic() {
    let grid = Grid::new(-12.0, 12.0, 4096).unwrap();
    let g = gauss(0.0, 1.0, grid);
    let t = tangent_tau(&g);
    let err = grid
        .points()
        .zip(t.values().iter().zip(g.values()))
        .map(|(z, (t, g))| (t - g * (z / 2.0)).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

fn two_slit_state(al: Complex64, be: Complex64, grid: Grid) -> GridWavefunction {
    GridWavefunction::superpose(&[(al, &gauss(-10.0, 1.0, grid)), (be, &gauss(10.0, 1.0, grid))]).unwrap()
}

#[test]
fn tangents_are_horizontal() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let real = two_slit_state(c(0.5), c(0.75f64.sqrt()), grid);
    assert!(fibre_component(&real, &tangent_tau(&real)).unwrap().abs() < 1e-8);
    assert!(fibre_component(&real, &tangent_s(&real).unwrap()).unwrap().abs() < 1e-8);
    let cplx = two_slit_state(Complex64::from_polar(0.6, 0.4), Complex64::from_polar(0.8, -1.1), grid);
    assert!(fibre_component(&cplx, &tangent_tau(&cplx)).unwrap().abs() < 1e-8);
    assert!(fibre_component(&cplx, &tangent_s(&cplx).unwrap()).unwrap().abs() < 1e-8);
    // tangency to the unit sphere
    assert!(inner_product(&cplx, &tangent_s(&cplx).unwrap()).unwrap().re.abs() < 1e-8);
}

#[test]
fn tangents_match_finite_differences() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let phi = two_slit_state(c(0.6), c(0.8), grid);
    let tt = tangent_tau(&phi);
    let ts = tangent_s(&phi).unwrap();
    let mut prev_err = f64::INFINITY;
    for h in [1e-2, 3e-3, 1e-3] {
        let shifted = squeeze_translate(&phi, h, 1.0).unwrap();
        let squeezed = squeeze_translate(&phi, 0.0, 1.0 + h).unwrap();
        let fd_tau = GridFunction::combine(&[(c(1.0 / h), &shifted), (c(-1.0 / h), &phi)]).unwrap();
        let fd_s = GridFunction::combine(&[(c(1.0 / h), &squeezed), (c(-1.0 / h), &phi)]).unwrap();
        let e_tau = GridFunction::combine(&[(c(1.0), &fd_tau), (c(-1.0), &tt)]).unwrap().norm() / tt.norm();
        let e_s = GridFunction::combine(&[(c(1.0), &fd_s), (c(-1.0), &ts)]).unwrap().norm() / ts.norm();
        assert!(e_tau < 5.0 * h && e_s < 5.0 * h, "h={h} e_tau={e_tau} e_s={e_s}");
        assert!(e_tau < prev_err);
        prev_err = e_tau;
    }
}

#[test]
fn step_orthogonality_two_and_three_gaussians() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let sym = two_slit_state(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), grid);
    assert!(step_orthogonality(&sym).unwrap().abs() < 1e-6);
    for (al, be) in [(0.3, 0.91), (0.9, 0.2), (0.5, 0.75f64.sqrt())] {
        let phi = two_slit_state(c(al), Complex64::from_polar(be, 2.0), grid);
        assert!(step_orthogonality(&phi).unwrap().abs() < 1e-6);
    }
    let grid = Grid::new(-60.0, 60.0, 8192).unwrap();
    let three = GridWavefunction::superpose(&[
        (c(0.5), &gauss(-20.0, 1.0, grid)),
        (Complex64::from_polar(0.7, 1.0), &gauss(0.0, 1.0, grid)),
        (c(0.2), &gauss(24.0, 1.0, grid)),
    ])
    .unwrap();
    assert!(step_orthogonality(&three).unwrap().abs() < 1e-6);
}

#[test]
fn manifold_metric_is_euclidean_in_rescaled_coordinates() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let phi = two_slit_state(c(0.5), c(0.75f64.sqrt()), grid);
    let n_tau = projective_norm_sqr(&phi, &tangent_tau(&phi)).unwrap().sqrt();
    let n_s = projective_norm_sqr(&phi, &tangent_s(&phi).unwrap()).unwrap().sqrt();
    for (dtau, ds) in [(0.01, 0.0), (0.0, 0.01), (0.01, 0.01), (-0.02, 0.015), (0.004, -0.03)] {
        let moved = squeeze_translate(&phi, dtau, f64::exp(ds)).unwrap();
        let rho = fubini_study_distance(&phi, &moved).unwrap();
        // rescaled coordinates u = n_tau·τ, v = n_s·s
        let (u, v) = (n_tau * dtau, n_s * ds);
        let rel = (rho * rho - (u * u + v * v)).abs() / (u * u + v * v);
        assert!(rel < 0.01, "({dtau},{ds}) rel {rel}");
    }
}

#[test]
fn tangent_s_norm_is_constant_along_the_squeeze_path() {
    let grid = Grid::default_for(-10.0, 10.0).unwrap();
    let phi = two_slit_state(c(0.6), c(0.8), grid);
    let n0 = projective_norm_sqr(&phi, &tangent_s(&phi).unwrap()).unwrap();
    for s in [0.3f64, 0.8] {
        let psi = squeeze_translate(&phi, 0.0, s.exp()).unwrap();
        let n = projective_norm_sqr(&psi, &tangent_s(&psi).unwrap()).unwrap();
        assert!((n - n0).abs() / n0 < 1e-6, "s={s}: {n} vs {n0}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructors_and_transforms_preserve_norm(
        a in -4.0f64..4.0, w in 0.5f64..2.0, p in -2.0f64..2.0,
        tau in -3.0f64..3.0, s in -0.5f64..0.8,
    ) {
        let grid = Grid::new(-30.0, 30.0, 4096).unwrap();
        let g = make_gaussian(GaussianParams::new(a, w, p).unwrap(), grid).unwrap();
        prop_assert!((g.norm() - 1.0).abs() < 1e-10);
        let t = squeeze_translate(&g, tau, s.exp()).unwrap();
        prop_assert!((t.norm() - 1.0).abs() < 1e-10);
        let m = moments(&t).unwrap();
        prop_assert!((m.mu_z - (a + tau)).abs() < 1e-6);
        prop_assert!((m.delta_z - w * (-s).exp()).abs() < 1e-6);
    }

    #[test]
    fn geometry_is_phase_invariant(theta in 0.0f64..TAU, phi_theta in 0.0f64..TAU, sep in 0.0f64..6.0) {
        let grid = Grid::new(-20.0, 20.0, 2048).unwrap();
        let x = gauss(0.0, 1.0, grid);
        let y = gauss(sep, 1.3, grid);
        let d0 = fubini_study_distance(&x, &y).unwrap();
        let d1 = fubini_study_distance(&x.with_phase(theta), &y.with_phase(phi_theta)).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-10);
        let m0 = moments(&y).unwrap();
        let m1 = moments(&y.with_phase(theta)).unwrap();
        prop_assert!((m0.delta_z - m1.delta_z).abs() < 1e-12);
        let o0 = step_orthogonality(&y).unwrap();
        let o1 = step_orthogonality(&y.with_phase(theta)).unwrap();
        prop_assert!((o0 - o1).abs() < 1e-10);
    }

    #[test]
    fn two_gaussian_moments_invert(
        alpha_sq in 0.05f64..0.95, mu in -5.0f64..5.0, sep in 12.0f64..24.0,
    ) {
        let beta_sq = 1.0 - alpha_sq;
        let (c0, d0) = (mu - beta_sq * sep, mu + alpha_sq * sep);
        let grid = Grid::new(-40.0, 40.0, 8192).unwrap();
        let phi = GridWavefunction::superpose(&[
            (c(alpha_sq.sqrt()), &gauss(c0, 1.0, grid)),
            (c(beta_sq.sqrt()), &gauss(d0, 1.0, grid)),
        ]).unwrap();
        let m = moments(&phi).unwrap();
        let (cc, dd) = two_gaussian_centers(alpha_sq, beta_sq, m.mu_z, m.delta_z.powi(2) - 1.0).unwrap();
        let (mu2, var2) = two_gaussian_moments(alpha_sq, beta_sq, cc, dd);
        prop_assert!((mu2 - m.mu_z).abs() < 1e-8);
        prop_assert!((var2 + 1.0 - m.delta_z.powi(2)).abs() < 1e-8);
        prop_assert!((cc - c0).abs() < 1e-6 && (dd - d0).abs() < 1e-6);
    }
}
