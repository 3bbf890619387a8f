use std::f64::consts::PI;

use collapse_core::detector::*;
use collapse_core::hilbert::{
    gaussian_overlap_analytic, inner_product, make_gaussian, GaussianParams, Grid, GridWavefunction,
};
use collapse_core::Complex64;
use proptest::prelude::*;

fn gauss(c: f64, w: f64, grid: Grid) -> GridWavefunction {
    make_gaussian(GaussianParams::real(c, w).unwrap(), grid).unwrap()
}

struct Setup {
    geo: SlitGeometry,
    grid: Grid,
    class_b: PhysicalEigenstateClass,
}

fn setup() -> Setup {
    let geo = SlitGeometry::double_slit();
    let grid = geo.grid(8.0).unwrap();
    let class_b = PhysicalEigenstateClass::gaussian(geo.detector().unwrap(), geo.delta, grid).unwrap();
    Setup { geo, grid, class_b }
}

#[test]
fn reference_state_defines_the_class() {
    let s = setup();
    let g_b = gauss(s.geo.b, s.geo.delta, s.grid);
    assert!(s.class_b.reference_probability > 0.999);
    assert!(is_physical_eigenstate(&g_b, &s.class_b).unwrap());
}

#[test]
fn wide_state_stays_in_class() {
    let s = setup();
    let wide = gauss(s.geo.b, 100.0 * s.geo.delta, s.grid);
    let p = detection_probability(&wide, &s.class_b.detector).unwrap();
    assert!(p >= s.class_b.threshold(), "{p}");
    assert!(is_physical_eigenstate(&wide, &s.class_b).unwrap());
}

#[test]
fn displaced_state_is_orthogonal_but_equivalent() {
    let s = setup();
    let (b, d) = (s.geo.b, s.geo.delta);
    let shifted = gauss(b - 1e-8, d, s.grid);
    assert!(is_physical_eigenstate(&shifted, &s.class_b).unwrap());
    let ov = inner_product(&s.class_b.reference, &shifted).unwrap().norm();
    assert!(ov < (-12.0f64).exp(), "{ov}");
}

#[test]
fn superposition_is_not_measurable_without_displacement() {
    let s = setup();
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let phi = GridWavefunction::superpose(&[(h, &gauss(s.geo.a, s.geo.delta, s.grid)), (h, &s.class_b.reference)])
        .unwrap();
    assert!(!is_physical_eigenstate(&phi, &s.class_b).unwrap());
}

#[test]
fn class_distances_of_superpositions() {
    let s = setup();
    let g_a = gauss(s.geo.a, s.geo.delta, s.grid);
    for (alpha, beta, want) in [(0.5f64.sqrt(), 0.5f64.sqrt(), PI / 4.0), (0.5, 0.75f64.sqrt(), PI / 6.0)] {
        let phi = GridWavefunction::superpose(&[
            (Complex64::new(alpha, 0.0), &g_a),
            (Complex64::new(beta, 0.0), &s.class_b.reference),
        ])
        .unwrap();
        assert!((two_gaussian_class_distance(beta) - want).abs() < 1e-12);
        let d = class_distance(&phi, &s.class_b, DEFAULT_R_SIGMA).unwrap();
        assert!((d.angle - want).abs() < 1e-6, "{} vs {want}", d.angle);
    }
    // arccos(1 - e) ~ sqrt(2e) magnifies the ~1e-10 interpolation error
    let d = class_distance(&s.class_b.reference, &s.class_b, DEFAULT_R_SIGMA).unwrap();
    assert!(d.angle < 1e-4, "{}", d.angle);
}

#[test]
fn class_distance_finds_displaced_member() {
    let s = setup();
    let moved = gauss(s.geo.b + 3.3e-7, 4.0 * s.geo.delta, s.grid);
    let d = class_distance(&moved, &s.class_b, DEFAULT_R_SIGMA).unwrap();
    assert!(d.angle < 1e-3, "{d:?}");
    assert!((d.tau - 3.3e-7).abs() < 1e-11);
    assert!((d.s + 4f64.ln()).abs() < 1e-3);
}

#[test]
fn far_gaussian_is_invisible() {
    let grid = Grid::new(-40.0, 40.0, 8001).unwrap();
    let det = DetectorConfig::new(0.0, 2.0, 0.05, 1e-4).unwrap();
    let far = gauss(-22.0, 0.5, grid);
    assert!(detection_probability(&far, &det).unwrap() < 1e-8);
}

#[test]
fn orthogonal_classes() {
    let geo = SlitGeometry::double_slit();
    let d = geo.delta;
    for &(sa, wa) in &[(0.0, 1.0), (3e-8, 10.0), (-1e-6, 100.0)] {
        for &(sb, wb) in &[(0.0, 1.0), (-1e-8, 1.0), (2e-6, 100.0), (-2e-6, 300.0)] {
            let ga = GaussianParams::real(geo.a + sa, wa * d).unwrap();
            let gb = GaussianParams::real(geo.b + sb, wb * d).unwrap();
            let (log_mag, _) = gaussian_overlap_analytic(ga, gb);
            assert!(log_mag < (1e-15f64).ln(), "{log_mag}");
        }
    }
}

#[test]
fn halving_cells_is_stable_for_smooth_states() {
    let grid = Grid::new(-10.0, 10.0, 4001).unwrap();
    let phi = gauss(0.3, 1.0, grid);
    let coarse = DetectorConfig::new(0.0, 8.0, 0.1, 1e-4).unwrap();
    let fine = DetectorConfig::new(0.0, 8.0, 0.05, 1e-4).unwrap();
    let (p, q) = (detection_probability(&phi, &coarse).unwrap(), detection_probability(&phi, &fine).unwrap());
    assert!((p - q).abs() < 1e-3);
}

#[test]
fn r_sigma_window() {
    let grid = Grid::new(-10.0, 10.0, 4001).unwrap();
    let det = DetectorConfig::new(0.0, 4.0, 0.05, 1e-4).unwrap();
    assert!(r_sigma_contained(&gauss(0.0, 0.3, grid), &det, 5.0).unwrap());
    assert!(!r_sigma_contained(&gauss(1.0, 0.3, grid), &det, 5.0).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enlarging_detector_never_decreases_probability(c in -3.0f64..3.0, w in 0.2f64..2.0, n in 1usize..40, extra in 1usize..20) {
        let grid = Grid::new(-20.0, 20.0, 4001).unwrap();
        let phi = gauss(c, w, grid);
        let cell = 0.1;
        let small = DetectorConfig::new(0.0, cell * n as f64, cell, 1e-4).unwrap();
        let big = DetectorConfig::new(0.0, cell * (n + 2 * extra) as f64, cell, 1e-4).unwrap();
        prop_assert!(detection_probability(&phi, &big).unwrap() >= detection_probability(&phi, &small).unwrap() - 1e-12);
    }

    #[test]
    fn membership_survives_translations_inside_detector(shift in -0.4f64..0.4) {
        let grid = Grid::new(-10.0, 10.0, 4001).unwrap();
        let det = DetectorConfig::new(0.0, 4.0, 0.02, 1e-3).unwrap();
        let class = PhysicalEigenstateClass::gaussian(det, 0.3, grid).unwrap();
        let moved = gauss(shift, 0.3, grid);
        prop_assert!(r_sigma_contained(&moved, &det, DEFAULT_R_SIGMA).unwrap());
        prop_assert!(is_physical_eigenstate(&moved, &class).unwrap());
    }
}
