//! One-dimensional states on a uniform grid: Gaussian states, quadrature
//! inner products, Fubini-Study geometry, position moments and the
//! translate/squeeze manifold.

pub mod calculus;
mod gaussian;
mod grid;
mod manifold;

pub use gaussian::{
    gaussian_distance_analytic, gaussian_overlap_analytic, make_gaussian, GaussianParams, CLIP_TOLERANCE,
    MIN_POINTS_PER_WIDTH,
};
pub use grid::{
    fubini_study_distance, inner_product, projective_norm_sqr, Grid, GridFunction, GridWavefunction, MIN_POINTS,
};
pub use manifold::{
    fibre_component, moments, squeeze_translate, step_orthogonality, tangent_s, tangent_tau, two_gaussian_centers,
    two_gaussian_moments, ManifoldState, Moments, BOUNDARY_MASS_TOLERANCE, WELL_SEPARATED,
};
