//! Numerical laboratory for a random-matrix model of wavefunction collapse.
//!
//! States live on a uniform one-dimensional grid ([`hilbert`]). Random
//! Hamiltonians are drawn from the Gaussian Unitary Ensemble ([`gue`]), the
//! reduced walk on the two-parameter manifold of translated and squeezed
//! copies of a state is simulated in [`collapse`], detectors with finite
//! resolution are modelled in [`detector`], and the diffusion-equation and
//! semiclassical cross-checks live in [`diffusion`] and [`semiclassics`].

pub mod collapse;
pub mod detector;
pub mod diffusion;
mod error;
pub mod gue;
pub mod hilbert;
pub mod rng;
pub mod semiclassics;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
