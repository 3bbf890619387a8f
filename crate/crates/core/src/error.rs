use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid too coarse: width {width} needs spacing <= {max_spacing}, grid has {spacing}")]
    GridTooCoarse {
        width: f64,
        spacing: f64,
        max_spacing: f64,
    },
    #[error("state support clipped by the grid: {lost_mass:e} of the mass falls outside")]
    SupportClipped { lost_mass: f64 },
    #[error("states live on different grids")]
    GridMismatch,
    #[error("boundary mass {mass:e} too large for reliable moments")]
    BoundaryMass { mass: f64 },
    #[error("squeezed state under-resolved: width {width} < {min_width}")]
    ResolutionLoss { width: f64, min_width: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("eigendecomposition failed")]
    EigenFailure,
    #[error("tangent frame degenerate (norm {norm:e})")]
    FrameDegeneracy { norm: f64 },
    #[error("value {value} outside interval [{lo}, {hi}]")]
    OutOfInterval { value: f64, lo: f64, hi: f64 },
    #[error("detector interval [{lo}, {hi}] not inside grid domain")]
    DetectorOutsideGrid { lo: f64, hi: f64 },
    #[error("scheme unstable: {0}")]
    Instability(String),
    #[error("point source at {0} lies on or outside the domain boundary")]
    SourceOnBoundary(f64),
    #[error("absorbed mass {absorbed} below {required} at t_final")]
    NonConvergence { absorbed: f64, required: f64 },
    #[error("histogram range [{lo}, {hi}] not covered by the density grid")]
    BinningMismatch { lo: f64, hi: f64 },
    #[error("input not normalized: norm^2 = {0}")]
    NotNormalized(f64),
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
