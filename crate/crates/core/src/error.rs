use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not strictly inside the unit disk")]
    PointOutsideDisk { re: f64, im: f64 },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arcs overlap: {0}")]
    OverlappingArcs(String),

    #[error("quadrature tolerance {tolerance:e} not met: estimate {estimate}, error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64, tolerance: f64 },

    #[error("root finder did not converge after {iterations} iterations (max residual {residual:e})")]
    RootFinding { iterations: usize, residual: f64 },

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("map is not centered: |F(0)| = {0:e}")]
    NotCentered(f64),

    #[error("ray profile has not converged (last increment {0:e})")]
    UnconvergedProfile(f64),

    #[error("near-degenerate boundary preimages (separation {0:e})")]
    NearDegenerate(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
