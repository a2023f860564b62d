use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("theta grid of {points} points is too coarse for mode {mode} (need at least {required})")]
    GridTooCoarse {
        points: usize,
        mode: i32,
        required: usize,
    },

    #[error("operation requires a step profile")]
    NotStep,

    #[error("slab grids of the mode profiles do not match")]
    SlabMismatch,

    #[error("chart violation: |z| = {modulus} must stay below sqrt(2l-1) = {limit} for l = {l}")]
    ChartViolation { l: u32, modulus: f64, limit: f64 },

    #[error("points lie on different charts (l = {0} and l = {1})")]
    ChartMismatch(u32, u32),

    #[error("invalid channel window: {0}")]
    InvalidWindow(String),

    #[error("lambda = {0} is too close to a pole (|W| = {1:e})")]
    NearPole(Complex64, f64),

    #[error("lambda = {0} is not a simple zero of the Wronskian: {1}")]
    NotSimple(Complex64, String),

    #[error("winding number undefined: function vanishes on or too near the contour near {0}")]
    ZeroOnContour(Complex64),

    #[error("non-finite function value at {0}")]
    NonFinite(Complex64),

    #[error("determinant overflow at z = {0}; reduce K or use CYLRES_PRECISION=extended")]
    Overflow(Complex64),

    #[error("{0} failed to converge after {1} iterations")]
    NoConvergence(&'static str, usize),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
