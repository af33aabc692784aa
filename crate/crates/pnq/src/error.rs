use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("radial coordinate must be nonnegative, got {0}")]
    NegativeRadius(f64),

    #[error("coordinate is not finite: {0}")]
    NonFiniteCoordinate(f64),

    #[error(
        "invalid cell bounds: phi [{min_phi}, {max_phi}], r [{min_r}, {max_r}]"
    )]
    InvalidCellBounds {
        min_phi: f64,
        max_phi: f64,
        min_r: f64,
        max_r: f64,
    },

    #[error("point (phi={phi}, r={r}) lies outside the disk of radius {radius}")]
    PointOutsideDisk { phi: f64, r: f64, radius: f64 },

    #[error("density domain is empty: disk radius {0} must be positive and finite")]
    EmptyDensityDomain(f64),

    #[error("density has no closed-form mass function (median splitting only)")]
    EmpiricalDensity,

    #[error("cell cannot be split: {0}")]
    DegenerateSplit(String),

    #[error("leaf capacity must be at least 1")]
    ZeroCapacity,

    #[error("no cell at depth {depth}: tree not fully expanded (height {height})")]
    DepthNotExpanded { depth: usize, height: usize },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("index {index} out of range for subtree of {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error(
        "probability bound violated: f(dist) = {f_dist} exceeds the cell bound {bound}; \
         the distance lower bound is broken"
    )]
    BoundViolation { f_dist: f64, bound: f64 },

    #[error("frequency tables cover different universes ({a} vs {b} points)")]
    UniverseMismatch { a: usize, b: usize },

    #[error("frequency tables record different trial counts for point {point}")]
    TrialMismatch { point: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "temperature must be positive; for the threshold model pass a step \
         probability function directly"
    )]
    ZeroTemperature,

    #[error(
        "could not bracket target degree {target}: estimated degree is {at_low} at \
         R = {low} and {at_high} at R = {high}"
    )]
    CalibrationBracket {
        target: f64,
        low: f64,
        at_low: f64,
        high: f64,
        at_high: f64,
    },

    #[error("raster is empty")]
    EmptyRaster,

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
