use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the resonance pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("invalid cross-section: {0}")]
    InvalidCrossSection(String),

    #[error("mode index {index} out of range (basis has {len} modes)")]
    ModeIndex { index: usize, len: usize },

    #[error("invalid sheet: {0}")]
    InvalidSheet(String),

    #[error("coordinate k = {k} must lie in the open lower half-plane")]
    UpperHalfPlane { k: Complex64 },

    #[error("point k = {k} is within {guard:e} of the ramification point nu^2 = {nu_sq}")]
    Ramification { k: Complex64, nu_sq: f64, guard: f64 },

    #[error("point k = {k} lies on a boundary ray between sheets (branch r_{j} is real)")]
    BoundaryRay { k: Complex64, j: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("potential is identically zero; no minimal support box exists")]
    ZeroPotential,

    #[error("grid [{grid_min}, {grid_max}] does not cover the support [{x_min}, {x_max}]")]
    GridCoverage {
        grid_min: f64,
        grid_max: f64,
        x_min: f64,
        x_max: f64,
    },

    #[error("free kernel requires Im r > 0 (physical sheet), got r = {0}")]
    NonPhysicalBranch(Complex64),

    #[error("pole proximity at k = {k}: singular margin {margin:e} below threshold")]
    PoleProximity { k: Complex64, margin: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("slope fit refused: {0}")]
    FitRefused(String),

    #[error("configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl ScatterError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScatterError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for ScatterError {
    fn from(e: std::io::Error) -> Self {
        ScatterError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;
