use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument must be nonzero")]
    ZeroArgument,

    #[error("tau must lie in the upper half-plane (got Im = {im})")]
    NotInUpperHalfPlane { im: f64 },

    #[error("point is within {radius:e} of the period lattice (distance {distance:e})")]
    PoleProximity { distance: f64, radius: f64 },

    #[error("series outside its convergence domain: {0}")]
    ConvergenceDomain(String),

    #[error("modular reduction did not terminate after {iterations} steps")]
    NonTermination { iterations: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("denominator too close to zero ({magnitude:e})")]
    NearSingular { magnitude: f64 },

    #[error("non-finite value produced in {0}")]
    Overflow(&'static str),

    #[error("invalid tolerance policy: {0}")]
    InvalidPolicy(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable name, used by the CLI error object and the C API.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroArgument => "ZeroArgument",
            Error::NotInUpperHalfPlane { .. } => "NotInUpperHalfPlane",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::ConvergenceDomain(_) => "ConvergenceDomain",
            Error::NonTermination { .. } => "NonTermination",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::NearSingular { .. } => "NearSingular",
            Error::Overflow(_) => "Overflow",
            Error::InvalidPolicy(_) => "InvalidPolicy",
            Error::Parse { .. } => "Parse",
            Error::Config(_) => "Config",
        }
    }
}
