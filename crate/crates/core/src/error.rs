use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial degree {0} is not supported (maximum is 4)")]
    UnsupportedDegree(usize),

    #[error("unsupported expansion order {0} (expected 0, 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("probability {probability:.3e} reached the {region} edge of the grid at step {step} ({branch})")]
    Aliasing {
        step: usize,
        branch: &'static str,
        region: &'static str,
        probability: f64,
    },

    #[error("trajectory escaped at step {step} (|x| = {magnitude:.3e})")]
    TrajectoryEscape { step: usize, magnitude: f64 },

    #[error("singular exponent matrix at step {step} (condition number {condition:.3e})")]
    SingularExponent { step: usize, condition: f64 },

    #[error("series too short: {0} points, at least 9 (8 steps) are required")]
    SeriesTooShort(usize),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
