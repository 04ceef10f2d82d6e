//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation point coincides with the pole at index {pole_index} (distance {distance:e})")]
    EvaluationAtPole { pole_index: usize, distance: f64 },

    #[error("degenerate residue at pole index {pole_index}: {reason}")]
    DegenerateResidue { pole_index: usize, reason: String },

    #[error("gauge produced a pole of order {order} at z = {location}; leading matrix norm {leading_norm:e}")]
    HigherOrderPole {
        location: String,
        order: usize,
        leading_norm: f64,
    },

    #[error("operation requires {expected} gauge, system is tagged {found}")]
    GaugeTagMismatch { expected: String, found: String },

    #[error("pole positions too close: |x_{i} - x_{j}| = {distance:e}")]
    PolesTooClose { i: usize, j: usize, distance: f64 },

    #[error("Fuchs relation violated: exponent sum {sum} differs from {expected} by {deviation:e}")]
    FuchsViolation {
        sum: String,
        expected: String,
        deviation: f64,
    },

    #[error("series argument outside the convergence disk: |w| = {modulus} >= {limit}")]
    OutOfDisk { modulus: f64, limit: f64 },

    #[error("non-convergent parameters: {0}")]
    NonconvergentParams(String),

    #[error("resonant parameters: {0}")]
    ResonantParameters(String),

    #[error("monodromy representation is reducible; conjugator not unique up to scalar")]
    ReducibleRepresentation,

    #[error("integration path passes within {distance:e} of pole at {pole}")]
    PathTooClose { pole: String, distance: f64 },

    #[error("step size underflow at parameter {at}; local error target unreachable")]
    StepUnderflow { at: f64 },

    #[error("singular phase-space state: {0}")]
    SingularState(String),

    #[error("off-diagonal entry degenerate: {0}")]
    DegenerateOffDiagonal(String),

    #[error("moving pole collided with a fixed pole at t = {t}")]
    PoleCollision { t: String },

    #[error("trajectory blew up near t = {t_estimate} (movable pole)")]
    BlowUpDetected { t_estimate: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {n} poles")]
    IndexOutOfRange { index: usize, n: usize },
}

pub type Result<V> = std::result::Result<V, Error>;
