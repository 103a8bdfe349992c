use thiserror::Error;

pub type Result<T> = std::result::Result<T, CcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcError {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("collision: bodies {i} and {j} are {distance:e} apart (tolerance {tolerance:e})")]
    Collision {
        i: usize,
        j: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error("configuration is not centered: |center of mass| = {offset:e}")]
    NotCentered { offset: f64 },

    /// A divisor of a closed-form expression vanished.
    #[error("singular {factor} = {value:e} at x = {x}, y = {y}")]
    Singular {
        factor: &'static str,
        value: f64,
        x: f64,
        y: f64,
    },

    #[error("no sign change of F(x, {y}) in [{lo}, {hi}]")]
    NoBracket { y: f64, lo: f64, hi: f64 },

    #[error("root at x = {x}, y = {y} gives non-positive apex mass m = {m}")]
    NonPositiveMass { x: f64, y: f64, m: f64 },

    #[error("root finding failed at y = {y}: {reason}")]
    RootLost { y: f64, reason: String },

    #[error("anchor point (1, √3) could not be reproduced: {0}")]
    AnchorFailure(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for CcError {
    fn from(err: std::io::Error) -> Self {
        CcError::Io(err.to_string())
    }
}
