use thiserror::Error;

/// Errors raised by the laboratory's constructors and operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i is not inside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("value {value} is outside the range {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("curves end at different boundary points ({first} vs {second})")]
    EndpointMismatch { first: f64, second: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function evaluation overflowed for both f and 1/f at {re}+{im}i")]
    EvaluationOverflow { re: f64, im: f64 },

    #[error("point {re}+{im}i lies outside the Stolz angle")]
    OutsideStolzAngle { re: f64, im: f64 },

    #[error("schedule violates its defining conditions: {0}")]
    InvalidSchedule(String),

    #[error("malformed curve data: {0}")]
    CurveFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
