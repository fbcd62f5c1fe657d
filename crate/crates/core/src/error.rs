use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight function: {0}")]
    InvalidWeight(String),
    #[error("weight evaluation out of range at z = {z}")]
    EvaluationRange { z: i64 },
    #[error("kernel row for state {state} does not terminate: tail mass {tail:e} after {steps} steps")]
    DivergingTail { state: i64, tail: f64, steps: usize },
    #[error("stationary window too small: boundary leakage {leakage:e} exceeds target {target:e}")]
    WindowTooSmall { leakage: f64, target: f64 },
    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("support of the exact law exceeds the memory budget ({cells} cells); try N <= {suggested_n}")]
    Budget { cells: usize, suggested_n: usize },
    #[error("conditioning on a value with zero mass: {0}")]
    ZeroMass(f64),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
