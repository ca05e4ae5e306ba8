use thiserror::Error;

use crate::lvfamily::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid rational literal `{0}`")]
    ParseRational(String),

    #[error("n must be a positive integer (got {0})")]
    InvalidOrder(u32),

    #[error("curve (n = {curve_n}, {curve_family}) does not match system (n = {system_n}, {system_family})")]
    SystemMismatch {
        curve_n: u32,
        curve_family: Family,
        system_n: u32,
        system_family: Family,
    },

    #[error("polynomial still depends on b; specialize it before numeric evaluation")]
    NotSpecialized,

    #[error("expected {expected} exponents, got {got}")]
    ExponentCount { expected: usize, got: usize },

    #[error("exponent vector is not in the cofactor kernel")]
    NotInKernel,

    #[error("exponent denominator vanishes at b = {0}")]
    SingularSpecialization(String),

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("invalid integration parameters: {0}")]
    InvalidIntegration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
