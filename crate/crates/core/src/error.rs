//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix entry is not finite: {what}")]
    NonFinite { what: &'static str },

    #[error("determinant must be positive, got {det}")]
    NonPositiveDeterminant { det: f64 },

    #[error("matrix is singular (det = {det})")]
    SingularMatrix { det: f64 },

    #[error("matrix is not symmetric: |U - U^T| = {deviation:.3e} exceeds {tol:.3e}")]
    NotSymmetric { deviation: f64, tol: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("energy is not isochoric: |W({scale}*F) - W(F)| = {deviation:.3e} at a sampled F")]
    NotIsochoric { scale: f64, deviation: f64 },

    #[error("function is not symmetric in its arguments: |g(x,y) - g(y,x)| = {deviation:.3e}")]
    AsymmetricPayload { deviation: f64 },

    #[error("ratio representation violates h(t) = h(1/t): deviation {deviation:.3e} at t = {t}")]
    RatioSymmetryViolation { t: f64, deviation: f64 },

    #[error("function evaluates to a non-finite value at {at}")]
    NonFiniteSample { at: f64 },

    #[error("argument {argument} outside the domain of {of}")]
    Domain { of: String, argument: f64 },

    #[error("differentiation stencil does not fit the domain at x = {at}")]
    StencilOutOfDomain { at: f64 },

    #[error("cannot keep the determinant positive along the stencil")]
    DegenerateStencil,

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("unknown energy \"{name}\"")]
    UnknownEnergy { name: String },

    #[error("parameter {name} = {value} is out of range for \"{energy}\" ({requirement})")]
    ParamOutOfRange {
        energy: String,
        name: String,
        value: f64,
        requirement: &'static str,
    },

    #[error("unknown parameter \"{name}\" for energy \"{energy}\"")]
    UnknownParam { energy: String, name: String },

    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },

    #[error("unknown identifier \"{name}\" at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("{func} expects {expected} argument(s), got {got} (at byte {pos})")]
    Arity {
        func: String,
        expected: usize,
        got: usize,
        pos: usize,
    },

    #[error("unbound variable \"{name}\"")]
    UnboundVariable { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
