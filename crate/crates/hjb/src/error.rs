//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("NaN is not an extended real")]
    NotANumber,

    #[error("indeterminate sum (+inf) + (-inf)")]
    IndeterminateSum,

    #[error("improper function: contains -inf")]
    ImproperFunction,

    #[error("improper conjugand: no finite node")]
    ImproperConjugate,

    #[error("point {point:?} outside grid bounding box")]
    OutOfDomain { point: Vec<f64> },

    #[error("invalid grid axis: lo={lo}, hi={hi}, nodes={nodes}")]
    BadAxis { lo: f64, hi: f64, nodes: usize },

    #[error("grid/value length mismatch: grid has {expected} nodes, got {got} values")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown builtin model {0:?}")]
    UnknownModel(String),

    #[error("velocity box {have:?} fails to cover dom L bound {need}")]
    VelocityCoverage { have: (f64, f64), need: f64 },

    #[error("no valid step: <f, y-w> >= |y-w|^2")]
    NoValidStep,

    #[error("empty set")]
    EmptySet,

    #[error("witness search exhausted its budget at t={t}: boundary condition evidence failure")]
    BoundaryConditionFailure { t: f64 },

    #[error("dual grid must be symmetric about 0, got [{lo}, {hi}]")]
    AsymmetricDualGrid { lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
