//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, transforms, profiles, solvers and IO.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid does not meet an operation's minimum size requirement.
    #[error("grid too small: M = {m}, this operation needs M >= {min}")]
    GridTooSmall { m: usize, min: usize },

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: (L = {l_a}, M = {m_a}) vs (L = {l_b}, M = {m_b})")]
    GridMismatch { l_a: f64, m_a: usize, l_b: f64, m_b: usize },

    /// A field failed its declared-parity or finiteness invariant.
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A tabulated curvature profile was queried outside its table.
    #[error("curvature table covers |x| <= {max_x}, queried at |x| = {x}")]
    OutsideTable { x: f64, max_x: f64 },

    /// A curvature table failed validation at load time.
    #[error("curvature table rejected: {0}")]
    BadTable(String),

    /// The fixed-point map produced an exponent beyond the overflow guard;
    /// the iterate violates the sign structure the map relies on.
    #[error("fixed-point map exponent {exponent:.3e} at x = {x} exceeds the overflow guard {limit}")]
    ExponentOverflow { exponent: f64, x: f64, limit: f64 },

    /// An iteration produced non-finite values or ran away.
    #[error("iteration diverged: {0}")]
    Diverged(String),

    /// A Newton linear system is numerically singular.
    #[error("linear system near-singular: nondegeneracy margin {margin:.3e} below floor {floor:.3e}")]
    NearSingular { margin: f64, floor: f64 },

    /// A field value is outside the mathematical domain of an operation
    /// (e.g. log of a nonpositive sample).
    #[error("domain error at x = {x}: {what} = {value}")]
    Domain { what: &'static str, x: f64, value: f64 },

    /// Invalid run configuration or command-line usage.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed CSV input (fields, branches, tables).
    #[error("csv parse error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
