//! Exact rational linear algebra: scalars, vectors, matrices, linear solving,
//! negative-definiteness testing and a small simplex solver.

// Tableau and elimination code reads best with explicit indices.
#![allow(clippy::needless_range_loop)]

mod lp;
mod matrix;
mod rat;

pub use lp::{lp_min, Constraint, LinearProgram, LpOutcome, Relation};
pub use matrix::{
    add, dot, is_negative_definite, is_zero_vec, max_abs, norm_sq, scale, solve_linear, sub,
    unit, zeros, Definiteness, QMat, QVec,
};
pub use rat::{q, ParseRatError, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix rows have different lengths")]
    Ragged,
}

/// Parses a comma-separated list of rationals, e.g. `"1/2, -3"`.
pub fn parse_qvec(s: &str) -> Result<QVec, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn format_qvec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(Rat::to_string).collect();
    format!("({})", parts.join(", "))
}
