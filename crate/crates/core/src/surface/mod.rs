//! Combinatorial surface models and exact divisor arithmetic.
//!
//! A model is a finite list of named classes, a symmetric intersection form,
//! declared generators of the effective cone and a canonical class. The
//! declared generators are trusted to generate the effective cone, so
//! nefness is tested against them alone.

mod divisor;
mod model;

pub use divisor::{Divisor, DivisorRecord, ModelTag};
pub use model::{Generator, ModelFile, NefCheck, PsefCheck, SurfaceModel, BUNDLED_MODELS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlinalg::{LinalgError, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("divisors belong to different models (`{left}` and `{right}`)")]
    ModelMismatch { left: String, right: String },
    #[error("cannot parse divisor: {0}")]
    Parse(String),
    #[error("invalid surface model: {0}")]
    InvalidModel(String),
    #[error("cannot read model file: {0}")]
    Io(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Result of [`lambda_threshold`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Threshold {
    Finite(Rat),
    Infinite,
}

impl Threshold {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Threshold::Finite(r) => Some(r),
            Threshold::Infinite => None,
        }
    }
}

/// `sup{t ≥ 0 : ⌊B + tP − N⌋ ≤ 0}`.
///
/// Requires `⌊B − N⌋ ≤ 0`. The supremum is the minimum over classes `T` with
/// positive `P`-coefficient of `(1 − b_T + n_T) / p_T`, or infinite when `P`
/// has no positive coefficient.
pub fn lambda_threshold(b: &Divisor, p: &Divisor, n: &Divisor) -> Result<Threshold, SurfaceError> {
    b.try_sub(n)?;
    p.try_sub(b)?;
    threshold(b.coeffs(), p.coeffs(), n.coeffs()).map_err(|i| {
        SurfaceError::Precondition(format!(
            "round-down of B - N is positive along {}",
            b.classes()[i]
        ))
    })
}

/// [`lambda_threshold`] on bare coefficient vectors of equal length.
pub fn lambda_threshold_coeffs(b: &[Rat], p: &[Rat], n: &[Rat]) -> Result<Threshold, SurfaceError> {
    for v in [p, n] {
        if v.len() != b.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: b.len(),
                found: v.len(),
            }
            .into());
        }
    }
    threshold(b, p, n).map_err(|i| {
        SurfaceError::Precondition(format!("round-down of B - N is positive at index {i}"))
    })
}

/// The threshold, or the index where `⌊B − N⌋` is positive.
fn threshold(b: &[Rat], p: &[Rat], n: &[Rat]) -> Result<Threshold, usize> {
    let bn: Vec<Rat> = b.iter().zip(n).map(|(x, y)| x - y).collect();
    if let Some(i) = bn.iter().position(|c| c.floor().is_positive()) {
        return Err(i);
    }
    let mut best: Option<Rat> = None;
    for (pt, bt) in p.iter().zip(&bn) {
        if !pt.is_positive() {
            continue;
        }
        let t = (Rat::one() - bt) / pt;
        best = Some(match best {
            Some(cur) => cur.min(t),
            None => t,
        });
    }
    Ok(best.map_or(Threshold::Infinite, Threshold::Finite))
}
