//! The combinatorial core of the finite-generation argument for adjoint rings
//! on surfaces: cone splitting with width and zig-zag descent, a replay of
//! the adjoint divisor arithmetic, and two worked counterexamples.

mod adjoint;
mod examples;
mod split;

pub use adjoint::{adjoint_trace, prime_coords, AdjointOutcome, AdjointTrace, PrimeCoords, TraceChecks};
pub use examples::{
    canonical_example, elliptic_support, elliptic_support_with, min_sample_bound, rr_lower_bound, CanonicalExample, GenerationVerdict,
    GradedSupport, CANONICAL_MAX_M, DEFAULT_SAMPLE_BOUND, MAX_SAMPLE_BOUND, MIN_SAMPLE_BOUND,
};
pub use split::{
    width_threshold, zigzag_descend, ConeSplit, WidthReport, WidthWitness, ZigzagChain, WIDTH_CAP,
    WIDTH_SCAN,
};

use thiserror::Error;

use crate::cones::ConeError;
use crate::qlinalg::LinalgError;
use crate::surface::SurfaceError;
use crate::zariski::ZariskiError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FingenError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not pseudo-effective: {0}")]
    NotPseudoEffective(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
