//! Exact-arithmetic toolkit for Zariski decompositions, Nakayama
//! σ-invariants, Diophantine approximation, rational cones and Hilbert bases,
//! and the cone-splitting descent used to prove finite generation of adjoint
//! rings, on surfaces presented by an intersection form.
//!
//! Every number is an exact rational ([`qlinalg::Rat`]); nothing rounds.

pub mod cli;
pub mod cones;
pub mod dioph;
pub mod fingenlab;
pub mod qlinalg;
pub mod selftest;
pub mod surface;
pub mod zariski;

pub use qlinalg::{q, QMat, QVec, Rat};
pub use surface::{Divisor, SurfaceModel};
