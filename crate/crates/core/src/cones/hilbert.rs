//! Hilbert bases of `C ∩ ℤ^N` for pointed rational cones (Gordan's lemma).
//!
//! Every irreducible lattice point of `C` lies in the zonotope
//! `{Σ t_i r_i : 0 ≤ t_i ≤ 1}` over the primitive extreme rays `r_i`: if some
//! coefficient reaches 1 the corresponding ray can be split off. We enumerate
//! the integral points of the zonotope's bounding box that lie in `C`, order
//! them by a positive grading and keep those that no smaller irreducible
//! divides.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{check_dim, to_qvec, ConeError, RationalCone, ZVec};
use crate::qlinalg::{dot, QMat, QVec, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertBasis {
    /// Irreducible elements, sorted by degree then lexicographically.
    #[serde(with = "super::zser::vecs")]
    pub elements: Vec<ZVec>,
    /// Half-spaces of the ambient cone, used to prune decompositions.
    #[serde(skip)]
    cone_halfspaces: Vec<QVec>,
}

/// A full-rank sublattice of `ℤ^N`, given by basis rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublattice {
    #[serde(with = "super::zser::vecs")]
    pub basis: Vec<ZVec>,
}

impl Sublattice {
    pub fn new(basis: Vec<ZVec>) -> Result<Self, ConeError> {
        let n = basis.len();
        if basis.iter().any(|b| b.len() != n) {
            return Err(ConeError::BadLattice);
        }
        let m = QMat::from_rows(basis.iter().map(|b| to_qvec(b)).collect())?;
        if n > 0 && m.determinant()?.is_zero() {
            return Err(ConeError::BadLattice);
        }
        Ok(Sublattice { basis })
    }

    /// Index `[ℤ^N : L]`.
    pub fn index(&self) -> BigInt {
        let m = QMat::from_rows(self.basis.iter().map(|b| to_qvec(b)).collect())
            .expect("validated on construction");
        m.determinant()
            .expect("square")
            .to_integer()
            .expect("integral matrix")
            .abs()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        // Solve x = Σ u_i b_i and test integrality.
        let m = QMat::from_rows(self.basis.iter().map(|b| to_qvec(b)).collect())
            .expect("validated on construction")
            .transpose();
        match crate::qlinalg::solve_linear(&m, &to_qvec(x)) {
            Ok(Some(u)) => u.iter().all(Rat::is_integer),
            _ => false,
        }
    }
}

/// What to intersect the monoid with in [`veronese_restrict`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VeroneseTarget {
    Lattice(Sublattice),
    Subcone(RationalCone),
}

fn grading(halfspaces: &[QVec], dim: usize) -> QVec {
    halfspaces
        .iter()
        .fold(vec![Rat::zero(); dim], |acc, h| crate::qlinalg::add(&acc, h))
}

fn in_cone(halfspaces: &[QVec], x: &[Rat]) -> bool {
    halfspaces.iter().all(|h| !dot(h, x).is_negative())
}

fn box_points(lo: &[BigInt], hi: &[BigInt]) -> Vec<ZVec> {
    let mut out: Vec<ZVec> = vec![Vec::new()];
    for (l, h) in lo.iter().zip(hi) {
        let mut next = Vec::new();
        for p in &out {
            let mut x = l.clone();
            while &x <= h {
                let mut q = p.clone();
                q.push(x.clone());
                next.push(q);
                x += 1;
            }
        }
        out = next;
    }
    out
}

pub fn hilbert_basis(cone: &RationalCone) -> Result<HilbertBasis, ConeError> {
    let dim = cone.dim();
    check_dim(dim)?;
    let rays = cone.extreme_rays()?;
    let halfspaces = cone.halfspaces()?;
    let g = grading(&halfspaces, dim);

    let mut lo = vec![BigInt::zero(); dim];
    let mut hi = vec![BigInt::zero(); dim];
    for r in &rays {
        for j in 0..dim {
            let x = r[j].to_integer().expect("primitive rays are integral");
            if x.is_negative() {
                lo[j] += x;
            } else {
                hi[j] += x;
            }
        }
    }

    let mut candidates: Vec<(Rat, ZVec)> = box_points(&lo, &hi)
        .into_iter()
        .filter(|p| super::convert::is_nonzero_int(p))
        .filter_map(|p| {
            let q = to_qvec(&p);
            in_cone(&halfspaces, &q).then(|| (dot(&g, &q), p))
        })
        .collect();
    candidates.sort();

    let mut elements: Vec<ZVec> = Vec::new();
    for (_, x) in candidates {
        let reducible = elements.iter().any(|h| {
            let diff: QVec = x.iter().zip(h).map(|(a, b)| Rat::from(a - b)).collect();
            in_cone(&halfspaces, &diff)
        });
        if !reducible {
            elements.push(x);
        }
    }
    Ok(HilbertBasis {
        elements,
        cone_halfspaces: halfspaces,
    })
}

/// Hilbert basis of `(C ∩ ℤ^N) ∩ L` for a finite-index sublattice or a rational
/// subcone `L`.
pub fn veronese_restrict(
    cone: &RationalCone,
    target: &VeroneseTarget,
) -> Result<HilbertBasis, ConeError> {
    check_dim(cone.dim())?;
    match target {
        VeroneseTarget::Subcone(sub) => {
            if sub.dim() != cone.dim() {
                return Err(ConeError::DimensionMismatch {
                    expected: cone.dim(),
                    found: sub.dim(),
                });
            }
            hilbert_basis(&cone.intersect(sub)?)
        }
        VeroneseTarget::Lattice(lattice) => {
            let n = cone.dim();
            if lattice.basis.len() != n {
                return Err(ConeError::BadLattice);
            }
            let basis: Vec<QVec> = lattice.basis.iter().map(|b| to_qvec(b)).collect();
            let halfspaces = cone.halfspaces()?;
            // In lattice coordinates u (x = Σ u_i b_i) the normals become ψ·b_i.
            let pulled: Vec<QVec> = halfspaces
                .iter()
                .map(|psi| basis.iter().map(|b| dot(psi, b)).collect())
                .collect();
            let inner = hilbert_basis(&RationalCone::from_halfspaces(n, pulled)?)?;
            let g = grading(&halfspaces, n);
            let mut elements: Vec<(Rat, ZVec)> = inner
                .elements
                .iter()
                .map(|u| {
                    let x: ZVec = (0..n)
                        .map(|j| {
                            u.iter()
                                .zip(&lattice.basis)
                                .map(|(ui, b)| ui * &b[j])
                                .sum::<BigInt>()
                        })
                        .collect();
                    (dot(&g, &to_qvec(&x)), x)
                })
                .collect();
            elements.sort();
            Ok(HilbertBasis {
                elements: elements.into_iter().map(|(_, x)| x).collect(),
                cone_halfspaces: halfspaces,
            })
        }
    }
}

impl HilbertBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Writes `point` as an ℕ-combination of the basis by depth-first search,
    /// pruning remainders that leave the cone. Returns multiplicities aligned
    /// with `elements`.
    pub fn decompose(&self, point: &[BigInt]) -> Option<Vec<u64>> {
        let mut counts = vec![0u64; self.elements.len()];
        if self.elements.is_empty() {
            return point.iter().all(Zero::is_zero).then_some(counts);
        }
        let mut dead: HashSet<(ZVec, usize)> = HashSet::new();
        let top = self.elements.len() - 1;
        self.search(point.to_vec(), top, &mut counts, &mut dead)
            .then_some(counts)
    }

    // Only indices <= `upto` may be used, so each multiset is visited once;
    // larger-degree elements are tried first.
    fn search(
        &self,
        rest: ZVec,
        upto: usize,
        counts: &mut [u64],
        dead: &mut HashSet<(ZVec, usize)>,
    ) -> bool {
        if rest.iter().all(Zero::is_zero) {
            return true;
        }
        if dead.contains(&(rest.clone(), upto)) {
            return false;
        }
        for i in (0..=upto).rev() {
            let next: ZVec = rest
                .iter()
                .zip(&self.elements[i])
                .map(|(a, b)| a - b)
                .collect();
            if !self.cone_halfspaces.is_empty() && !in_cone(&self.cone_halfspaces, &to_qvec(&next))
            {
                continue;
            }
            counts[i] += 1;
            if self.search(next, i, counts, dead) {
                return true;
            }
            counts[i] -= 1;
        }
        dead.insert((rest, upto));
        false
    }
}
