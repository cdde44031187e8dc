//! Rational polyhedral cones and polytopes in dimension at most four.
//!
//! A cone is stored in generator form, half-space form (`ψ·x ≥ 0`), or both;
//! a polytope in vertex form, half-space form (`ψ·x ≥ c`), or both. Ray
//! generators and half-space normals are kept primitive integral, and
//! conversions return lexicographically sorted lists so serialized output is
//! deterministic.

mod convert;
mod hilbert;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::qlinalg::{dot, LinalgError, LinearProgram, QVec, Rat, Relation};

pub use convert::{
    cone_facets, cone_rays, primitive, primitive_halfspace, primitive_q, to_qvec,
};
pub use hilbert::{hilbert_basis, veronese_restrict, HilbertBasis, Sublattice, VeroneseTarget};

/// Serde adapters writing integers as plain JSON numbers (strings beyond the
/// `i64` range).
pub mod zser {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Int {
        Small(i64),
        Big(String),
    }

    impl Int {
        fn from_big(x: &BigInt) -> Int {
            x.to_i64().map_or_else(|| Int::Big(x.to_string()), Int::Small)
        }

        fn into_big<E: serde::de::Error>(self) -> Result<BigInt, E> {
            match self {
                Int::Small(n) => Ok(BigInt::from(n)),
                Int::Big(t) => t.parse().map_err(E::custom),
            }
        }
    }

    macro_rules! adapter {
        ($name:ident, $ty:ty, $raw:ty, $to:expr, $from:expr) => {
            pub mod $name {
                use super::*;
                use serde::{Deserializer, Serializer};

                pub fn serialize<S: Serializer>(v: &$ty, s: S) -> Result<S::Ok, S::Error> {
                    let raw: $raw = ($to)(v);
                    raw.serialize(s)
                }

                pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<$ty, D::Error> {
                    let raw = <$raw>::deserialize(d)?;
                    ($from)(raw)
                }
            }
        };
    }

    adapter!(int, BigInt, Int, Int::from_big, |r: Int| r.into_big());
    adapter!(
        vec,
        Vec<BigInt>,
        Vec<Int>,
        |v: &Vec<BigInt>| v.iter().map(Int::from_big).collect(),
        |r: Vec<Int>| r.into_iter().map(Int::into_big).collect()
    );
    adapter!(
        vecs,
        Vec<Vec<BigInt>>,
        Vec<Vec<Int>>,
        |v: &Vec<Vec<BigInt>>| v
            .iter()
            .map(|x| x.iter().map(Int::from_big).collect())
            .collect(),
        |r: Vec<Vec<Int>>| r
            .into_iter()
            .map(|x| x.into_iter().map(Int::into_big).collect())
            .collect()
    );
}

pub const MAX_DIM: usize = 4;

/// An integral vector.
pub type ZVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("dimension {0} exceeds the supported maximum of 4")]
    DimensionTooLarge(usize),
    #[error("vector of length {found} in a cone of dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone is not pointed (contains a line)")]
    NotPointed,
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("generator and half-space forms describe different sets")]
    Inconsistent,
    #[error("sublattice basis must be square, integral and of full rank")]
    BadLattice,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_dim(dim: usize) -> Result<(), ConeError> {
    if dim > MAX_DIM {
        Err(ConeError::DimensionTooLarge(dim))
    } else {
        Ok(())
    }
}

fn check_lengths<'a>(dim: usize, vs: impl IntoIterator<Item = &'a QVec>) -> Result<(), ConeError> {
    for v in vs {
        if v.len() != dim {
            return Err(ConeError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCone {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<QVec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<QVec>>,
}

impl RationalCone {
    /// Cone spanned by `generators`; each is rescaled to its primitive integral
    /// ray and zero vectors are dropped.
    pub fn from_generators(dim: usize, generators: Vec<QVec>) -> Result<Self, ConeError> {
        check_lengths(dim, &generators)?;
        let mut gens: Vec<QVec> = Vec::new();
        for g in generators {
            if g.iter().all(Rat::is_zero) {
                continue;
            }
            let p = primitive_q(&g);
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        Ok(RationalCone {
            dim,
            generators: Some(gens),
            halfspaces: None,
        })
    }

    /// Cone `{x : ψ·x ≥ 0}` over the given normals.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<QVec>) -> Result<Self, ConeError> {
        check_lengths(dim, &halfspaces)?;
        let hs = halfspaces.iter().map(|h| primitive_q(h)).collect();
        Ok(RationalCone {
            dim,
            generators: None,
            halfspaces: Some(hs),
        })
    }

    /// Both forms at once; fails if they disagree.
    pub fn with_both(
        dim: usize,
        generators: Vec<QVec>,
        halfspaces: Vec<QVec>,
    ) -> Result<Self, ConeError> {
        let v = Self::from_generators(dim, generators)?;
        let h = Self::from_halfspaces(dim, halfspaces)?;
        if !v.same_set(&h)? {
            return Err(ConeError::Inconsistent);
        }
        Ok(RationalCone {
            dim,
            generators: v.generators,
            halfspaces: h.halfspaces,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators_if_known(&self) -> Option<&[QVec]> {
        self.generators.as_deref()
    }

    pub fn halfspaces_if_known(&self) -> Option<&[QVec]> {
        self.halfspaces.as_deref()
    }

    /// Fills in whichever representation is missing.
    pub fn convert(&self) -> Result<RationalCone, ConeError> {
        check_dim(self.dim)?;
        match (&self.generators, &self.halfspaces) {
            (Some(_), Some(_)) => Ok(self.clone()),
            (Some(g), None) => Ok(RationalCone {
                dim: self.dim,
                generators: Some(g.clone()),
                halfspaces: Some(cone_facets(self.dim, g)),
            }),
            (None, Some(h)) => {
                let (mut rays, lin) = cone_rays(self.dim, h);
                rays.extend(lin);
                Ok(RationalCone {
                    dim: self.dim,
                    generators: Some(rays),
                    halfspaces: Some(h.clone()),
                })
            }
            (None, None) => unreachable!("constructors always set one form"),
        }
    }

    pub fn halfspaces(&self) -> Result<Vec<QVec>, ConeError> {
        match &self.halfspaces {
            Some(h) => Ok(h.clone()),
            None => Ok(self.convert()?.halfspaces.unwrap()),
        }
    }

    pub fn generators(&self) -> Result<Vec<QVec>, ConeError> {
        match &self.generators {
            Some(g) => Ok(g.clone()),
            None => Ok(self.convert()?.generators.unwrap()),
        }
    }

    /// Extreme rays (primitive, sorted). Fails for non-pointed cones.
    pub fn extreme_rays(&self) -> Result<Vec<QVec>, ConeError> {
        check_dim(self.dim)?;
        let h = self.halfspaces()?;
        let (rays, lin) = cone_rays(self.dim, &h);
        if !lin.is_empty() {
            return Err(ConeError::NotPointed);
        }
        Ok(rays)
    }

    pub fn is_pointed(&self) -> Result<bool, ConeError> {
        let h = self.halfspaces()?;
        Ok(cone_rays(self.dim, &h).1.is_empty())
    }

    pub fn member(&self, v: &[Rat]) -> Result<bool, ConeError> {
        if v.len() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let h = self.halfspaces()?;
        Ok(h.iter().all(|psi| !dot(psi, v).is_negative()))
    }

    /// Exact mutual containment of generators.
    pub fn same_set(&self, other: &RationalCone) -> Result<bool, ConeError> {
        for g in self.generators()? {
            if !other.member(&g)? {
                return Ok(false);
            }
        }
        for g in other.generators()? {
            if !self.member(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Intersection, in half-space form.
    pub fn intersect(&self, other: &RationalCone) -> Result<RationalCone, ConeError> {
        let mut h = self.halfspaces()?;
        h.extend(other.halfspaces()?);
        RationalCone::from_halfspaces(self.dim, h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeHalfspace {
    pub normal: QVec,
    pub offset: Rat,
}

impl PolytopeHalfspace {
    /// `normal·x ≥ offset`.
    pub fn contains(&self, x: &[Rat]) -> bool {
        dot(&self.normal, x) >= self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPolytope {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<QVec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<PolytopeHalfspace>>,
}

impl RationalPolytope {
    pub fn from_vertices(dim: usize, vertices: Vec<QVec>) -> Result<Self, ConeError> {
        check_lengths(dim, &vertices)?;
        if vertices.is_empty() {
            return Err(ConeError::Empty);
        }
        Ok(RationalPolytope {
            dim,
            vertices: Some(vertices),
            halfspaces: None,
        })
    }

    /// Polytope `{x : ψ_i·x ≥ c_i}`; fails if empty or unbounded.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<(QVec, Rat)>) -> Result<Self, ConeError> {
        check_lengths(dim, halfspaces.iter().map(|(p, _)| p))?;
        let hs = halfspaces
            .into_iter()
            .map(|(normal, offset)| {
                let (normal, offset) = primitive_halfspace(&normal, &offset);
                PolytopeHalfspace { normal, offset }
            })
            .collect();
        let p = RationalPolytope {
            dim,
            vertices: None,
            halfspaces: Some(hs),
        };
        // Validates boundedness and non-emptiness.
        p.vertices()?;
        Ok(p)
    }

    pub fn with_both(
        dim: usize,
        vertices: Vec<QVec>,
        halfspaces: Vec<(QVec, Rat)>,
    ) -> Result<Self, ConeError> {
        let v = Self::from_vertices(dim, vertices)?;
        let h = Self::from_halfspaces(dim, halfspaces)?;
        for x in v.vertices()? {
            if !h.member(&x)? {
                return Err(ConeError::Inconsistent);
            }
        }
        for x in h.vertices()? {
            if !v.member(&x)? {
                return Err(ConeError::Inconsistent);
            }
        }
        Ok(RationalPolytope {
            dim,
            vertices: v.vertices,
            halfspaces: h.halfspaces,
        })
    }

    /// Axis-parallel box `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rat, hi: Rat) -> Result<Self, ConeError> {
        let mut hs = Vec::new();
        for i in 0..dim {
            hs.push((crate::qlinalg::unit(dim, i), lo.clone()));
            hs.push((crate::qlinalg::scale(&-Rat::one(), &crate::qlinalg::unit(dim, i)), -&hi));
        }
        Self::from_halfspaces(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices_if_known(&self) -> Option<&[QVec]> {
        self.vertices.as_deref()
    }

    pub fn halfspaces_if_known(&self) -> Option<&[PolytopeHalfspace]> {
        self.halfspaces.as_deref()
    }

    pub fn convert(&self) -> Result<RationalPolytope, ConeError> {
        check_dim(self.dim)?;
        Ok(RationalPolytope {
            dim: self.dim,
            vertices: Some(self.vertices()?),
            halfspaces: Some(self.halfspaces()?),
        })
    }

    /// Half-space form (computed from the vertices when absent).
    pub fn halfspaces(&self) -> Result<Vec<PolytopeHalfspace>, ConeError> {
        if let Some(h) = &self.halfspaces {
            return Ok(h.clone());
        }
        check_dim(self.dim)?;
        let verts = self.vertices.as_ref().unwrap();
        let lifted: Vec<QVec> = verts
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.push(Rat::one());
                w
            })
            .collect();
        let mut out = Vec::new();
        for mut psi in cone_facets(self.dim + 1, &lifted) {
            let last = psi.pop().unwrap();
            if psi.iter().all(Rat::is_zero) {
                continue;
            }
            out.push(PolytopeHalfspace {
                normal: psi,
                offset: -last,
            });
        }
        Ok(out)
    }

    /// Vertex list (computed from half-spaces when absent). When vertices were
    /// given they are returned as stored; see [`extreme_points`] for the
    /// irredundant list.
    pub fn vertices(&self) -> Result<Vec<QVec>, ConeError> {
        if let Some(v) = &self.vertices {
            return Ok(v.clone());
        }
        check_dim(self.dim)?;
        let hs = self.halfspaces.as_ref().unwrap();
        let mut lifted: Vec<QVec> = hs
            .iter()
            .map(|h| {
                let mut w = h.normal.clone();
                w.push(-&h.offset);
                w
            })
            .collect();
        lifted.push(crate::qlinalg::unit(self.dim + 1, self.dim));
        let (rays, lin) = cone_rays(self.dim + 1, &lifted);
        let mut verts = Vec::new();
        let mut recession = !lin.is_empty();
        for mut r in rays {
            let w = r.pop().unwrap();
            if w.is_zero() {
                recession = true;
            } else {
                verts.push(r.iter().map(|x| x / &w).collect::<QVec>());
            }
        }
        if verts.is_empty() {
            return Err(ConeError::Empty);
        }
        if recession {
            return Err(ConeError::Unbounded);
        }
        verts.sort();
        Ok(verts)
    }

    pub fn member(&self, v: &[Rat]) -> Result<bool, ConeError> {
        if v.len() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if let Some(h) = &self.halfspaces {
            return Ok(h.iter().all(|h| h.contains(v)));
        }
        in_convex_hull(self.vertices.as_ref().unwrap(), v)
    }
}

/// Exact convex-hull membership via LP feasibility.
pub fn in_convex_hull(points: &[QVec], x: &[Rat]) -> Result<bool, ConeError> {
    Ok(convex_weights(points, x)?.is_some())
}

/// Convex weights `λ ≥ 0, Σλ = 1, Σλ_i p_i = x`, if any exist. The simplex
/// returns a basic solution, so at most `dim + 1` weights are nonzero.
pub fn convex_weights(points: &[QVec], x: &[Rat]) -> Result<Option<QVec>, ConeError> {
    if points.is_empty() {
        return Ok(None);
    }
    let n = points.len();
    let mut lp = LinearProgram::feasibility(n).all_nonnegative();
    for (j, xj) in x.iter().enumerate() {
        lp = lp.constraint(points.iter().map(|p| p[j].clone()).collect(), Relation::Eq, xj.clone());
    }
    lp = lp.constraint(vec![Rat::one(); n], Relation::Eq, Rat::one());
    Ok(lp.solve()?.optimal().map(|(_, p)| p.clone()))
}

/// Irredundant vertices of a polytope, sorted lexicographically.
pub fn extreme_points(p: &RationalPolytope) -> Result<Vec<QVec>, ConeError> {
    let mut verts = p.vertices()?;
    verts.sort();
    verts.dedup();
    if p.vertices_if_known().is_none() {
        return Ok(verts);
    }
    let mut out = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        let others: Vec<QVec> = verts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w.clone())
            .collect();
        if !in_convex_hull(&others, v)? {
            out.push(v.clone());
        }
    }
    Ok(out)
}
