//! Vertex/facet enumeration for small dimensions.
//!
//! Both directions enumerate subsets of the input of the size that pins down a
//! one-dimensional solution space, so they are exponential in the dimension
//! and only meant for the capped sizes used here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::qlinalg::{dot, QMat, QVec, Rat};

/// Scales `v` to the primitive integral vector on the same ray.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let den = Rat::common_denominator(v);
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x.numer() * &den) / x.denom())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_qvec(v: &[BigInt]) -> QVec {
    v.iter().cloned().map(Rat::from).collect()
}

pub fn primitive_q(v: &[Rat]) -> QVec {
    to_qvec(&primitive(v))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn push_unique(list: &mut Vec<QVec>, v: QVec) {
    if !list.contains(&v) {
        list.push(v);
    }
}

/// The one-dimensional null space of `rows`, if it is one-dimensional.
fn line_through(rows: Vec<QVec>, dim: usize) -> Option<QVec> {
    let m = if rows.is_empty() {
        QMat::from_rows(vec![vec![Rat::zero(); dim]]).ok()?
    } else {
        QMat::from_rows(rows).ok()?
    };
    let ns = m.null_space();
    (ns.len() == 1).then(|| ns.into_iter().next().unwrap())
}

/// Inequalities `ψ·x ≥ 0` describing the cone spanned by `rays` in dimension
/// `dim`. Equalities appear as opposite pairs. Output is primitive and sorted.
pub fn cone_facets(dim: usize, rays: &[QVec]) -> Vec<QVec> {
    let rays: Vec<&QVec> = rays.iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut out: Vec<QVec> = Vec::new();
    let orth = if rays.is_empty() {
        (0..dim).map(|i| crate::qlinalg::unit(dim, i)).collect()
    } else {
        QMat::from_rows(rays.iter().map(|r| (*r).clone()).collect())
            .expect("rays share a dimension")
            .null_space()
    };
    for w in &orth {
        let w = primitive_q(w);
        push_unique(&mut out, w.iter().map(|x| -x).collect());
        push_unique(&mut out, w);
    }
    let rank = dim - orth.len();
    if rank > 0 {
        for subset in subsets(rays.len(), rank - 1) {
            let mut rows: Vec<QVec> = subset.iter().map(|&i| rays[i].clone()).collect();
            rows.extend(orth.iter().cloned());
            let Some(psi) = line_through(rows, dim) else {
                continue;
            };
            let signs: Vec<Rat> = rays.iter().map(|r| dot(&psi, r)).collect();
            let oriented = if signs.iter().all(|s| !s.is_negative()) {
                psi
            } else if signs.iter().all(|s| !s.is_positive()) {
                psi.iter().map(|x| -x).collect()
            } else {
                continue;
            };
            push_unique(&mut out, primitive_q(&oriented));
        }
    }
    out.sort();
    out
}

/// Generators of `{x : ψ·x ≥ 0 for all ψ}`: extreme rays of the pointed part
/// followed by both signs of a lineality basis. Output is primitive; the ray
/// part is sorted.
pub fn cone_rays(dim: usize, halfspaces: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let lineality = if halfspaces.is_empty() {
        (0..dim).map(|i| crate::qlinalg::unit(dim, i)).collect()
    } else {
        QMat::from_rows(halfspaces.to_vec())
            .expect("halfspaces share a dimension")
            .null_space()
    };
    let mut rays: Vec<QVec> = Vec::new();
    let e = lineality.len();
    if e < dim {
        let need = dim - 1 - e;
        for subset in subsets(halfspaces.len(), need) {
            let mut rows: Vec<QVec> = subset.iter().map(|&i| halfspaces[i].clone()).collect();
            rows.extend(lineality.iter().cloned());
            let Some(r) = line_through(rows, dim) else {
                continue;
            };
            let vals: Vec<Rat> = halfspaces.iter().map(|h| dot(h, &r)).collect();
            let oriented = if vals.iter().all(|s| !s.is_negative()) {
                r
            } else if vals.iter().all(|s| !s.is_positive()) {
                r.iter().map(|x| -x).collect()
            } else {
                continue;
            };
            push_unique(&mut rays, primitive_q(&oriented));
        }
    }
    rays.sort();
    let mut lin = Vec::new();
    for l in lineality {
        let l = primitive_q(&l);
        lin.push(l.iter().map(|x| -x).collect());
        lin.push(l);
    }
    (rays, lin)
}

/// Primitive integral form of `ψ·x ≥ c`, scaling `ψ` and `c` together.
pub fn primitive_halfspace(psi: &[Rat], c: &Rat) -> (QVec, Rat) {
    let mut all = psi.to_vec();
    all.push(c.clone());
    let mut p = primitive_q(&all);
    let c = p.pop().unwrap();
    (p, c)
}

pub(crate) fn is_nonzero_int(v: &[BigInt]) -> bool {
    v.iter().any(|x| !x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn v(xs: &[i64]) -> QVec {
        xs.iter().map(|&x| Rat::from(x)).collect()
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive(&[q(3, 2), q(1, 1)]), vec![BigInt::from(3), BigInt::from(2)]);
        assert_eq!(primitive(&[q(-4, 1), q(6, 1)]), vec![BigInt::from(-2), BigInt::from(3)]);
    }

    #[test]
    fn facets_of_two_dimensional_cone() {
        let f = cone_facets(2, &[v(&[3, 2]), v(&[2, 3])]);
        assert_eq!(f, vec![v(&[-2, 3]), v(&[3, -2])]);
    }

    #[test]
    fn facets_of_ray_in_plane() {
        let f = cone_facets(2, &[v(&[1, 1])]);
        // x - y = 0 as a pair, plus x + y >= 0
        assert_eq!(f.len(), 3);
        assert!(f.contains(&v(&[1, -1])) && f.contains(&v(&[-1, 1])) && f.contains(&v(&[1, 1])));
    }

    #[test]
    fn rays_of_quadrant() {
        let (r, lin) = cone_rays(2, &[v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(r, vec![v(&[0, 1]), v(&[1, 0])]);
        assert!(lin.is_empty());
    }

    #[test]
    fn half_plane_has_lineality() {
        let (r, lin) = cone_rays(2, &[v(&[0, 1])]);
        assert_eq!(r, vec![v(&[0, 1])]);
        assert_eq!(lin.len(), 2);
    }
}
