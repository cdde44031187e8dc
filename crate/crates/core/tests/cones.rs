use fingen_core::cones::{
    hilbert_basis, veronese_restrict, RationalCone, RationalPolytope, Sublattice, VeroneseTarget,
};
use fingen_core::qlinalg::{QVec, Rat};
use num_bigint::BigInt;
use proptest::prelude::*;

fn qv(v: &[i64]) -> QVec {
    v.iter().map(|&c| Rat::from(c)).collect()
}

fn zv(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// Integer normals of `cone`, cleared of denominators.
fn int_normals(cone: &RationalCone) -> Vec<Vec<i64>> {
    cone.halfspaces()
        .unwrap()
        .iter()
        .map(|h| {
            let den = Rat::common_denominator(h.iter());
            h.iter()
                .map(|c| i64::try_from((c * &Rat::from(den.clone())).to_integer().unwrap()).unwrap())
                .collect()
        })
        .collect()
}

fn inside(normals: &[Vec<i64>], x: &[i64]) -> bool {
    normals.iter().all(|h| h.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() >= 0)
}

fn box_points(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-bound..=bound).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Irreducible nonzero lattice points of a pointed cone inside `[-bound, bound]^dim`.
fn brute_hilbert(cone: &RationalCone, bound: i64) -> Vec<Vec<i64>> {
    let normals = int_normals(cone);
    let dim = cone.dim();
    let pts: Vec<Vec<i64>> = box_points(dim, bound)
        .into_iter()
        .filter(|p| p.iter().any(|&c| c != 0) && inside(&normals, p))
        .collect();
    let mut out: Vec<Vec<i64>> = pts
        .iter()
        .filter(|x| {
            !pts.iter().any(|y| {
                y != *x && {
                    let d: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    d.iter().any(|&c| c != 0) && inside(&normals, &d)
                }
            })
        })
        .cloned()
        .collect();
    out.sort();
    out
}

fn sorted_elements(cone: &RationalCone) -> Vec<Vec<i64>> {
    let mut v: Vec<Vec<i64>> = hilbert_basis(cone)
        .unwrap()
        .elements
        .iter()
        .map(|e| e.iter().map(|c| i64::try_from(c.clone()).unwrap()).collect())
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn planar_hilbert_basis_matches_brute_force(
        a in prop::collection::vec(-4i64..=4, 2),
        b in prop::collection::vec(-4i64..=4, 2),
    ) {
        // Pointed and two-dimensional: a and b independent.
        prop_assume!(a[0] * b[1] - a[1] * b[0] != 0);
        let cone = RationalCone::from_generators(2, vec![qv(&a), qv(&b)]).unwrap();
        let bound = a.iter().zip(&b).map(|(x, y)| x.abs() + y.abs()).max().unwrap();
        prop_assert_eq!(sorted_elements(&cone), brute_hilbert(&cone, bound));
    }

    #[test]
    fn generator_and_halfspace_forms_agree(
        gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3..=5),
        probe in prop::collection::vec(-4i64..=4, 3),
    ) {
        let v = RationalCone::from_generators(3, gens.iter().map(|g| qv(g)).collect()).unwrap();
        let h = RationalCone::from_halfspaces(3, v.halfspaces().unwrap()).unwrap();
        prop_assert!(v.same_set(&h).unwrap());
        prop_assert_eq!(v.member(&qv(&probe)).unwrap(), h.member(&qv(&probe)).unwrap());
        let back = RationalCone::from_generators(3, h.generators().unwrap()).unwrap();
        prop_assert!(back.same_set(&v).unwrap());
    }

    #[test]
    fn polytope_forms_agree(
        pts in prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 3..=7),
        probe in prop::collection::vec(-6i64..=6, 2),
    ) {
        let p = RationalPolytope::from_vertices(2, pts.iter().map(|v| qv(v)).collect()).unwrap();
        prop_assume!(p.vertices().map(|v| v.len() >= 3).unwrap_or(false));
        let hs = p.halfspaces().unwrap();
        let x = qv(&probe);
        prop_assert_eq!(p.member(&x).unwrap(), hs.iter().all(|h| h.contains(&x)));
    }
}

#[test]
fn cones_over_one_zero_and_one_k() {
    for k in 1..=6i64 {
        let cone = RationalCone::from_generators(2, vec![qv(&[1, 0]), qv(&[1, k])]).unwrap();
        let hb = hilbert_basis(&cone).unwrap();
        assert_eq!(hb.len(), (k + 1) as usize);
        assert_eq!(sorted_elements(&cone), brute_hilbert(&cone, 1 + k));
        for x in 0..=10 {
            for y in 0..=10 {
                let p = zv(&[x, y]);
                let in_cone = y <= k * x;
                assert_eq!(hb.decompose(&p).is_some(), in_cone, "({x}, {y}) for k = {k}");
            }
        }
    }
}

#[test]
fn spatial_hilbert_basis_matches_brute_force() {
    let cones = [
        vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[1, 1, 2])],
        vec![qv(&[1, 0, 1]), qv(&[0, 1, 1]), qv(&[-1, 0, 1]), qv(&[0, -1, 1])],
        vec![qv(&[2, 1, 1]), qv(&[1, 2, 1]), qv(&[1, 1, 2])],
    ];
    for gens in cones {
        let cone = RationalCone::from_generators(3, gens.clone()).unwrap();
        let bound = (0..3)
            .map(|j| gens.iter().map(|g| g[j].abs()).fold(Rat::zero(), |a, b| a + b))
            .max()
            .unwrap();
        let bound = i64::try_from(bound.to_integer().unwrap()).unwrap();
        assert_eq!(sorted_elements(&cone), brute_hilbert(&cone, bound));
    }
}

#[test]
fn veronese_of_the_quadrant() {
    let quadrant = RationalCone::from_generators(2, vec![qv(&[1, 0]), qv(&[0, 1])]).unwrap();
    // Even-sum sublattice: basis (2,0), (1,1), (0,2).
    let lattice = Sublattice::new(vec![zv(&[1, 1]), zv(&[1, -1])]).unwrap();
    assert_eq!(lattice.index(), BigInt::from(2));
    let hb = veronese_restrict(&quadrant, &VeroneseTarget::Lattice(lattice)).unwrap();
    let mut got: Vec<Vec<BigInt>> = hb.elements.clone();
    got.sort();
    assert_eq!(got, vec![zv(&[0, 2]), zv(&[1, 1]), zv(&[2, 0])]);
    // Subcone y ≥ x of the quadrant.
    let sub = RationalCone::from_halfspaces(2, vec![qv(&[-1, 1])]).unwrap();
    let hb = veronese_restrict(&quadrant, &VeroneseTarget::Subcone(sub)).unwrap();
    let mut got = hb.elements.clone();
    got.sort();
    assert_eq!(got, vec![zv(&[0, 1]), zv(&[1, 1])]);
}

#[test]
fn non_pointed_cones_are_rejected() {
    let half_plane = RationalCone::from_halfspaces(2, vec![qv(&[0, 1])]).unwrap();
    assert!(hilbert_basis(&half_plane).is_err());
}
