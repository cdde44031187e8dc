use fingen_core::fingenlab::{
    adjoint_trace, canonical_example, elliptic_support, elliptic_support_with, rr_lower_bound,
    width_threshold, zigzag_descend, AdjointOutcome, ConeSplit, FingenError, GenerationVerdict,
};
use fingen_core::qlinalg::Rat;
use fingen_core::selftest::random_adjoint_input;
use fingen_core::surface::SurfaceModel;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Planar cone between two rays, tested with integer cross products.
struct Wedge {
    lo: (i128, i128),
    hi: (i128, i128),
}

/// Positive integral multiple of a rational direction.
fn integral(a: &(Rat, Rat)) -> (i128, i128) {
    let den = Rat::from(Rat::common_denominator([&a.0, &a.1]));
    let int = |c: &Rat| i128::try_from((c * &den).to_integer().unwrap()).unwrap();
    (int(&a.0), int(&a.1))
}

fn cross(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

impl Wedge {
    fn new(a: (Rat, Rat), b: (Rat, Rat)) -> Self {
        let (a, b) = (integral(&a), integral(&b));
        if cross(a, b) < 0 {
            Wedge { lo: b, hi: a }
        } else {
            Wedge { lo: a, hi: b }
        }
    }

    fn contains(&self, x: i64, y: i64) -> bool {
        let p = (x as i128, y as i128);
        cross(self.lo, p) >= 0 && cross(p, self.hi) >= 0
    }
}

struct Oracle {
    cone: Wedge,
    subs: [Wedge; 2],
}

impl Oracle {
    fn new(d: (Rat, Rat), b1: Rat, b2: Rat) -> Self {
        let e1 = Rat::one() - b1;
        let e2 = Rat::one() - b2;
        let v1 = (&d.0 + &e1, d.1.clone());
        let v2 = (d.0.clone(), &d.1 + &e2);
        let v12 = (&d.0 + &e1, &d.1 + &e2);
        // v1 is the most clockwise vertex, v2 the most counterclockwise.
        Oracle {
            cone: Wedge::new(v1.clone(), v2.clone()),
            subs: [Wedge::new(v1, v12.clone()), Wedge::new(v2, v12)],
        }
    }

    /// `1 +` the largest failing `x + y` up to `limit`, per subcone.
    fn width(&self, limit: i64) -> [i64; 2] {
        let mut m = [1, 1];
        for s in 0..=limit {
            for x in 0..=s {
                let y = s - x;
                for (i, (sub, mi)) in self.subs.iter().zip(m.iter_mut()).enumerate() {
                    let (px, py) = if i == 0 { (x - 1, y) } else { (x, y - 1) };
                    if sub.contains(x, y) && !self.cone.contains(px, py) {
                        *mi = (*mi).max(s + 1);
                    }
                }
            }
        }
        m
    }
}

fn check_split(d: (i64, i64), b1: Rat, b2: Rat) -> i64 {
    let split = ConeSplit::new(vec![Rat::from(d.0), Rat::from(d.1)], b1.clone(), b2.clone()).unwrap();
    let report = width_threshold(&split).unwrap();
    let oracle = Oracle::new((Rat::from(d.0), Rat::from(d.1)), b1, b2);
    let per = oracle.width(200);
    assert_eq!(report.per_subcone, per, "split D = {d:?}");
    assert_eq!(report.m, per[0].max(per[1]));
    if report.m > 1 {
        let w = report.witness.as_ref().expect("witness");
        assert_eq!(w.point.0 + w.point.1, report.m - 1);
        let i = w.subcone - 1;
        let (px, py) = if i == 0 { (w.point.0 - 1, w.point.1) } else { (w.point.0, w.point.1 - 1) };
        assert!(oracle.subs[i].contains(w.point.0, w.point.1) && !oracle.cone.contains(px, py));
    }
    report.verify(&split, 200).unwrap();
    report.m
}

#[test]
fn width_of_named_splits() {
    let h = Rat::new(1, 2);
    assert_eq!(check_split((1, 1), h.clone(), h.clone()), 5);
    assert_eq!(check_split((1, 1), Rat::zero(), Rat::zero()), 3);
    let q = Rat::new(3, 4);
    check_split((1, 1), q.clone(), q);
    check_split((2, 1), Rat::new(1, 3), Rat::zero());
    check_split((1, 3), Rat::new(2, 5), Rat::new(1, 7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn width_matches_brute_force(
        d in (1i64..=4, 1i64..=4),
        b1 in (0i64..4, 4i64..=6),
        b2 in (0i64..4, 4i64..=6),
    ) {
        check_split(d, Rat::new(b1.0, b1.1), Rat::new(b2.0, b2.1));
    }

    #[test]
    fn zigzag_chain_properties(x in 0i64..60, y in 0i64..60) {
        let split = ConeSplit::standard();
        let oracle = Oracle::new((Rat::one(), Rat::one()), Rat::new(1, 2), Rat::new(1, 2));
        prop_assume!(oracle.cone.contains(x, y));
        let chain = zigzag_descend(&split, 5, (x, y)).unwrap();
        chain.verify(&split).map_err(TestCaseError::fail)?;
        let first = chain.points[0];
        let last = *chain.points.last().unwrap();
        prop_assert_eq!(first, (x, y));
        prop_assert!(last.0 + last.1 <= 5);
        prop_assert_eq!(chain.len() as i64, (x + y) - (last.0 + last.1));
        for (t, w) in chain.points.windows(2).enumerate() {
            let (p, q) = (w[0], w[1]);
            prop_assert!(p.0 + p.1 > 5);
            prop_assert!(oracle.cone.contains(q.0, q.1));
            let i = if oracle.subs[0].contains(p.0, p.1) { 0 } else { 1 };
            prop_assert_eq!(chain.steps[t], i + 1);
            let expect = if i == 0 { (p.0 - 1, p.1) } else { (p.0, p.1 - 1) };
            prop_assert_eq!(q, expect);
        }
    }
}

#[test]
fn zigzag_examples() {
    let split = ConeSplit::standard();
    let c = zigzag_descend(&split, 5, (4, 3)).unwrap();
    assert_eq!(c.points, vec![(4, 3), (3, 3), (2, 3)]);
    assert!(zigzag_descend(&split, 5, (3, 2)).unwrap().is_empty());
    let c = zigzag_descend(&split, 5, (30, 20)).unwrap();
    assert_eq!(c.len(), 45);
    assert!(matches!(zigzag_descend(&split, 5, (1, 5)), Err(FingenError::Precondition(_))));
}

#[test]
fn adjoint_identities_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for name in ["blp2", "blp2x2"] {
        let m = SurfaceModel::bundled(name).unwrap();
        for _ in 0..80 {
            let (a, b) = random_adjoint_input(&m, &mut rng).unwrap();
            let AdjointOutcome::Trace(t) = adjoint_trace(&m, &a, &b).unwrap() else {
                continue;
            };
            // Reassemble B, P, N from their generator coordinates.
            let rebuild = |c: &[Rat]| {
                m.generators().iter().zip(c).fold(m.zero(), |acc, (g, x)| acc.try_add(&g.divisor.scale(x)).unwrap())
            };
            assert_eq!(rebuild(&t.b_coords.coeffs), b);
            assert_eq!(rebuild(&t.p_coords.coeffs), t.zariski.positive);
            assert_eq!(rebuild(&t.n_coords.coeffs), t.zariski.negative);
            let d = m.canonical().try_add(&a).unwrap().try_add(&b).unwrap();
            assert_eq!(t.zariski.divisor, d);
            let mut hit_one = false;
            for i in 0..m.generators().len() {
                let (bi, pi, ni) = (&t.b_coords.coeffs[i], &t.p_coords.coeffs[i], &t.n_coords.coeffs[i]);
                let s = bi + &(&t.lambda * pi) - ni;
                if pi.is_positive() {
                    assert!(s <= Rat::one());
                    hit_one |= s.is_one();
                }
                let r = &t.r.coeffs[i];
                let want_r = if s.is_negative() { (-&s).ceil() } else { Rat::zero() };
                assert_eq!(*r, want_r);
                assert!(!r.is_negative() && *r <= ni.ceil());
                let bp = &t.b_prime.coeffs[i];
                assert_eq!(*bp, &s + r);
                assert!(bp.is_zero() || (bp.is_positive() && *bp <= Rat::one()));
                assert_eq!(bp.floor(), t.sigma.coeffs[i]);
                assert_eq!(t.sigma.coeffs[i].is_one(), s.is_one());
            }
            assert!(hit_one, "lambda is not attained on {name} with A = {a}, B = {b}");
        }
    }
}

#[test]
fn canonical_identity_up_to_fifty() {
    let binom = |n: u128, k: u128| -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    };
    for m in 1..=50u128 {
        let c = canonical_example(m as u64).unwrap();
        let image: u128 = (m..=2 * m).map(|j| binom(j + 2, 2)).sum();
        assert_eq!((c.h0_x - c.h0_x_minus_s) as u128, image);
        assert_eq!(image, binom(2 * m + 3, 3) - binom(m + 2, 3));
        assert_eq!(c.h0_s as u128, binom(2 * m + 3, 3));
        assert_eq!(c.deficit as u128, binom(m + 2, 3));
        assert!(!c.surjective);
    }
}

#[test]
fn cutkosky_family() {
    for k in 2..=30u64 {
        for num in 1..k {
            let s = elliptic_support(k, num).unwrap();
            for &(m1, m2) in &s.sampled_points {
                assert!((m1, m2) == (0, 0) || m2 * num / k >= 1);
            }
            let expected = (0..=s.sample_bound)
                .map(|m2| (m2 * num / k >= 1) as u64 * (s.sample_bound - m2 + 1))
                .sum::<u64>()
                + 1;
            assert_eq!(s.sampled_points.len() as u64, expected);
            assert_eq!(s.verdict, GenerationVerdict::NotFinitelyGenerated);
            assert_eq!(s.unattained_rays, vec![(1, 0)]);
        }
    }
    for a in 1..=3 {
        let s = elliptic_support_with(3, 2, a, 25).unwrap();
        assert!(s.closed);
        assert_eq!(s.sampled_points.len(), 26 * 27 / 2);
    }
}

#[test]
fn riemann_roch_is_exact_on_the_line() {
    for d in 0..20 {
        assert_eq!(rr_lower_bound(0, d), d + 1);
    }
    assert_eq!(rr_lower_bound(1, 3), 3);
    assert_eq!(rr_lower_bound(2, 5), 4);
    assert_eq!(rr_lower_bound(5, 1), 0);
}
