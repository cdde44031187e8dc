//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact; the only tolerances are the wall-clock limits
//! and sample sizes pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fingen_core::cones::{hilbert_basis, RationalCone, RationalPolytope};
use fingen_core::dioph::{
    criterion_verify, dioph_approximate, polytope_certificate, ApproxRequest, ApproxResult, Norm,
    Verdict,
};
use fingen_core::fingenlab::{
    adjoint_trace, canonical_example, elliptic_support, elliptic_support_with, width_threshold,
    zigzag_descend, AdjointOutcome, ConeSplit, GenerationVerdict,
};
use fingen_core::qlinalg::{QVec, Rat};
use fingen_core::selftest::{random_adjoint_input, random_psef, random_rat};
use fingen_core::surface::{Divisor, SurfaceModel, BUNDLED_MODELS};
use fingen_core::zariski::{
    default_ample, sigma, sigma_decomposition, zariski_decompose, zariski_oracle, ZariskiError,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

const C1_TIME_LIMIT: Duration = Duration::from_secs(60);
const C1_MIN_INSTANCES: usize = 2_000;
const C3_SAMPLES_PER_MODEL: usize = 100;
const C3_SPOT_CHECKS_PER_MODEL: usize = 10;
const C4_REQUESTS: usize = 1_000;
const C4_FUZZ_PER_POLYTOPE: usize = 100_000;
const C5_MAX_K: i64 = 6;
const C5_DECOMPOSE_BOUND: i64 = 10;
const C7_MIN_INPUTS: usize = 500;
const C8_MAX_M: u64 = 50;
const C8_TIME_LIMIT: Duration = Duration::from_secs(1);
const C9_MAX_K: u64 = 60;

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("zariski oracle equivalence", c1_oracle_equivalence),
        ("zariski golden values", c2_golden_values),
        ("sigma consistency", c3_sigma_consistency),
        ("diophantine invariants", c4_diophantine),
        ("hilbert bases", c5_hilbert),
        ("width and zig-zag", c6_width_zigzag),
        ("adjoint trace identities", c7_adjoint),
        ("canonical-ring example", c8_canonical),
        ("two-divisor elliptic example", c9_cutkosky),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS C{} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL C{} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn model(name: &str) -> Result<SurfaceModel, String> {
    SurfaceModel::bundled(name).map_err(s)
}

/// The distinct values `n/d` with `n ∈ [-3, 3]` and `d ∈ [1, 4]`.
fn grid_values() -> Vec<Rat> {
    let mut v: Vec<Rat> = (1..=4).flat_map(|d| (-3..=3).map(move |n| Rat::new(n, d))).collect();
    v.sort();
    v.dedup();
    v
}

fn c1_oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let values = grid_values();
    let mut psef = 0;
    let mut rejected = 0;
    for name in ["blp2", "blp2x2"] {
        let m = model(name)?;
        let mut coords = vec![vec![]];
        for _ in 0..m.dim() {
            coords = coords
                .into_iter()
                .flat_map(|c: Vec<Rat>| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.push(v.clone());
                        c
                    })
                })
                .collect();
        }
        for c in coords {
            let d = m.divisor(c).map_err(s)?;
            match (zariski_decompose(&m, &d), zariski_oracle(&m, &d)) {
                (Ok(z), Ok(o)) => {
                    ensure(z.positive == o.positive && z.negative == o.negative, || {
                        format!("{name}: decomposition and oracle differ on {d}")
                    })?;
                    z.verify(&m).map_err(|e| format!("{name}: {d}: {e}"))?;
                    o.verify(&m).map_err(|e| format!("{name}: oracle on {d}: {e}"))?;
                    psef += 1;
                }
                (Err(ZariskiError::NotPseudoEffective(_)), Err(ZariskiError::NotPseudoEffective(_))) => {
                    rejected += 1;
                }
                (a, b) => return Err(format!("{name}: {d}: {:?} vs {:?}", a.err(), b.err())),
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(psef >= C1_MIN_INSTANCES, || format!("only {psef} pseudo-effective instances"))?;
    ensure(elapsed < C1_TIME_LIMIT, || format!("took {elapsed:?}, limit {C1_TIME_LIMIT:?}"))?;
    Ok(format!(
        "{psef} pseudo-effective divisors agree exactly and re-verify; {rejected} rejected by both"
    ))
}

fn c2_golden_values() -> Result<String, String> {
    let cases = [
        ("blp2", "H + 2*E", "H", "2*E"),
        ("blp2x2", "H + 2*E1 + 3*E2", "H", "2*E1 + 3*E2"),
        ("blp2x2", "2*H - 2*E1 - 2*E2", "0", "2*H - 2*E1 - 2*E2"),
    ];
    for (name, d, p, n) in cases {
        let m = model(name)?;
        let d = m.parse(d).map_err(s)?;
        let z = zariski_decompose(&m, &d).map_err(s)?;
        let (p, n) = (m.parse(p).map_err(s)?, m.parse(n).map_err(s)?);
        ensure(z.positive == p && z.negative == n, || {
            format!("{name}: {d} gave P = {}, N = {}", z.positive, z.negative)
        })?;
        // Independent restatement: P nef, P orthogonal to every curve in N.
        for g in m.generators() {
            ensure(!m.pair(&p, &g.divisor).map_err(s)?.is_negative(), || format!("P not nef on {}", g.label))?;
        }
        for (label, c) in &z.certificate.coefficients {
            let g = m.generators().iter().find(|g| &g.label == label).unwrap();
            ensure(c.is_positive() && m.pair(&p, &g.divisor).map_err(s)?.is_zero(), || {
                format!("{label} is not an orthogonal support curve")
            })?;
        }
        z.verify(&m).map_err(s)?;
    }
    Ok("three golden decompositions match exactly".into())
}

fn c3_sigma_consistency() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut compared = 0;
    let mut spot = 0;
    for (name, _) in BUNDLED_MODELS {
        let m = model(name)?;
        let a = default_ample(&m).map_err(s)?;
        let mut sample: Vec<Divisor> = Vec::new();
        while sample.len() < C3_SAMPLES_PER_MODEL {
            let d = random_psef(&m, &mut rng)?.ok_or("no pseudo-effective sample")?;
            let sd = sigma_decomposition(&m, &d, &a).map_err(s)?;
            let z = zariski_decompose(&m, &d).map_err(s)?;
            ensure(sd.negative == z.negative, || {
                format!("{name}: N_sigma({d}) = {} but N = {}", sd.negative, z.negative)
            })?;
            ensure(sd.positive == z.positive, || format!("{name}: P_sigma differs on {d}"))?;
            sample.push(d);
            compared += 1;
        }
        for t in 0..C3_SPOT_CHECKS_PER_MODEL {
            let (x, y) = (&sample[2 * t], &sample[2 * t + 1]);
            let c = random_rat(&mut rng, 1, 4, 3);
            let sum = x.try_add(y).map_err(s)?;
            for g in m.generators() {
                let val = |d: &Divisor| -> Result<Rat, String> {
                    sigma(&m, d, &g.label, &a).map_err(s)?.value.ok_or_else(|| "undefined".to_string())
                };
                let sx = val(x)?;
                ensure(val(&x.scale(&c))? == &c * &sx, || format!("{name}: sigma_{} not homogeneous at {x}", g.label))?;
                ensure(val(&sum)? <= &sx + &val(y)?, || format!("{name}: sigma_{} not convex at {x} + {y}", g.label))?;
            }
            spot += 1;
        }
    }
    Ok(format!(
        "N_sigma equals N on {compared} divisors over {} models; {spot} homogeneity/convexity spot checks",
        BUNDLED_MODELS.len()
    ))
}

/// Independent restatement of the five approximation clauses.
fn clauses_hold(res: &ApproxResult) -> Result<(), String> {
    let req = &res.request;
    let mut wsum = Rat::zero();
    let mut combo = vec![Rat::zero(); req.x.len()];
    ensure(!res.points.is_empty(), || "no points".into())?;
    for p in &res.points {
        ensure(!p.weight.is_negative(), || "negative weight".into())?;
        ensure(p.k % req.k == 0, || "k does not divide k_i".into())?;
        for c in &p.x {
            ensure((c * &Rat::from(p.k) / Rat::from(req.k)).is_integer(), || "k_i x_i / k not integral".into())?;
        }
        let diff: Vec<Rat> = req.x.iter().zip(&p.x).map(|(a, b)| a - b).collect();
        let bound = &req.eps / &Rat::from(p.k);
        let close = match req.norm {
            Norm::Euclidean => diff.iter().fold(Rat::zero(), |acc, d| acc + d * d) < &bound * &bound,
            Norm::Max => diff.iter().all(|d| d.abs() < bound),
        };
        ensure(close, || "point too far".into())?;
        wsum += &p.weight;
        for (c, xi) in combo.iter_mut().zip(&p.x) {
            *c += &(&p.weight * xi);
        }
    }
    ensure(wsum.is_one() && combo == req.x, || "not a convex combination of x".into())
}

/// Convex polygon with counterclockwise vertices.
struct Polygon(Vec<(i64, i64)>);

impl Polygon {
    fn contains(&self, p: &[Rat]) -> bool {
        let n = self.0.len();
        (0..n).all(|i| {
            let (a, b) = (self.0[i], self.0[(i + 1) % n]);
            let (ex, ey) = (Rat::from(b.0 - a.0), Rat::from(b.1 - a.1));
            let (px, py) = (&p[0] - Rat::from(a.0), &p[1] - Rat::from(a.1));
            !(ex * py - ey * px).is_negative()
        })
    }
}

fn c4_diophantine() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for _ in 0..C4_REQUESTS {
        let dim = rng.random_range(1..=3);
        let req = ApproxRequest {
            x: (0..dim).map(|_| random_rat(&mut rng, -4, 4, 7)).collect(),
            k: rng.random_range(1..=5),
            eps: Rat::new(1, rng.random_range(1..=6)),
            norm: if rng.random_bool(0.5) { Norm::Max } else { Norm::Euclidean },
        };
        let res = dioph_approximate(&req).map_err(|e| format!("{e} on {req:?}"))?;
        ensure(res.request == req, || "request not echoed".into())?;
        clauses_hold(&res).map_err(|e| format!("{e} on {req:?}"))?;
        res.verify()?;
    }
    let polygons = [
        Polygon(vec![(0, 0), (1, 0), (0, 1)]),
        Polygon(vec![(0, 0), (1, 0), (1, 1), (0, 1)]),
        Polygon(vec![(0, 0), (2, 0), (3, 1), (2, 3), (0, 2)]),
    ];
    let mut applicable = 0;
    for poly in &polygons {
        let verts: Vec<QVec> = poly.0.iter().map(|&(x, y)| vec![Rat::from(x), Rat::from(y)]).collect();
        let p = RationalPolytope::from_vertices(2, verts).map_err(s)?.convert().map_err(s)?;
        let cert = polytope_certificate(&p).map_err(s)?;
        ensure(cert.check_norms(), || "certificate norm check failed".into())?;
        let hi = poly.0.iter().map(|v| v.0.max(v.1)).max().unwrap();
        for _ in 0..C4_FUZZ_PER_POLYTOPE {
            let l = rng.random_range(1..=12u64);
            let li = l as i64;
            let v: QVec = (0..2).map(|_| Rat::new(rng.random_range(-2..=li * hi + 2), li)).collect();
            // ‖w − v‖ < ε/l: each offset is below 0.7·ε/l in absolute value.
            let r = &cert.eps / &Rat::from(l);
            let w: QVec = v.iter().map(|c| c + &(&r * &Rat::new(rng.random_range(-700..=700), 1000))).collect();
            let verdict = criterion_verify(&p, &cert, &v, &w, l).map_err(s)?;
            let expect_applicable = poly.contains(&w);
            match verdict {
                Verdict::Violation => return Err(format!("violation at v = {v:?}, w = {w:?}, l = {l}")),
                Verdict::Confirmed => {
                    ensure(expect_applicable && poly.contains(&v), || "confirmed outside the polygon".into())?;
                    applicable += 1;
                }
                Verdict::Inapplicable(_) => {
                    ensure(!expect_applicable, || format!("inapplicable with w = {w:?} in P"))?
                }
            }
        }
    }
    Ok(format!(
        "{C4_REQUESTS} requests satisfy all clauses; {} fuzz instances per polytope on {} polytopes, {applicable} applicable, 0 violations",
        C4_FUZZ_PER_POLYTOPE,
        polygons.len()
    ))
}

fn c5_hilbert() -> Result<String, String> {
    let mut decomposed = 0;
    for k in 1..=C5_MAX_K {
        let cone = RationalCone::from_generators(2, vec![vec![Rat::one(), Rat::zero()], vec![Rat::one(), Rat::from(k)]])
            .map_err(s)?;
        let hb = hilbert_basis(&cone).map_err(s)?;
        let mut got: Vec<(i64, i64)> = hb
            .elements
            .iter()
            .map(|e| (i64::try_from(&e[0]).unwrap(), i64::try_from(&e[1]).unwrap()))
            .collect();
        got.sort();
        // Brute force: irreducible nonzero points with 0 <= y <= kx, x <= 1.
        let inside = |x: i64, y: i64| x >= 0 && y >= 0 && y <= k * x;
        let pts: Vec<(i64, i64)> = (0..=2).flat_map(|x| (0..=2 * k).map(move |y| (x, y))).filter(|&(x, y)| (x, y) != (0, 0) && inside(x, y)).collect();
        let mut brute: Vec<(i64, i64)> = pts
            .iter()
            .copied()
            .filter(|&(x, y)| !pts.iter().any(|&(a, b)| (a, b) != (x, y) && inside(x - a, y - b) && (x - a, y - b) != (0, 0)))
            .collect();
        brute.sort();
        ensure(got.len() == (k + 1) as usize, || format!("k = {k}: {} elements", got.len()))?;
        ensure(got == brute, || format!("k = {k}: {got:?} vs brute force {brute:?}"))?;
        for x in 0..=C5_DECOMPOSE_BOUND {
            for y in 0..=C5_DECOMPOSE_BOUND {
                if !inside(x, y) {
                    continue;
                }
                let counts = hb
                    .decompose(&[BigInt::from(x), BigInt::from(y)])
                    .ok_or_else(|| format!("k = {k}: ({x}, {y}) not decomposed"))?;
                let mut sum = (BigInt::from(0), BigInt::from(0));
                for (c, e) in counts.iter().zip(&hb.elements) {
                    sum.0 += &e[0] * BigInt::from(*c);
                    sum.1 += &e[1] * BigInt::from(*c);
                }
                ensure(sum == (BigInt::from(x), BigInt::from(y)), || format!("k = {k}: bad decomposition of ({x}, {y})"))?;
                decomposed += 1;
            }
        }
    }
    Ok(format!("k + 1 elements for k = 1..{C5_MAX_K} match brute force; {decomposed} cone points decomposed"))
}

fn c6_width_zigzag() -> Result<String, String> {
    // Standard split: C between (3,2) and (2,3), C1 up to the diagonal, C2 beyond it.
    let in_c = |x: i64, y: i64| 3 * y - 2 * x >= 0 && 3 * x - 2 * y >= 0;
    let in_sub = |i: usize, x: i64, y: i64| {
        if i == 0 {
            3 * y - 2 * x >= 0 && x >= y
        } else {
            y >= x && 3 * x - 2 * y >= 0
        }
    };
    let split = ConeSplit::standard();
    let report = width_threshold(&split).map_err(s)?;
    ensure(report.m == 5, || format!("width threshold {}", report.m))?;
    let w = report.witness.clone().ok_or("no witness")?;
    let (x, y) = w.point;
    let i = w.subcone - 1;
    let (px, py) = if i == 0 { (x - 1, y) } else { (x, y - 1) };
    ensure(x + y == 4 && in_sub(i, x, y) && !in_c(px, py), || format!("witness {w:?} is not a failure at x + y = 4"))?;
    report.verify(&split, 200)?;
    let chain = zigzag_descend(&split, report.m, (30, 20)).map_err(s)?;
    ensure(chain.len() == 45, || format!("{} steps", chain.len()))?;
    for &(x, y) in &chain.points {
        ensure(in_c(x, y), || format!("({x}, {y}) left the cone"))?;
    }
    let last = *chain.points.last().unwrap();
    ensure(last.0 + last.1 < report.m + 1, || format!("stopped at {last:?}"))?;
    Ok(format!("M = 5 with witness {:?} in C{}; zig-zag from (30,20) stays in C and stops at {last:?} after 45 steps", w.point, w.subcone))
}

fn c7_adjoint() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let models = [model("blp2")?, model("blp2x2")?];
    let mut traces = 0;
    let mut trivial = 0;
    let mut attempts = 0;
    while traces < C7_MIN_INPUTS {
        attempts += 1;
        ensure(attempts <= 20 * C7_MIN_INPUTS, || format!("only {traces} traces after {attempts} inputs"))?;
        let m = &models[attempts % 2];
        let (a, b) = random_adjoint_input(m, &mut rng)?;
        let t = match adjoint_trace(m, &a, &b).map_err(|e| format!("{e} on A = {a}, B = {b}"))? {
            AdjointOutcome::Trace(t) => t,
            AdjointOutcome::TrivialPositivePart { .. } => {
                trivial += 1;
                continue;
            }
        };
        for i in 0..m.generators().len() {
            let (bi, pi, ni) = (&t.b_coords.coeffs[i], &t.p_coords.coeffs[i], &t.n_coords.coeffs[i]);
            let s = bi + &(&t.lambda * pi) - ni;
            let want_r = if s.is_negative() { (-&s).ceil() } else { Rat::zero() };
            let r = &t.r.coeffs[i];
            let bp = &t.b_prime.coeffs[i];
            let ctx = || format!("{} on A = {a}, B = {b}, prime {}", m.name(), t.b_coords.primes[i]);
            ensure(*r == want_r && !r.is_negative() && *r <= ni.ceil(), || format!("0 <= R <= ceil(N) fails: {}", ctx()))?;
            ensure(*bp == &s + r, || format!("B' is not B + lambda P - N + R: {}", ctx()))?;
            ensure(bp.is_zero() || (bp.is_positive() && *bp <= Rat::one()), || format!("B' outside (0, 1]: {}", ctx()))?;
            ensure(bp.floor() == t.sigma.coeffs[i], || format!("floor(B') != Sigma: {}", ctx()))?;
        }
        traces += 1;
    }
    Ok(format!("{traces} traces across blp2 and blp2x2 with zero failures ({trivial} inputs had P = 0)"))
}

fn c8_canonical() -> Result<String, String> {
    let start = Instant::now();
    let binom = |n: u128, k: u128| (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1));
    let first = canonical_example(1).map_err(s)?;
    ensure((first.h0_x, first.h0_x_minus_s, first.h0_s) == (15, 6, 10), || format!("m = 1 gives {first:?}"))?;
    for m in 1..=C8_MAX_M {
        let c = canonical_example(m).map_err(s)?;
        let mm = m as u128;
        ensure(c.deficit as u128 == binom(mm + 2, 3), || format!("m = {m}: deficit {}", c.deficit))?;
        ensure(!c.surjective, || format!("m = {m} is surjective"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C8_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("deficit = C(m+2, 3) and non-surjective for m = 1..{C8_MAX_M}; (15, 6, 10) at m = 1"))
}

fn c9_cutkosky() -> Result<String, String> {
    let mut pairs = 0;
    for k in 2..=C9_MAX_K {
        for num in 1..k {
            let sup = elliptic_support(k, num).map_err(s)?;
            // Off-axis support point (1, ⌈k/num⌉) and no nonzero point on the m1 axis.
            let m2 = k.div_ceil(num);
            ensure(sup.contains(1, m2) && !sup.contains(1, 0), || format!("({k}, {num}): unexpected support"))?;
            ensure(!sup.closed && sup.verdict == GenerationVerdict::NotFinitelyGenerated, || {
                format!("({k}, {num}): verdict {}", sup.verdict)
            })?;
            ensure(sup.unattained_rays == vec![(1, 0)], || format!("({k}, {num}): rays {:?}", sup.unattained_rays))?;
            pairs += 1;
        }
    }
    let control = elliptic_support_with(2, 1, 1, 30).map_err(s)?;
    let full = 31 * 32 / 2;
    ensure(
        control.closed
            && control.sampled_points.len() == full
            && control.closure_rays == vec![(1, 0), (0, 1)]
            && control.verdict == GenerationVerdict::ConsistentWithFiniteGeneration,
        || "ample control is not the closed quadrant".into(),
    )?;
    Ok(format!("{pairs} pairs (k <= {C9_MAX_K}) are not closed and NOT finitely generated; ample control is the closed quadrant"))
}
