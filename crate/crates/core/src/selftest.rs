//! Seeded property suite behind `fingen selftest`.
//!
//! Every check recomputes records from scratch and re-verifies them through
//! the same `verify` paths the CLI uses for structured output. A
//! [`Corruption`] tampers with one record field before re-verification, which
//! must make the corresponding check fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{hilbert_basis, RationalCone, RationalPolytope};
use crate::dioph::{
    criterion_verify, dioph_approximate, polytope_certificate, ApproxRequest, Norm, Verdict,
};
use crate::fingenlab::{
    adjoint_trace, canonical_example, elliptic_support, elliptic_support_with, width_threshold,
    zigzag_descend, AdjointOutcome, ConeSplit, GenerationVerdict,
};
use crate::qlinalg::{QVec, Rat};
use crate::surface::{Divisor, SurfaceModel};
use crate::zariski::{check_ample, default_ample, sigma_decomposition, zariski_decompose, zariski_oracle};

/// A single field to tamper with before re-verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    ZariskiPositive,
    ZariskiNefValues,
    ZariskiMinors,
    DiophWeight,
    PolytopeEps,
    HilbertElement,
    WidthThreshold,
    ZigzagPoint,
    AdjointLambda,
    CanonicalDeficit,
    CutkoskyVerdict,
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Random instances per randomized check.
    pub trials: usize,
    pub corrupt: Option<Corruption>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 7,
            trials: 200,
            corrupt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub trials: usize,
    pub corrupt: Option<Corruption>,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Check = fn(&mut ChaCha8Rng, usize, Option<Corruption>) -> Result<String, String>;

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let checks: [(&str, Check); 10] = [
        ("zariski-oracle", check_zariski),
        ("sigma-consistency", check_sigma),
        ("dioph-approximation", check_dioph),
        ("polytope-criterion", check_polytope),
        ("hilbert-basis", check_hilbert),
        ("width-zigzag", check_width),
        ("adjoint-trace", check_adjoint),
        ("canonical-example", check_canonical),
        ("cutkosky-example", check_cutkosky),
        ("model-round-trip", check_models),
    ];
    let outcomes = checks
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let r = f(&mut rng, opts.trials.max(1), opts.corrupt);
            CheckOutcome {
                name: name.to_string(),
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
            }
        })
        .collect();
    SelftestReport {
        seed: opts.seed,
        trials: opts.trials,
        corrupt: opts.corrupt,
        checks: outcomes,
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// A rational `n/d` with `n ∈ [lo, hi]` and `d ∈ [1, max_den]`.
pub fn random_rat(rng: &mut impl Rng, lo: i64, hi: i64, max_den: i64) -> Rat {
    let d = rng.random_range(1..=max_den);
    Rat::new(rng.random_range(lo * d..=hi * d), d)
}

/// A random pseudo-effective divisor with coefficients in `[-3, 3]` and
/// denominators at most 4, or `None` after repeated misses.
pub fn random_psef(model: &SurfaceModel, rng: &mut impl Rng) -> Result<Option<Divisor>, String> {
    for _ in 0..200 {
        let d = model
            .divisor((0..model.dim()).map(|_| random_rat(rng, -3, 3, 4)).collect())
            .map_err(err)?;
        if model.is_pseudoeffective(&d).map_err(err)?.pseudoeffective {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// A random admissible adjoint input `(A, B)`: `A` passes the ampleness
/// proxy, `B` has generator coordinates in `[0, 1)` and `K + A + B` is
/// pseudo-effective.
pub fn random_adjoint_input(
    model: &SurfaceModel,
    rng: &mut impl Rng,
) -> Result<(Divisor, Divisor), String> {
    let fractions = [Rat::zero(), Rat::new(1, 4), Rat::new(1, 3), Rat::new(1, 2), Rat::new(2, 3), Rat::new(3, 4)];
    for _ in 0..500 {
        let mut a = model.zero();
        for r in model.nef_generators() {
            a = a.try_add(&r.scale(&random_rat(rng, 0, 6, 4))).map_err(err)?;
        }
        if check_ample(model, &a).is_err() {
            continue;
        }
        let mut b = model.zero();
        for g in model.generators() {
            let c = &fractions[rng.random_range(0..fractions.len())];
            b = b.try_add(&g.divisor.scale(c)).map_err(err)?;
        }
        let d = model.canonical().try_add(&a).and_then(|x| x.try_add(&b)).map_err(err)?;
        if model.is_pseudoeffective(&d).map_err(err)?.pseudoeffective {
            return Ok((a, b));
        }
    }
    Err("could not sample an admissible adjoint input".into())
}

fn test_models() -> Result<Vec<SurfaceModel>, String> {
    ["blp2", "blp2x2"].iter().map(|n| SurfaceModel::bundled(n).map_err(err)).collect()
}

fn check_zariski(rng: &mut ChaCha8Rng, trials: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    let mut count = 0;
    for model in test_models()? {
        for _ in 0..trials {
            let Some(d) = random_psef(&model, rng)? else { continue };
            let mut z = zariski_decompose(&model, &d).map_err(err)?;
            let o = zariski_oracle(&model, &d).map_err(err)?;
            if z.positive != o.positive || z.negative != o.negative {
                return Err(format!("decomposition and oracle disagree on {d}"));
            }
            if count == 0 {
                match corrupt {
                    Some(Corruption::ZariskiPositive) => {
                        z.positive = z.positive.try_add(&model.generators()[0].divisor).map_err(err)?;
                    }
                    Some(Corruption::ZariskiNefValues) => {
                        if let Some(v) = z.certificate.nef_values.first_mut() {
                            v.1 += Rat::one();
                        }
                    }
                    Some(Corruption::ZariskiMinors) => z.certificate.minors.push(Rat::one()),
                    _ => {}
                }
            }
            z.verify(&model).map_err(|e| format!("{d}: {e}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} decompositions match the oracle and re-verify"))
}

fn check_sigma(rng: &mut ChaCha8Rng, trials: usize, _: Option<Corruption>) -> Result<String, String> {
    let mut count = 0;
    for model in test_models()? {
        let a = default_ample(&model).map_err(err)?;
        for _ in 0..trials.div_ceil(6) {
            let Some(d) = random_psef(&model, rng)? else { continue };
            let s = sigma_decomposition(&model, &d, &a).map_err(err)?;
            let z = zariski_decompose(&model, &d).map_err(err)?;
            if s.negative != z.negative {
                return Err(format!("N_sigma({d}) = {} but N = {}", s.negative, z.negative));
            }
            count += 1;
        }
    }
    Ok(format!("{count} sigma decompositions equal the Zariski negative part"))
}

fn check_dioph(rng: &mut ChaCha8Rng, trials: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    for t in 0..trials {
        let dim = rng.random_range(1..=3);
        let req = ApproxRequest {
            x: (0..dim).map(|_| random_rat(rng, -2, 2, 6)).collect(),
            k: rng.random_range(1..=4),
            eps: Rat::new(1, rng.random_range(2..=4)),
            norm: if rng.random_bool(0.5) { Norm::Euclidean } else { Norm::Max },
        };
        let mut r = dioph_approximate(&req).map_err(err)?;
        if t == 0 && corrupt == Some(Corruption::DiophWeight) {
            r.points[0].weight += Rat::new(1, 7);
        }
        r.verify().map_err(|e| format!("{:?}: {e}", req.x))?;
    }
    Ok(format!("{trials} approximations satisfy every clause"))
}

fn random_polytope(rng: &mut ChaCha8Rng) -> Result<RationalPolytope, String> {
    loop {
        let pts: Vec<QVec> = (0..rng.random_range(3..=6))
            .map(|_| vec![random_rat(rng, -3, 3, 3), random_rat(rng, -3, 3, 3)])
            .collect();
        if let Ok(p) = RationalPolytope::from_vertices(2, pts) {
            if p.vertices().map(|v| v.len() >= 3).unwrap_or(false) {
                return Ok(p);
            }
        }
    }
}

fn check_polytope(rng: &mut ChaCha8Rng, trials: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    let mut confirmed = 0;
    let polys = trials.div_ceil(10);
    for t in 0..polys {
        let p = random_polytope(rng)?;
        let mut cert = polytope_certificate(&p).map_err(err)?;
        if t == 0 && corrupt == Some(Corruption::PolytopeEps) {
            cert.eps = Rat::from(1000);
        }
        if !cert.check_norms() {
            return Err("certificate norm bound fails".into());
        }
        for _ in 0..200 {
            let l: i64 = rng.random_range(1..=6);
            let v: QVec = (0..2).map(|_| Rat::new(rng.random_range(-4 * l..=4 * l), l)).collect();
            let r = &cert.eps / &Rat::from(2 * l);
            let w: QVec = v.iter().map(|c| c + &(&r * &random_rat(rng, -1, 1, 97)) * Rat::new(99, 100)).collect();
            match criterion_verify(&p, &cert, &v, &w, l as u64).map_err(err)? {
                Verdict::Violation => return Err(format!("violation at v = {v:?}")),
                Verdict::Confirmed => confirmed += 1,
                Verdict::Inapplicable(_) => {}
            }
        }
    }
    Ok(format!("{polys} certified polytopes, {confirmed} confirmed instances, no violations"))
}

fn check_hilbert(_: &mut ChaCha8Rng, _: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    use num_bigint::BigInt;
    for k in 1..=6i64 {
        let cone = RationalCone::from_generators(2, vec![vec![Rat::one(), Rat::zero()], vec![Rat::one(), Rat::from(k)]])
            .map_err(err)?;
        let mut hb = hilbert_basis(&cone).map_err(err)?;
        if k == 1 && corrupt == Some(Corruption::HilbertElement) {
            hb.elements.push(vec![BigInt::from(2), BigInt::from(1)]);
        }
        let expected: Vec<Vec<BigInt>> = (0..=k).map(|j| vec![BigInt::from(1), BigInt::from(j)]).collect();
        if hb.elements != expected {
            return Err(format!("cone (1,0),(1,{k}): basis {:?}", hb.elements));
        }
        for x in 0..=10i64 {
            for y in 0..=10i64.min(k * x) {
                let pt = vec![BigInt::from(x), BigInt::from(y)];
                let mult = hb.decompose(&pt).ok_or_else(|| format!("({x}, {y}) has no decomposition"))?;
                let mut sum = [BigInt::from(0), BigInt::from(0)];
                for (m, e) in mult.iter().zip(&hb.elements) {
                    sum[0] += &e[0] * BigInt::from(*m);
                    sum[1] += &e[1] * BigInt::from(*m);
                }
                if sum[..] != pt[..] {
                    return Err(format!("decomposition of ({x}, {y}) sums to {sum:?}"));
                }
            }
        }
    }
    Ok("bases of V{(1,0),(1,k)} have k+1 elements and decompose every point".into())
}

fn check_width(_: &mut ChaCha8Rng, _: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    let split = ConeSplit::standard();
    let mut w = width_threshold(&split).map_err(err)?;
    if corrupt == Some(Corruption::WidthThreshold) {
        w.per_subcone = [w.per_subcone[0] - 1, w.per_subcone[1] - 1];
        w.m -= 1;
    }
    w.verify(&split, 200)?;
    if w.m != 5 {
        return Err(format!("width threshold {} differs from 5", w.m));
    }
    let mut chain = zigzag_descend(&split, w.m, (30, 20)).map_err(err)?;
    if corrupt == Some(Corruption::ZigzagPoint) {
        chain.points[1].0 += 1;
    }
    chain.verify(&split)?;
    if chain.len() != 45 {
        return Err(format!("zig-zag from (30, 20) took {} steps", chain.len()));
    }
    Ok("M = 5 with a witness at x + y = 4; zig-zag from (30, 20) takes 45 steps".into())
}

fn check_adjoint(rng: &mut ChaCha8Rng, trials: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    let mut traces = 0;
    let mut trivial = 0;
    for model in test_models()? {
        for _ in 0..trials {
            let (a, b) = random_adjoint_input(&model, rng)?;
            match adjoint_trace(&model, &a, &b).map_err(|e| format!("A = {a}, B = {b}: {e}"))? {
                AdjointOutcome::Trace(mut t) => {
                    if traces == 0 && corrupt == Some(Corruption::AdjointLambda) {
                        t.lambda += Rat::one();
                    }
                    t.verify(&model).map_err(|e| format!("A = {a}, B = {b}: {e}"))?;
                    traces += 1;
                }
                AdjointOutcome::TrivialPositivePart { .. } => trivial += 1,
            }
        }
    }
    Ok(format!("{traces} traces satisfy all three identities ({trivial} with P = 0)"))
}

fn check_canonical(_: &mut ChaCha8Rng, _: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    for m in 1..=50u64 {
        let mut c = canonical_example(m).map_err(err)?;
        if m == 1 && corrupt == Some(Corruption::CanonicalDeficit) {
            c.deficit += 1;
        }
        c.verify()?;
        let mi = m as i128;
        if c.deficit != (mi + 2) * (mi + 1) * mi / 6 || c.surjective {
            return Err(format!("m = {m}: deficit {}", c.deficit));
        }
    }
    Ok("deficit equals C(m+2, 3) for m = 1..50".into())
}

fn check_cutkosky(_: &mut ChaCha8Rng, _: usize, corrupt: Option<Corruption>) -> Result<String, String> {
    for k in 2..=12u64 {
        for num in 1..k {
            let mut s = elliptic_support(k, num).map_err(err)?;
            if k == 2 && corrupt == Some(Corruption::CutkoskyVerdict) {
                s.verdict = GenerationVerdict::ConsistentWithFiniteGeneration;
            }
            s.verify()?;
            if s.verdict != GenerationVerdict::NotFinitelyGenerated {
                return Err(format!("k = {k}, num = {num}: span reported closed"));
            }
        }
    }
    let control = elliptic_support_with(2, 1, 1, 20).map_err(err)?;
    if !control.closed {
        return Err("ample control span is not closed".into());
    }
    Ok("every admissible (k, num) up to 12 is not finitely generated; control is closed".into())
}

fn check_models(_: &mut ChaCha8Rng, _: usize, _: Option<Corruption>) -> Result<String, String> {
    for (name, _) in crate::surface::BUNDLED_MODELS {
        let m = SurfaceModel::bundled(name).map_err(err)?;
        let text = serde_json::to_string(&m.to_file()).map_err(err)?;
        let back = SurfaceModel::from_json(&text).map_err(err)?;
        if back != m {
            return Err(format!("model {name} does not round-trip"));
        }
    }
    Ok(format!("{} bundled models round-trip", crate::surface::BUNDLED_MODELS.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(corrupt: Option<Corruption>) -> SelftestReport {
        run_selftest(&SelftestOptions {
            seed: 1,
            trials: 8,
            corrupt,
        })
    }

    #[test]
    fn clean_run_passes() {
        let r = quick(None);
        assert!(r.passed(), "{:#?}", r.checks);
    }

    #[test]
    fn every_corruption_is_caught() {
        use clap::ValueEnum;
        for c in Corruption::value_variants() {
            let r = quick(Some(*c));
            assert!(!r.passed(), "{c:?} went unnoticed");
        }
    }
}
