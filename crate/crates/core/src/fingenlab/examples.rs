use serde::{Deserialize, Serialize};

use super::FingenError;

/// Smallest admissible sample bound for a [`GradedSupport`].
pub const MIN_SAMPLE_BOUND: u64 = 20;
pub const DEFAULT_SAMPLE_BOUND: u64 = 30;
/// Largest sample bound; the sample holds about `bound²/2` points.
pub const MAX_SAMPLE_BOUND: u64 = 1000;
/// Largest `m` accepted by [`canonical_example`]; keeps every sum inside `i128`.
pub const CANONICAL_MAX_M: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationVerdict {
    NotFinitelyGenerated,
    ConsistentWithFiniteGeneration,
}

impl std::fmt::Display for GenerationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GenerationVerdict::NotFinitelyGenerated => "NOT finitely generated",
            GenerationVerdict::ConsistentWithFiniteGeneration => "consistent with finite generation",
        })
    }
}

/// Bidegrees `(m₁, m₂)` with nonzero sections of `⌊m₁D₁ + m₂D₂⌋` on an
/// elliptic curve, where `D₁ = K + A = A` and `D₂ = A + B₂` with
/// `B₂ = (num/k)·p`.
///
/// The section count is decided by the degree
/// `δ = (m₁ + m₂)·deg A + ⌊m₂·num/k⌋`: positive degree has sections, and
/// degree zero has them only at the origin because `A` is non-torsion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSupport {
    pub k: u64,
    pub num: u64,
    pub a_degree: u64,
    pub rule: String,
    pub sample_bound: u64,
    /// Every support point with `m₁ + m₂ ≤ sample_bound`.
    pub sampled_points: Vec<(u64, u64)>,
    /// Extreme rays of the closure of the span, as primitive directions.
    pub closure_rays: Vec<(u64, u64)>,
    /// Closure rays that contain no nonzero support point.
    pub unattained_rays: Vec<(u64, u64)>,
    pub closed: bool,
    pub verdict: GenerationVerdict,
}

impl GradedSupport {
    pub fn contains(&self, m1: u64, m2: u64) -> bool {
        in_support(self.k, self.num, self.a_degree, m1, m2)
    }

    /// Human summary of the support.
    pub fn describe(&self) -> String {
        if self.a_degree > 0 {
            return "all of N^2".into();
        }
        let start = self.k.div_ceil(self.num);
        format!("{{(0,0)}} union {{(m1, m2) : m2 >= {start}}}")
    }

    /// Recomputes the sample and verdict from the parameters.
    pub fn verify(&self) -> Result<(), String> {
        let again = elliptic_support_with(self.k, self.num, self.a_degree, self.sample_bound)
            .map_err(|e| e.to_string())?;
        if again == *self {
            Ok(())
        } else {
            Err("recomputed support differs".into())
        }
    }
}

fn in_support(k: u64, num: u64, a_degree: u64, m1: u64, m2: u64) -> bool {
    let degree = (m1 + m2) * a_degree + (m2 * num) / k;
    (m1, m2) == (0, 0) || degree >= 1
}

/// Smallest sample bound that reaches a nonzero support point off each axis.
///
/// With `deg A = 0` the first such point is `(1, ⌈k/num⌉)`; with positive
/// degree every point is in the support and `(1, 1)` suffices.
pub fn min_sample_bound(k: u64, num: u64, a_degree: u64) -> u64 {
    let reach = if a_degree > 0 { 2 } else { k.div_ceil(num.max(1)) + 1 };
    reach.max(MIN_SAMPLE_BOUND)
}

/// Support of the two-divisor ring on an elliptic curve with a degree-zero
/// non-torsion `A`; see [`elliptic_support_with`] for the control case.
///
/// Samples up to `max(DEFAULT_SAMPLE_BOUND, min_sample_bound(k, num, 0))`.
pub fn elliptic_support(k: u64, num: u64) -> Result<GradedSupport, FingenError> {
    let bound = DEFAULT_SAMPLE_BOUND.max(min_sample_bound(k, num, 0));
    elliptic_support_with(k, num, 0, bound)
}

/// As [`elliptic_support`] with `deg A = a_degree` and an explicit sample bound.
///
/// The rule is monotone in both `m₁` and `m₂`. Hence a nonzero support point
/// off the `m₁` axis forces the ray `(0,1)` into the closure of the span and
/// one off the `m₂` axis forces `(1,0)`. Such a ray is attained iff an axis
/// point lies in the support, and the span is closed iff every closure ray is
/// attained.
pub fn elliptic_support_with(
    k: u64,
    num: u64,
    a_degree: u64,
    sample_bound: u64,
) -> Result<GradedSupport, FingenError> {
    if num == 0 || num >= k {
        return Err(FingenError::Precondition(format!(
            "need 0 < num < k so that B2 = {num}/{k}*p has round-down 0"
        )));
    }
    let least = min_sample_bound(k, num, a_degree);
    if sample_bound < least {
        return Err(FingenError::Precondition(format!(
            "sample bound {sample_bound} is below {least}, the least bound that reaches both rays"
        )));
    }
    if sample_bound > MAX_SAMPLE_BOUND {
        return Err(FingenError::Precondition(format!(
            "sample bound {sample_bound} exceeds {MAX_SAMPLE_BOUND}"
        )));
    }
    let sampled_points: Vec<(u64, u64)> = (0..=sample_bound)
        .flat_map(|s| (0..=s).map(move |m1| (m1, s - m1)))
        .filter(|&(m1, m2)| in_support(k, num, a_degree, m1, m2))
        .collect();
    let nonzero = || sampled_points.iter().filter(|&&p| p != (0, 0));
    let mut closure_rays = Vec::new();
    let mut unattained_rays = Vec::new();
    for (ray, off_axis, on_axis) in [
        ((1, 0), nonzero().any(|p| p.0 > 0), nonzero().any(|p| p.1 == 0)),
        ((0, 1), nonzero().any(|p| p.1 > 0), nonzero().any(|p| p.0 == 0)),
    ] {
        if off_axis {
            closure_rays.push(ray);
            if !on_axis {
                unattained_rays.push(ray);
            }
        }
    }
    let closed = unattained_rays.is_empty();
    let rule = if a_degree == 0 {
        format!("(m1,m2) = (0,0) or floor({num}*m2/{k}) >= 1")
    } else {
        format!("(m1,m2) = (0,0) or {a_degree}*(m1+m2) + floor({num}*m2/{k}) >= 1")
    };
    Ok(GradedSupport {
        k,
        num,
        a_degree,
        rule,
        sample_bound,
        sampled_points,
        closure_rays,
        unattained_rays,
        closed,
        verdict: if closed {
            GenerationVerdict::ConsistentWithFiniteGeneration
        } else {
            GenerationVerdict::NotFinitelyGenerated
        },
    })
}

/// Riemann–Roch lower bound `max(deg − g + 1, 0)` for `h⁰` of a line bundle
/// on a curve of genus `g`.
pub fn rr_lower_bound(g: u64, deg: i64) -> i64 {
    (deg as i128 - g as i128 + 1).clamp(0, i64::MAX as i128) as i64
}

/// Dimensions for the restriction `H⁰(X, 2m(K+Δ)) → H⁰(S, 2m(K+Δ)|_S)` in
/// the canonical-ring example with `S ≅ ℙ³`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalExample {
    pub m: u64,
    pub h0_x: i128,
    pub h0_x_minus_s: i128,
    pub h0_s: i128,
    pub surjective: bool,
    pub deficit: i128,
}

fn binom(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) / (i + 1))
}

pub fn canonical_example(m: u64) -> Result<CanonicalExample, FingenError> {
    if m == 0 || m > CANONICAL_MAX_M {
        return Err(FingenError::Precondition(format!(
            "m = {m} must lie in 1..={CANONICAL_MAX_M}"
        )));
    }
    let m = m as i128;
    let h0_x: i128 = (m..=2 * m).map(|j| binom(j + 2, 2) * (j - m + 1)).sum();
    let h0_x_minus_s: i128 = (m + 1..=2 * m).map(|j| binom(j + 2, 2) * (j - m)).sum();
    let h0_s = binom(2 * m + 3, 3);
    let image = h0_x - h0_x_minus_s;
    Ok(CanonicalExample {
        m: m as u64,
        h0_x,
        h0_x_minus_s,
        h0_s,
        surjective: image >= h0_s,
        deficit: h0_s - image,
    })
}

impl CanonicalExample {
    pub fn verify(&self) -> Result<(), String> {
        match canonical_example(self.m) {
            Ok(again) if again == *self => Ok(()),
            Ok(_) => Err("recomputed dimensions differ".into()),
            Err(e) => Err(e.to_string()),
        }
    }
}
