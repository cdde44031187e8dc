//! Diophantine approximation by admissible points and the rational-polytope
//! criterion: certificate synthesis and instance checking.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cones::{
    convex_weights, primitive_halfspace, zser, ConeError, RationalPolytope,
};
use crate::qlinalg::{max_abs, norm_sq, sub, QVec, Rat};

/// Environment variable holding the candidate-evaluation budget.
pub const BUDGET_ENV: &str = "FINGEN_SEARCH_BUDGET";
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The budget from [`BUDGET_ENV`], or [`DEFAULT_BUDGET`].
pub fn search_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophError {
    #[error("eps must be positive")]
    NonPositiveEps,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("empty point")]
    EmptyPoint,
    #[error("search budget of {0} candidate evaluations exceeded")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Euclidean,
    Max,
}

impl Norm {
    /// Exact test of `‖v‖ < r` for `r > 0`; the Euclidean norm compares squares.
    pub fn less_than(self, v: &[Rat], r: &Rat) -> bool {
        match self {
            Norm::Euclidean => norm_sq(v) < r * r,
            Norm::Max => max_abs(v) < *r,
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "max" | "linf" => Ok(Norm::Max),
            _ => Err(format!("unknown norm `{s}` (expected euclidean or max)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxRequest {
    pub x: QVec,
    pub k: u64,
    pub eps: Rat,
    #[serde(default)]
    pub norm: Norm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxPoint {
    pub x: QVec,
    pub k: u64,
    pub weight: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub request: ApproxRequest,
    pub points: Vec<ApproxPoint>,
}

impl ApproxResult {
    /// Checks every clause: weights nonnegative summing to 1, `k | k_i`,
    /// `k_i·x_i/k` integral, `‖x − x_i‖ < ε/k_i`, and `Σ w_i x_i = x`.
    pub fn verify(&self) -> Result<(), String> {
        let r = &self.request;
        if self.points.is_empty() {
            return Err("no points".into());
        }
        let mut total = Rat::zero();
        let mut combo = vec![Rat::zero(); r.x.len()];
        for (i, p) in self.points.iter().enumerate() {
            if p.weight.is_negative() {
                return Err(format!("point {i}: negative weight"));
            }
            if p.k == 0 || p.k % r.k != 0 {
                return Err(format!("point {i}: k_i = {} is not a multiple of k = {}", p.k, r.k));
            }
            if p.x.len() != r.x.len() {
                return Err(format!("point {i}: wrong dimension"));
            }
            let scale = Rat::new(p.k, r.k);
            if !p.x.iter().all(|c| (&scale * c).is_integer()) {
                return Err(format!("point {i}: k_i x_i / k is not integral"));
            }
            if !r.norm.less_than(&sub(&r.x, &p.x), &(&r.eps / &Rat::from(p.k))) {
                return Err(format!("point {i}: too far from x"));
            }
            total += &p.weight;
            for (c, xi) in combo.iter_mut().zip(&p.x) {
                *c += &(&p.weight * xi);
            }
        }
        if !total.is_one() {
            return Err(format!("weights sum to {total}"));
        }
        if combo != r.x {
            return Err("weighted sum differs from x".into());
        }
        Ok(())
    }
}

/// Integers strictly inside `(c − r, c + r)`.
fn open_range(c: &Rat, r: &Rat) -> (BigInt, BigInt) {
    ((c - r).floor_int() + 1, (c + r).ceil_int() - 1)
}

pub fn dioph_approximate(req: &ApproxRequest) -> Result<ApproxResult, DiophError> {
    dioph_approximate_with_budget(req, search_budget())
}

/// Searches `k_i = k·m` for `m = 1, 2, …`, accepting every point of
/// `(1/m)ℤ^N` within `ε/k_i` of `x`, until `x` lies in the convex hull of the
/// accepted points.
pub fn dioph_approximate_with_budget(
    req: &ApproxRequest,
    budget: u64,
) -> Result<ApproxResult, DiophError> {
    if !req.eps.is_positive() {
        return Err(DiophError::NonPositiveEps);
    }
    if req.k == 0 {
        return Err(DiophError::ZeroK);
    }
    if req.x.is_empty() {
        return Err(DiophError::EmptyPoint);
    }
    let n = req.x.len();
    let mut spent: u64 = 0;
    let mut accepted: Vec<(QVec, u64)> = Vec::new();
    for m in 1u64.. {
        // each denominator tried counts, as does each lattice point
        spent += 1;
        if spent > budget {
            return Err(DiophError::BudgetExceeded(budget));
        }
        let ki = req.k * m;
        let mr = Rat::from(m);
        let radius = &req.eps / &Rat::from(ki);
        // box for z = m·x_i: |m x_j − z_j| < m·ε/k_i = ε/k
        let slack = &req.eps / &Rat::from(req.k);
        let ranges: Vec<(BigInt, BigInt)> =
            req.x.iter().map(|c| open_range(&(&mr * c), &slack)).collect();
        let mut z: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
        if ranges.iter().all(|(lo, hi)| lo <= hi) {
            loop {
                spent += 1;
                if spent > budget {
                    return Err(DiophError::BudgetExceeded(budget));
                }
                let xi: QVec = z.iter().map(|c| Rat::from(c.clone()) / &mr).collect();
                if req.norm.less_than(&sub(&req.x, &xi), &radius)
                    && !accepted.iter().any(|(p, _)| *p == xi)
                {
                    accepted.push((xi, ki));
                }
                let mut j = 0;
                while j < n {
                    if z[j] < ranges[j].1 {
                        z[j] += 1;
                        break;
                    }
                    z[j] = ranges[j].0.clone();
                    j += 1;
                }
                if j == n {
                    break;
                }
            }
        }
        let pts: Vec<QVec> = accepted.iter().map(|(p, _)| p.clone()).collect();
        if pts.is_empty() {
            continue;
        }
        if let Some(w) = convex_weights(&pts, &req.x)? {
            let points = accepted
                .iter()
                .zip(w)
                .filter(|(_, w)| w.is_positive())
                .map(|((p, k), w)| ApproxPoint {
                    x: p.clone(),
                    k: *k,
                    weight: w,
                })
                .collect();
            return Ok(ApproxResult {
                request: req.clone(),
                points,
            });
        }
    }
    unreachable!("m = lcm of the denominators of x makes x itself admissible")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertHalfspace {
    /// Integral normal `ψ`; the half-space is `ψ·x ≥ c`.
    #[serde(with = "zser::vec")]
    pub psi: Vec<BigInt>,
    #[serde(with = "zser::int")]
    pub c: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeCertificate {
    pub eps: Rat,
    pub k: u64,
    pub halfspaces: Vec<CertHalfspace>,
}

impl PolytopeCertificate {
    /// `‖ψ_i‖ < 1/ε` for every half-space, compared by squares.
    pub fn check_norms(&self) -> bool {
        let bound = (Rat::one() / &self.eps) * (Rat::one() / &self.eps);
        self.eps.is_positive()
            && self.k >= 1
            && self.halfspaces.iter().all(|h| {
                let sq: BigInt = h.psi.iter().map(|x| x * x).sum();
                Rat::from(sq) < bound
            })
    }
}

/// `⌈√n⌉` for `n ≥ 0`.
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

/// Integral half-space description with `ε = 1/(max ⌈‖ψ_i‖⌉ + 1)` and `k = 1`.
pub fn polytope_certificate(p: &RationalPolytope) -> Result<PolytopeCertificate, DiophError> {
    p.vertices()?;
    let mut halfspaces = Vec::new();
    let mut widest = BigInt::zero();
    for h in p.halfspaces()? {
        let (psi, c) = primitive_halfspace(&h.normal, &h.offset);
        let psi: Vec<BigInt> = psi.iter().map(|x| x.numer().clone()).collect();
        let sq: BigInt = psi.iter().map(|x| x * x).sum();
        widest = widest.max(ceil_sqrt(&sq));
        halfspaces.push(CertHalfspace {
            psi,
            c: c.numer().clone(),
        });
    }
    Ok(PolytopeCertificate {
        eps: Rat::one() / Rat::from(widest + BigInt::one()),
        k: 1,
        halfspaces,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    Inapplicable(String),
    Violation,
}

/// Checks one instance of the criterion: if `lv` is integral, `w ∈ P` and
/// `‖v − w‖ < ε/(lk)` (Euclidean), then `v` must lie in `P`.
pub fn criterion_verify(
    p: &RationalPolytope,
    cert: &PolytopeCertificate,
    v: &[Rat],
    w: &[Rat],
    l: u64,
) -> Result<Verdict, DiophError> {
    if l == 0 {
        return Ok(Verdict::Inapplicable("l must be positive".into()));
    }
    let lr = Rat::from(l);
    if !v.iter().all(|c| (&lr * c).is_integer()) {
        return Ok(Verdict::Inapplicable("l·v is not integral".into()));
    }
    if !p.member(w)? {
        return Ok(Verdict::Inapplicable("w is not in P".into()));
    }
    let radius = &cert.eps / &Rat::from(l * cert.k);
    if !Norm::Euclidean.less_than(&sub(v, w), &radius) {
        return Ok(Verdict::Inapplicable("v is not close enough to w".into()));
    }
    Ok(if p.member(v)? {
        Verdict::Confirmed
    } else {
        Verdict::Violation
    })
}
