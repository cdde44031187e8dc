use serde::{Deserialize, Serialize};

use super::FingenError;
use crate::cones::RationalCone;
use crate::qlinalg::{dot, LinearProgram, LpOutcome, QVec, Rat, Relation};

/// Exhaustive scan length used by [`width_threshold`] at minimum.
pub const WIDTH_SCAN: i64 = 100;
/// Largest threshold [`width_threshold`] will certify.
pub const WIDTH_CAP: i64 = 1_000_000;

/// The rectangle with corners `D`, `D+(1−b₁)S₁`, `D+(1−b₂)S₂`,
/// `D+(1−b₁)S₁+(1−b₂)S₂` in `(S₁, S₂)` coordinates, the cone `C` it spans,
/// and the subcones `C₁`, `C₂` over its two far edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSplit {
    pub d: QVec,
    pub b1: Rat,
    pub b2: Rat,
    pub rectangle: Vec<QVec>,
    pub cone: RationalCone,
    pub subcones: [RationalCone; 2],
}

impl ConeSplit {
    pub fn new(d: QVec, b1: Rat, b2: Rat) -> Result<Self, FingenError> {
        if d.len() != 2 || !d.iter().all(Rat::is_positive) {
            return Err(FingenError::Precondition(
                "D needs two strictly positive coordinates".into(),
            ));
        }
        for b in [&b1, &b2] {
            if b.is_negative() || *b >= Rat::one() {
                return Err(FingenError::Precondition(format!("b = {b} is outside [0, 1)")));
            }
        }
        let e1 = Rat::one() - &b1;
        let e2 = Rat::one() - &b2;
        let v0 = d.clone();
        let v1 = vec![&d[0] + &e1, d[1].clone()];
        let v2 = vec![d[0].clone(), &d[1] + &e2];
        let v12 = vec![&d[0] + &e1, &d[1] + &e2];
        let rect = vec![v0, v1.clone(), v2.clone(), v12.clone()];
        let with_h = |gens: Vec<QVec>| -> Result<RationalCone, FingenError> {
            let c = RationalCone::from_generators(2, gens)?;
            Ok(c.convert()?)
        };
        let cone = with_h(rect.clone())?;
        let c1 = with_h(vec![v1, v12.clone()])?;
        let c2 = with_h(vec![v2, v12])?;
        Ok(ConeSplit {
            d,
            b1,
            b2,
            rectangle: rect,
            cone,
            subcones: [c1, c2],
        })
    }

    /// `(1, 1)` with `b₁ = b₂ = 1/2`.
    pub fn standard() -> Self {
        let h = Rat::new(1, 2);
        ConeSplit::new(vec![Rat::one(), Rat::one()], h.clone(), h).expect("valid split")
    }

    fn normals(c: &RationalCone) -> &[QVec] {
        c.halfspaces_if_known().expect("split cones carry half-spaces")
    }

    fn inside(normals: &[QVec], p: &[Rat]) -> bool {
        normals.iter().all(|h| !dot(h, p).is_negative())
    }

    pub fn in_cone(&self, p: &[Rat]) -> bool {
        Self::inside(Self::normals(&self.cone), p)
    }

    /// `i ∈ {0, 1}` for `C₁`, `C₂`.
    pub fn in_subcone(&self, i: usize, p: &[Rat]) -> bool {
        Self::inside(Self::normals(&self.subcones[i]), p)
    }
}

/// Integral copies of the split's primitive normals for lattice-point tests.
struct IntSplit {
    cone: Vec<[i128; 2]>,
    subs: [Vec<[i128; 2]>; 2],
}

impl IntSplit {
    fn new(split: &ConeSplit) -> Result<Self, FingenError> {
        let conv = |c: &RationalCone| -> Result<Vec<[i128; 2]>, FingenError> {
            ConeSplit::normals(c)
                .iter()
                .map(|h| {
                    let int = |r: &Rat| {
                        r.to_integer()
                            .and_then(|z| i128::try_from(z).ok())
                            .ok_or_else(|| FingenError::Malformed(format!("normal {r} is too large")))
                    };
                    Ok([int(&h[0])?, int(&h[1])?])
                })
                .collect()
        };
        Ok(IntSplit {
            cone: conv(&split.cone)?,
            subs: [conv(&split.subcones[0])?, conv(&split.subcones[1])?],
        })
    }

    fn inside(normals: &[[i128; 2]], x: i64, y: i64) -> bool {
        normals.iter().all(|h| h[0] * x as i128 + h[1] * y as i128 >= 0)
    }

    fn in_cone(&self, x: i64, y: i64) -> bool {
        Self::inside(&self.cone, x, y)
    }

    fn in_sub(&self, i: usize, x: i64, y: i64) -> bool {
        Self::inside(&self.subs[i], x, y)
    }

    /// The width condition at one integral point of `C_i`: `p − S_i ∈ C`.
    fn step_ok(&self, i: usize, x: i64, y: i64) -> bool {
        if i == 0 {
            self.in_cone(x - 1, y)
        } else {
            self.in_cone(x, y - 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthWitness {
    pub point: (i64, i64),
    /// 1 or 2.
    pub subcone: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthReport {
    /// Least positive `M` for which the condition holds on both subcones.
    pub m: i64,
    pub per_subcone: [i64; 2],
    /// An integral failure with `x + y = M − 1`, when `M > 1`.
    pub witness: Option<WidthWitness>,
    /// Beyond this sum no violation can exist (exact LP bound).
    pub tail_bound: i64,
    /// Every point with `x + y` up to here was checked.
    pub scanned_to: i64,
}

impl WidthReport {
    /// Re-checks the threshold by brute force up to `limit`.
    pub fn verify(&self, split: &ConeSplit, limit: i64) -> Result<(), String> {
        let fast = IntSplit::new(split).map_err(|e| e.to_string())?;
        for s in 0..=limit {
            for x in 0..=s {
                let y = s - x;
                for i in 0..2 {
                    if fast.in_sub(i, x, y) && !fast.step_ok(i, x, y) && s >= self.per_subcone[i] {
                        return Err(format!("({x}, {y}) fails in subcone {} at M = {}", i + 1, self.per_subcone[i]));
                    }
                }
            }
        }
        if self.m != self.per_subcone[0].max(self.per_subcone[1]) {
            return Err("M is not the larger per-subcone threshold".into());
        }
        match &self.witness {
            Some(w) => {
                let (x, y) = w.point;
                let i = w.subcone - 1;
                if !(1..=2).contains(&w.subcone) || x + y != self.m - 1 || !fast.in_sub(i, x, y) || fast.step_ok(i, x, y) {
                    return Err("witness does not fail at x + y = M − 1".into());
                }
            }
            None if self.m > 1 => return Err("missing minimality witness".into()),
            None => {}
        }
        Ok(())
    }
}

/// Largest `x + y` over the closure of the violation region of one facet of
/// `C` in `C_i`; `None` when that region is unbounded.
fn violation_sup(split: &ConeSplit, i: usize, psi: &QVec) -> Result<Option<Rat>, FingenError> {
    let shift = if i == 0 { psi[0].clone() } else { psi[1].clone() };
    let mut lp = LinearProgram::new(vec![-Rat::one(), -Rat::one()])
        .constraint(psi.clone(), Relation::Le, shift)
        .nonnegative(0)
        .nonnegative(1);
    for h in ConeSplit::normals(&split.subcones[i]) {
        lp = lp.constraint(h.clone(), Relation::Ge, Rat::zero());
    }
    Ok(match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Some(-value),
        LpOutcome::Infeasible => Some(Rat::zero()),
        LpOutcome::Unbounded => None,
    })
}

/// The least positive `M` such that `xS₁ + yS₂ ∈ C_i` with `x + y ≥ M` always
/// gives `xS₁ + yS₂ − S_i ∈ C`, per subcone and overall.
pub fn width_threshold(split: &ConeSplit) -> Result<WidthReport, FingenError> {
    let mut tail = Rat::zero();
    for i in 0..2 {
        for psi in ConeSplit::normals(&split.cone) {
            match violation_sup(split, i, psi)? {
                Some(v) => tail = tail.max(v),
                None => return Err(FingenError::Malformed("violations are unbounded".into())),
            }
        }
    }
    let tail_bound = tail
        .floor()
        .to_integer()
        .and_then(|t| i64::try_from(t).ok())
        .filter(|t| *t < WIDTH_CAP)
        .ok_or_else(|| FingenError::Malformed(format!("no threshold below {WIDTH_CAP}")))?;
    let scanned_to = tail_bound.max(WIDTH_SCAN);
    let fast = IntSplit::new(split)?;
    let mut last_fail: [Option<(i64, i64)>; 2] = [None, None];
    for s in 1..=scanned_to {
        for x in 0..=s {
            let y = s - x;
            for (i, slot) in last_fail.iter_mut().enumerate() {
                if fast.in_sub(i, x, y) && !fast.step_ok(i, x, y) {
                    *slot = Some((x, y));
                }
            }
        }
    }
    let per_subcone = [0, 1].map(|i| last_fail[i].map_or(1, |(x, y)| x + y + 1));
    let m = per_subcone[0].max(per_subcone[1]);
    let witness = (0..2).find_map(|i| {
        last_fail[i]
            .filter(|(x, y)| x + y == m - 1)
            .map(|point| WidthWitness {
                point,
                subcone: i + 1,
            })
    });
    Ok(WidthReport {
        m,
        per_subcone,
        witness,
        tail_bound,
        scanned_to,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagChain {
    pub m: i64,
    pub points: Vec<(i64, i64)>,
    /// Subcone (1 or 2) used at each step.
    pub steps: Vec<usize>,
}

impl ZigzagChain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every point in `C`, each step subtracts the generator of a subcone
    /// containing the previous point, and the chain stops exactly at `x + y ≤ M`.
    pub fn verify(&self, split: &ConeSplit) -> Result<(), String> {
        if self.points.len() != self.steps.len() + 1 {
            return Err("chain and step counts disagree".into());
        }
        for (t, &(x, y)) in self.points.iter().enumerate() {
            if !split.in_cone(&[Rat::from(x), Rat::from(y)]) {
                return Err(format!("({x}, {y}) left the cone"));
            }
            let last = t + 1 == self.points.len();
            if last != (x + y <= self.m) {
                return Err(format!("chain stops at the wrong place near ({x}, {y})"));
            }
        }
        for (t, &i) in self.steps.iter().enumerate() {
            let (x, y) = self.points[t];
            let expect = if i == 1 { (x - 1, y) } else { (x, y - 1) };
            if !(i == 1 || i == 2) || self.points[t + 1] != expect {
                return Err(format!("bad step {t}"));
            }
            if !split.in_subcone(i - 1, &[Rat::from(x), Rat::from(y)]) {
                return Err(format!("step {t} uses a subcone not containing the point"));
            }
        }
        Ok(())
    }
}

/// Subtracts `S_i` for the subcone `C_i` holding the current point (`C₁` on
/// ties) until `x + y ≤ M`.
pub fn zigzag_descend(split: &ConeSplit, m: i64, g: (i64, i64)) -> Result<ZigzagChain, FingenError> {
    let inside = |p: (i64, i64)| split.in_cone(&[Rat::from(p.0), Rat::from(p.1)]);
    if g.0 < 0 || g.1 < 0 || !inside(g) {
        return Err(FingenError::Precondition(format!("{g:?} is not an integral point of the cone")));
    }
    let mut points = vec![g];
    let mut steps = Vec::new();
    let mut cur = g;
    while cur.0 + cur.1 > m {
        let p = [Rat::from(cur.0), Rat::from(cur.1)];
        let i = if split.in_subcone(0, &p) {
            1
        } else if split.in_subcone(1, &p) {
            2
        } else {
            return Err(FingenError::InvariantViolated(format!("{cur:?} lies in neither subcone")));
        };
        cur = if i == 1 { (cur.0 - 1, cur.1) } else { (cur.0, cur.1 - 1) };
        if !inside(cur) {
            return Err(FingenError::Precondition(format!(
                "step to {cur:?} leaves the cone; M = {m} is below the width threshold"
            )));
        }
        points.push(cur);
        steps.push(i);
    }
    Ok(ZigzagChain { m, points, steps })
}
