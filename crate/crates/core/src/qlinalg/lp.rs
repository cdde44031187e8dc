//! Exact two-phase simplex with Bland's rule.
//!
//! Problems are tiny (a handful of variables and constraints), so the solver
//! works on a dense tableau of [`Rat`] and never rounds. Infeasible and
//! unbounded programs are ordinary outcomes, not errors.

use serde::{Deserialize, Serialize};

use super::{dot, LinalgError, QVec, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: QVec,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: QVec, relation: Relation, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn is_satisfied(&self, x: &[Rat]) -> bool {
        self.relation.holds(&dot(&self.coeffs, x), &self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal { value: Rat, point: QVec },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&Rat, &QVec)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// `minimize c·x` subject to `constraints`, with per-variable sign restrictions.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: QVec,
    constraints: Vec<Constraint>,
    nonnegative: Vec<bool>,
}

impl LinearProgram {
    /// All variables free.
    pub fn new(objective: QVec) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            nonnegative: vec![false; n],
        }
    }

    pub fn feasibility(nvars: usize) -> Self {
        LinearProgram::new(vec![Rat::zero(); nvars])
    }

    pub fn nonnegative(mut self, var: usize) -> Self {
        self.nonnegative[var] = true;
        self
    }

    pub fn all_nonnegative(mut self) -> Self {
        self.nonnegative.iter_mut().for_each(|b| *b = true);
        self
    }

    pub fn constraint(mut self, coeffs: QVec, relation: Relation, rhs: Rat) -> Self {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
        self
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn solve(&self) -> Result<LpOutcome, LinalgError> {
        let n = self.objective.len();
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
        }
        Tableau::build(self).run(self)
    }
}

/// `minimize c·x` over free variables subject to `constraints`.
pub fn lp_min(c: &[Rat], constraints: &[Constraint]) -> Result<LpOutcome, LinalgError> {
    let mut lp = LinearProgram::new(c.to_vec());
    lp.constraints.extend_from_slice(constraints);
    lp.solve()
}

struct Tableau {
    rows: Vec<QVec>,
    rhs: QVec,
    basis: Vec<usize>,
    /// Structural column(s) for each original variable: (positive, negative part).
    var_cols: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
    ncols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut var_cols = Vec::with_capacity(lp.objective.len());
        let mut col = 0;
        for &nn in &lp.nonnegative {
            if nn {
                var_cols.push((col, None));
                col += 1;
            } else {
                var_cols.push((col, Some(col + 1)));
                col += 2;
            }
        }
        let slack_count = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = col + slack_count;
        let m = lp.constraints.len();
        let ncols = first_artificial + m;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut slack = col;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rat::zero(); ncols];
            for (j, a) in c.coeffs.iter().enumerate() {
                let (p, neg) = var_cols[j];
                row[p] = a.clone();
                if let Some(q) = neg {
                    row[q] = -a;
                }
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = Rat::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rat::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = c.rhs.clone();
            if b.is_negative() {
                row.iter_mut().for_each(|x| *x = -&*x);
                b = -b;
            }
            row[first_artificial + i] = Rat::one();
            rows.push(row);
            rhs.push(b);
        }
        Tableau {
            rows,
            rhs,
            basis: (first_artificial..first_artificial + m).collect(),
            var_cols,
            first_artificial,
            ncols,
        }
    }

    fn pivot(&mut self, r: usize, s: usize, obj: &mut QVec, obj_val: &mut Rat) {
        let inv = self.rows[r][s].recip();
        self.rows[r].iter_mut().for_each(|x| *x *= &inv);
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][s].is_zero() {
                continue;
            }
            let f = self.rows[i][s].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let d = &f * &self.rows[r][j];
                    self.rows[i][j] -= &d;
                }
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= &d;
        }
        if !obj[s].is_zero() {
            let f = obj[s].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let d = &f * &self.rows[r][j];
                    obj[j] -= &d;
                }
            }
            // obj_val tracks -(current objective value)
            let d = &f * &self.rhs[r];
            *obj_val -= &d;
        }
        self.basis[r] = s;
    }

    /// Reduced-cost row for costs `c` over the current basis.
    fn reduced_costs(&self, c: &[Rat]) -> (QVec, Rat) {
        let mut obj = c.to_vec();
        let mut val = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.rows[i][j].is_zero() {
                    let d = &c[b] * &self.rows[i][j];
                    obj[j] -= &d;
                }
            }
            let d = &c[b] * &self.rhs[i];
            val -= &d;
        }
        (obj, val)
    }

    /// Runs simplex iterations with Bland's rule on columns `< col_limit`.
    /// Returns false when unbounded.
    fn iterate(&mut self, obj: &mut QVec, obj_val: &mut Rat, col_limit: usize) -> bool {
        loop {
            let Some(s) = (0..col_limit).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][s].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][s];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, s, obj, obj_val);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome, LinalgError> {
        // Phase 1: minimise the sum of artificials.
        let mut phase1 = vec![Rat::zero(); self.ncols];
        for c in phase1.iter_mut().skip(self.first_artificial) {
            *c = Rat::one();
        }
        let (mut obj, mut val) = self.reduced_costs(&phase1);
        let bounded = self.iterate(&mut obj, &mut val, self.ncols);
        debug_assert!(bounded, "phase one is bounded below by zero");
        if !val.is_zero() {
            return Ok(LpOutcome::Infeasible);
        }

        // Drive remaining (zero-valued) artificials out of the basis, dropping
        // redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => {
                        let mut dummy = vec![Rat::zero(); self.ncols];
                        let mut dv = Rat::zero();
                        self.pivot(i, j, &mut dummy, &mut dv);
                    }
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // Phase 2 on structural and slack columns only.
        let mut cost = vec![Rat::zero(); self.ncols];
        for (j, c) in lp.objective.iter().enumerate() {
            let (p, neg) = self.var_cols[j];
            cost[p] = c.clone();
            if let Some(q) = neg {
                cost[q] = -c;
            }
        }
        let (mut obj, mut val) = self.reduced_costs(&cost);
        if !self.iterate(&mut obj, &mut val, self.first_artificial) {
            return Ok(LpOutcome::Unbounded);
        }

        let mut colval = vec![Rat::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            colval[b] = self.rhs[i].clone();
        }
        let point: QVec = self
            .var_cols
            .iter()
            .map(|&(p, neg)| match neg {
                Some(q) => &colval[p] - &colval[q],
                None => colval[p].clone(),
            })
            .collect();
        let value = dot(&lp.objective, &point);
        debug_assert_eq!(value, -val);
        Ok(LpOutcome::Optimal { value, point })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn r(n: i64) -> Rat {
        Rat::from(n)
    }

    #[test]
    fn single_lower_bound() {
        let out = lp_min(&[r(1)], &[Constraint::new(vec![r(1)], Relation::Ge, r(3))]).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: r(3),
                point: vec![r(3)]
            }
        );
    }

    #[test]
    fn simplex_corner() {
        let cons = [
            Constraint::new(vec![r(1), r(0)], Relation::Ge, r(0)),
            Constraint::new(vec![r(0), r(1)], Relation::Ge, r(0)),
            Constraint::new(vec![r(1), r(1)], Relation::Ge, r(1)),
        ];
        let out = lp_min(&[r(1), r(1)], &cons).unwrap();
        let (v, p) = out.optimal().unwrap();
        assert_eq!(*v, r(1));
        assert!(cons.iter().all(|c| c.is_satisfied(p)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = [
            Constraint::new(vec![r(1)], Relation::Ge, r(2)),
            Constraint::new(vec![r(1)], Relation::Le, r(1)),
        ];
        assert_eq!(lp_min(&[r(1)], &cons).unwrap(), LpOutcome::Infeasible);
        let cons = [Constraint::new(vec![r(1)], Relation::Le, r(1))];
        assert_eq!(lp_min(&[r(1)], &cons).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(vec![r(1), r(2)])
            .all_nonnegative()
            .constraint(vec![r(1), r(1)], Relation::Eq, q(3, 2))
            .constraint(vec![r(2), r(2)], Relation::Eq, r(3));
        let out = lp.solve().unwrap();
        assert_eq!(out.optimal().unwrap().0, &q(3, 2));
    }

    #[test]
    fn degenerate_cycling_prone_instance() {
        // Beale's example; cycles under the textbook largest-coefficient rule.
        let lp = LinearProgram::new(vec![q(-3, 4), r(150), q(-1, 50), r(6)])
            .all_nonnegative()
            .constraint(vec![q(1, 4), r(-60), q(-1, 25), r(9)], Relation::Le, r(0))
            .constraint(vec![q(1, 2), r(-90), q(-1, 50), r(3)], Relation::Le, r(0))
            .constraint(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1));
        let out = lp.solve().unwrap();
        assert_eq!(out.optimal().unwrap().0, &q(-1, 20));
    }

    #[test]
    fn dimension_mismatch() {
        let cons = [Constraint::new(vec![r(1), r(1)], Relation::Ge, r(0))];
        assert!(lp_min(&[r(1)], &cons).is_err());
    }
}
