use serde::{Deserialize, Serialize};

use super::{LinalgError, Rat};

/// A vector of exact rationals. Length is fixed by whoever creates it.
pub type QVec = Vec<Rat>;

pub fn zeros(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Rat, a: &[Rat]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Rat::is_zero)
}

pub fn norm_sq(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn max_abs(a: &[Rat]) -> Rat {
    a.iter().map(Rat::abs).fold(Rat::zero(), Rat::max)
}

/// Rectangular matrix of rationals stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QMat {
    rows: Vec<QVec>,
}

impl QMat {
    pub fn from_rows(rows: Vec<QVec>) -> Result<Self, LinalgError> {
        if let Some(first) = rows.first() {
            let n = first.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(LinalgError::Ragged);
            }
        }
        Ok(QMat { rows })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        QMat {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&x| Rat::from(x)).collect())
                .collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        QMat {
            rows: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols() || self.nrows() == 0
    }

    pub fn rows(&self) -> &[QVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.nrows()).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<QVec, LinalgError> {
        if x.len() != self.ncols() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols(),
                found: x.len(),
            });
        }
        Ok(self.rows.iter().map(|r| dot(r, x)).collect())
    }

    /// `x · A · y`.
    pub fn bilinear(&self, x: &[Rat], y: &[Rat]) -> Result<Rat, LinalgError> {
        if x.len() != self.nrows() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.nrows(),
                found: x.len(),
            });
        }
        Ok(dot(x, &self.mul_vec(y)?))
    }

    pub fn transpose(&self) -> QMat {
        let (m, n) = (self.nrows(), self.ncols());
        QMat {
            rows: (0..n)
                .map(|j| (0..m).map(|i| self.rows[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn neg(&self) -> QMat {
        QMat {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    /// Leading `k × k` principal submatrix.
    pub fn leading(&self, k: usize) -> QMat {
        QMat {
            rows: self.rows[..k].iter().map(|r| r[..k].to_vec()).collect(),
        }
    }

    /// Gram matrix of `vectors` under the bilinear form `self`.
    pub fn gram(&self, vectors: &[QVec]) -> Result<QMat, LinalgError> {
        let mut rows = Vec::with_capacity(vectors.len());
        for a in vectors {
            let mut row = Vec::with_capacity(vectors.len());
            for b in vectors {
                row.push(self.bilinear(a, b)?);
            }
            rows.push(row);
        }
        Ok(QMat { rows })
    }

    pub fn determinant(&self) -> Result<Rat, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Rat::zero());
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &pivot;
                for c in col..n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= &delta;
                }
            }
        }
        Ok(det)
    }

    /// Reduced row echelon form; returns the reduced rows and pivot columns.
    pub fn rref(&self) -> (Vec<QVec>, Vec<usize>) {
        let mut a = self.rows.clone();
        let (m, n) = (self.nrows(), self.ncols());
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(p, row);
            let inv = a[row][col].recip();
            for x in a[row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..m {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..n {
                        let delta = &f * &a[row][c];
                        a[r][c] -= &delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`.
    pub fn null_space(&self) -> Vec<QVec> {
        let n = self.ncols();
        let (a, pivots) = self.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = zeros(n);
                v[fc] = Rat::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&a[r][fc];
                }
                v
            })
            .collect()
    }
}

/// Solves `A x = b` for square `A`. `Ok(None)` means `A` is singular.
pub fn solve_linear(a: &QMat, b: &[Rat]) -> Result<Option<QVec>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare);
    }
    let n = a.nrows();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut aug: Vec<QVec> = a
        .rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !aug[r][col].is_zero()) else {
            return Ok(None);
        };
        aug.swap(p, col);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=n {
                    let delta = &f * &aug[col][c];
                    aug[r][c] -= &delta;
                }
            }
        }
    }
    Ok(Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect()))
}

/// Outcome of a negative-definiteness test, with the leading principal minors
/// of `-A` as witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definiteness {
    pub negative_definite: bool,
    pub minors: Vec<Rat>,
}

/// Sylvester's criterion applied to `-A`: negative definite iff every leading
/// principal minor of `-A` is positive. All minors are returned.
pub fn is_negative_definite(a: &QMat) -> Result<Definiteness, LinalgError> {
    if !a.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let neg = a.neg();
    let minors = (1..=a.nrows())
        .map(|k| neg.leading(k).determinant())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Definiteness {
        negative_definite: minors.iter().all(Rat::is_positive),
        minors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    #[test]
    fn solve_identity() {
        let x = solve_linear(&QMat::identity(2), &[q(1, 2), q(-3, 1)]).unwrap();
        assert_eq!(x, Some(vec![q(1, 2), q(-3, 1)]));
    }

    #[test]
    fn solve_one_by_one() {
        let a = QMat::from_ints(&[&[-1]]);
        assert_eq!(solve_linear(&a, &[q(2, 1)]).unwrap(), Some(vec![q(-2, 1)]));
    }

    #[test]
    fn solve_singular() {
        let a = QMat::from_ints(&[&[-1, 1], &[1, -1]]);
        assert_eq!(solve_linear(&a, &[Rat::zero(), Rat::zero()]).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = QMat::identity(2);
        assert!(matches!(
            solve_linear(&a, &[Rat::one()]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let r = QMat::from_ints(&[&[1, 2]]);
        assert_eq!(solve_linear(&r, &[Rat::one()]), Err(LinalgError::NotSquare));
    }

    #[test]
    fn negative_definite_examples() {
        let d = is_negative_definite(&QMat::from_ints(&[&[-1]])).unwrap();
        assert!(d.negative_definite);
        assert_eq!(d.minors, vec![q(1, 1)]);

        let d = is_negative_definite(&QMat::from_ints(&[&[-1, 1], &[1, -1]])).unwrap();
        assert!(!d.negative_definite);
        assert_eq!(d.minors, vec![q(1, 1), Rat::zero()]);

        let d = is_negative_definite(&QMat::from_ints(&[&[-2, 1], &[1, -2]])).unwrap();
        assert!(d.negative_definite);
        assert_eq!(d.minors, vec![q(2, 1), q(3, 1)]);
    }

    #[test]
    fn non_symmetric_rejected() {
        let a = QMat::from_ints(&[&[-1, 2], &[0, -1]]);
        assert_eq!(is_negative_definite(&a), Err(LinalgError::NotSymmetric));
    }

    #[test]
    fn empty_matrix_is_negative_definite() {
        let d = is_negative_definite(&QMat::from_rows(vec![]).unwrap()).unwrap();
        assert!(d.negative_definite);
        assert!(d.minors.is_empty());
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = QMat::from_ints(&[&[1, 2, 3]]);
        let ns = a.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).unwrap().iter().all(Rat::is_zero));
        }
    }
}
