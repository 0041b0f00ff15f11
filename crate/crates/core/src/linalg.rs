//! Exact linear algebra over Q and Z.

#![allow(clippy::needless_range_loop)]

use num::{BigInt, Integer, One, Signed, Zero};

use crate::poly::Q;

/// Reduced row echelon form. Pivots are chosen left to right.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    /// Rows with a leading one in `pivots[i]` and zeros in every other pivot column.
    pub rows: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = Vec<Q>>) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows in place.
    pub fn reduce(&self, v: &mut [Q]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
    }

    /// Adds a row; returns false if it was already in the span.
    pub fn insert(&mut self, mut v: Vec<Q>) -> bool {
        assert_eq!(v.len(), self.ncols);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivots.binary_search(&c).is_ok()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.is_pivot(*c)).collect()
    }
}

/// Basis of the right null space of `a` (rows of length `ncols`).
pub fn kernel(a: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let e = Echelon::from_rows(ncols, a.iter().cloned());
    let mut out = Vec::new();
    for f in e.free_columns() {
        let mut v = vec![Q::zero(); ncols];
        v[f] = Q::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            v[p] = -row[f].clone();
        }
        out.push(v);
    }
    out
}

pub fn rank(a: &[Vec<Q>], ncols: usize) -> usize {
    Echelon::from_rows(ncols, a.iter().cloned()).rank()
}

pub fn transpose(a: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    (0..ncols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Determinant by fraction-free elimination on a copy.
pub fn determinant(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// Invariant factors of an integer matrix (nonzero diagonal of the Smith form).
pub fn smith_invariants(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let f = m[i][t].div_floor(&m[t][t]);
            if !f.is_zero() {
                for j in t..cols {
                    let s = &f * &m[t][j];
                    m[i][j] -= s;
                }
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let f = m[t][j].div_floor(&m[t][t]);
            if !f.is_zero() {
                for i in t..rows {
                    let s = &f * &m[i][t];
                    m[i][j] -= s;
                }
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition
        let pivot = m[t][t].clone();
        let mut fixed = false;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !m[i][j].is_multiple_of(&pivot) {
                    for k in t..cols {
                        let v = m[i][k].clone();
                        m[t][k] += v;
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        out.push(pivot.abs());
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|x| q(*x)).collect()
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = vec![qs(&[1, 2, 3, 4]), qs(&[2, 4, 6, 8]), qs(&[0, 1, 1, 0])];
        let k = kernel(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in &a {
                let s: Q = r.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn determinant_small() {
        let a = vec![qs(&[2, 1]), qs(&[7, 4])];
        assert_eq!(determinant(&a), q(1));
        let b = vec![qs(&[0, 1, 0]), qs(&[1, 0, 0]), qs(&[0, 0, 3])];
        assert_eq!(determinant(&b), q(-3));
    }

    #[test]
    fn smith_of_known_matrices() {
        let m = |v: Vec<Vec<i64>>| -> Vec<Vec<BigInt>> {
            v.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect()
        };
        assert_eq!(
            smith_invariants(&m(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]])),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        assert_eq!(
            smith_invariants(&m(vec![vec![1, 1, 1, 1, 0], vec![1, 0, 3, 0, 1]])),
            vec![BigInt::one(), BigInt::one()]
        );
        assert_eq!(
            smith_invariants(&m(vec![vec![2, 0], vec![0, 0]])),
            vec![BigInt::from(2)]
        );
    }
}
