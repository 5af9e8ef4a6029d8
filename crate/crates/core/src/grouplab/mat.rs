//! Dense matrices over a [`FiniteField`] and the exact linear algebra built on them.

use serde::{Deserialize, Serialize};

use super::field::{Fe, FiniteField};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Fe>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, a: rows.concat() }
    }

    pub fn from_cols(n: usize, cols: &[Vec<Fe>]) -> Mat {
        let mut m = Mat::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for i in 0..n {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    /// Permutation matrix with `e_j ↦ e_{perm[j]}`.
    pub fn perm(perm: &[usize]) -> Mat {
        let n = perm.len();
        let mut m = Mat::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.a[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn cols_vec(&self) -> Vec<Vec<Fe>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Fe>> {
        self.a.chunks(self.cols.max(1)).map(|r| r.to_vec()).take(self.rows).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.cols_vec();
        cols.extend(other.cols_vec());
        Mat::from_cols(self.rows, &cols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_cols(self.rows, &idx.iter().map(|&j| self.col(j)).collect::<Vec<_>>())
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.rows)
    }

    /// Injective integer key for square matrices over a field of the given size.
    pub fn key(&self, size: u32) -> u128 {
        self.a.iter().fold(0u128, |acc, &x| acc * size as u128 + x as u128)
    }

    pub fn from_key(mut key: u128, n: usize, size: u32) -> Mat {
        let mut a = vec![0; n * n];
        for slot in a.iter_mut().rev() {
            *slot = (key % size as u128) as Fe;
            key /= size as u128;
        }
        Mat { rows: n, cols: n, a }
    }
}

impl FiniteField {
    pub fn mat_mul(&self, x: &Mat, y: &Mat) -> Mat {
        assert_eq!(x.cols, y.rows, "shape mismatch");
        let mut out = Mat::zeros(x.rows, y.cols);
        for i in 0..x.rows {
            for k in 0..x.cols {
                let a = x.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..y.cols {
                    let b = y.get(k, j);
                    if b != 0 {
                        let v = self.add(out.get(i, j), self.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mat_add(&self, x: &Mat, y: &Mat) -> Mat {
        assert_eq!((x.rows, x.cols), (y.rows, y.cols));
        Mat { rows: x.rows, cols: x.cols, a: x.a.iter().zip(&y.a).map(|(&a, &b)| self.add(a, b)).collect() }
    }

    pub fn mat_scale(&self, c: Fe, x: &Mat) -> Mat {
        Mat { rows: x.rows, cols: x.cols, a: x.a.iter().map(|&a| self.mul(c, a)).collect() }
    }

    pub fn mat_vec(&self, x: &Mat, v: &[Fe]) -> Vec<Fe> {
        (0..x.rows).map(|i| (0..x.cols).fold(0, |acc, j| self.add(acc, self.mul(x.get(i, j), v[j])))).collect()
    }

    pub fn dot(&self, u: &[Fe], v: &[Fe]) -> Fe {
        u.iter().zip(v).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Entrywise `x ↦ x^{q^e}`.
    pub fn mat_frob(&self, x: &Mat, e: u32) -> Mat {
        Mat { rows: x.rows, cols: x.cols, a: x.a.iter().map(|&a| self.frob(a, e)).collect() }
    }

    pub fn mat_embed(&self, table: &[Fe], x: &Mat) -> Mat {
        Mat { rows: x.rows, cols: x.cols, a: x.a.iter().map(|&a| table[a as usize]).collect() }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, x: &Mat) -> (Mat, Vec<usize>) {
        let mut m = x.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    let t = m.get(pr, j);
                    m.set(pr, j, m.get(r, j));
                    m.set(r, j, t);
                }
            }
            let inv = self.inv(m.get(r, c));
            for j in 0..m.cols {
                let v = self.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i != r && f != 0 {
                    for j in 0..m.cols {
                        let v = self.sub(m.get(i, j), self.mul(f, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, x: &Mat) -> usize {
        self.rref(x).1.len()
    }

    pub fn det(&self, x: &Mat) -> Fe {
        assert_eq!(x.rows, x.cols);
        let n = x.rows;
        let mut m = x.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else { return 0 };
            if pr != c {
                for j in 0..n {
                    let t = m.get(pr, j);
                    m.set(pr, j, m.get(c, j));
                    m.set(c, j, t);
                }
                det = self.neg(det);
            }
            let pv = m.get(c, c);
            det = self.mul(det, pv);
            let inv = self.inv(pv);
            for i in c + 1..n {
                let f = self.mul(m.get(i, c), inv);
                if f != 0 {
                    for j in c..n {
                        let v = self.sub(m.get(i, j), self.mul(f, m.get(c, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self, x: &Mat) -> Option<Mat> {
        let n = x.rows;
        let aug = x.hcat(&Mat::identity(n));
        let (r, piv) = self.rref(&aug);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Canonical basis of the column span: transposed rows of the RREF of the transpose.
    pub fn col_span(&self, x: &Mat) -> Mat {
        let (r, piv) = self.rref(&x.transpose());
        let mut cols = Vec::new();
        for i in 0..piv.len() {
            cols.push((0..r.cols).map(|j| r.get(i, j)).collect::<Vec<_>>());
        }
        Mat::from_cols(x.rows, &cols)
    }

    pub fn in_span(&self, basis: &Mat, v: &[Fe]) -> bool {
        self.solve(basis, v).is_some()
    }

    pub fn span_contains(&self, big: &Mat, small: &Mat) -> bool {
        (0..small.cols).all(|j| self.in_span(big, &small.col(j)))
    }

    /// One solution of `x·c = v`, if any.
    pub fn solve(&self, x: &Mat, v: &[Fe]) -> Option<Vec<Fe>> {
        let aug = x.hcat(&Mat::from_cols(x.rows, &[v.to_vec()]));
        let (r, piv) = self.rref(&aug);
        if piv.last() == Some(&x.cols) {
            return None;
        }
        let mut c = vec![0; x.cols];
        for (i, &p) in piv.iter().enumerate() {
            c[p] = r.get(i, x.cols);
        }
        Some(c)
    }

    /// Basis of the null space `{c : x·c = 0}`.
    pub fn kernel(&self, x: &Mat) -> Mat {
        let (r, piv) = self.rref(x);
        let free: Vec<usize> = (0..x.cols).filter(|c| !piv.contains(c)).collect();
        let mut cols = Vec::new();
        for &f in &free {
            let mut v = vec![0; x.cols];
            v[f] = 1;
            for (i, &p) in piv.iter().enumerate() {
                v[p] = self.neg(r.get(i, f));
            }
            cols.push(v);
        }
        Mat::from_cols(x.cols, &cols)
    }

    /// Annihilator `{f : f·v = 0 for v in span}` as canonical column span.
    pub fn annihilator(&self, span: &Mat) -> Mat {
        self.col_span(&self.kernel(&span.transpose()))
    }

    /// Columns of the canonical basis of `sup` not in the span of `sub` and the columns chosen so far.
    pub fn complement_in(&self, sub: &Mat, sup: &Mat) -> Mat {
        let sup = self.col_span(sup);
        let mut acc = sub.clone();
        let mut chosen = Vec::new();
        for j in 0..sup.cols {
            let v = sup.col(j);
            if !self.in_span(&acc, &v) {
                acc = acc.hcat(&Mat::from_cols(sup.rows, &[v.clone()]));
                chosen.push(v);
            }
        }
        Mat::from_cols(sup.rows, &chosen)
    }

    pub fn is_invertible(&self, x: &Mat) -> bool {
        x.rows == x.cols && self.det(x) != 0
    }
}

/// `|GL_n(F_Q)|`.
pub fn gl_order(n: usize, big_q: u128) -> u128 {
    (0..n as u32).map(|i| big_q.pow(n as u32) - big_q.pow(i)).product()
}
