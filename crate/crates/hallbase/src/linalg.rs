//! Dense linear algebra over the small finite fields.
//!
//! Conventions: a matrix sends column vectors on the right, so a map
//! `V -> W` with `dim V = s`, `dim W = t` is a `t x s` matrix.  Subspaces are
//! represented by their reduced row echelon basis (rows span the subspace),
//! which is a canonical form: two subspaces are equal iff their RREF bases
//! are equal.

use crate::gf::Field;
use std::sync::Arc;

#[derive(Clone)]
pub struct Mat {
    pub f: Arc<Field>,
    pub rows: usize,
    pub cols: usize,
    d: Vec<u8>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.f.q == other.f.q
            && self.rows == other.rows
            && self.cols == other.cols
            && self.d == other.d
    }
}
impl Eq for Mat {}

impl std::hash::Hash for Mat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.f.q, self.rows, self.cols, &self.d).hash(state);
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} over F_{}", self.rows, self.cols, self.f.q)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.d[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(f: Arc<Field>, rows: usize, cols: usize) -> Mat {
        Mat { f, rows, cols, d: vec![0; rows * cols] }
    }

    pub fn identity(f: Arc<Field>, n: usize) -> Mat {
        let mut m = Mat::zero(f, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(f: Arc<Field>, rows: Vec<Vec<u8>>, cols: usize) -> Mat {
        let mut m = Mat::zero(f, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.d[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn from_fn(f: Arc<Field>, rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> u8) -> Mat {
        let mut m = Mat::zero(f, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, g(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.d[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u8) {
        self.d[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.d[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.f.clone(), self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let f = &self.f;
        let mut out = Mat::zero(self.f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.get(k, j));
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, t));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(self.cols, v.len());
        let f = &self.f;
        let mut out = vec![0u8; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u8;
            for j in 0..self.cols {
                acc = f.add(acc, f.mul(self.get(i, j), v[j]));
            }
            out[i] = acc;
        }
        out
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut d = self.d.clone();
        d.extend_from_slice(&other.d);
        Mat { f: self.f.clone(), rows: self.rows + other.rows, cols: self.cols, d }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.f.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // find a pivot in column c at or below row r
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let t = self.get(r, j);
                    self.set(r, j, self.get(p, j));
                    self.set(p, j, t);
                }
            }
            let lead = self.get(r, c);
            if lead != 1 {
                let s = f.inv(lead);
                for j in 0..self.cols {
                    self.set(r, j, f.mul(s, self.get(r, j)));
                }
            }
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        for j in 0..self.cols {
                            let t = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                            self.set(i, j, t);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// RREF basis of the row space, zero rows dropped.  This is the canonical
    /// form of the subspace spanned by the rows.
    pub fn row_space(&self) -> Mat {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        m.d.truncate(rank * m.cols);
        m.rows = rank;
        m
    }

    /// RREF basis of the column space.
    pub fn column_space(&self) -> Mat {
        self.transpose().row_space()
    }

    /// Basis of `{x : self * x = 0}`, one kernel vector per row.
    pub fn kernel(&self) -> Mat {
        let f = self.f.clone();
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![0u8; self.cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, fc));
            }
            rows.push(v);
        }
        Mat::from_rows(f, rows, self.cols)
    }
}

/// Reduce `v` modulo the row space of `basis` (which must be in RREF): after
/// the call, `v` has zeros in all pivot coordinates of `basis`.
pub fn reduce_modulo(v: &mut [u8], basis: &Mat, pivots: &[usize]) {
    let f = &basis.f;
    for (r, &pc) in pivots.iter().enumerate() {
        let c = v[pc];
        if c != 0 {
            for j in 0..basis.cols {
                v[j] = f.sub(v[j], f.mul(c, basis.get(r, j)));
            }
        }
    }
}

/// Does the row space of `sub` (RREF) contain `v`?
pub fn contains_vector(sub: &Mat, pivots: &[usize], v: &[u8]) -> bool {
    let mut w = v.to_vec();
    reduce_modulo(&mut w, sub, pivots);
    w.iter().all(|&x| x == 0)
}

/// All `k`-dimensional subspaces of `F_q^n`, as RREF basis matrices.
///
/// The enumeration is the standard one by pivot-column pattern; the caller
/// is responsible for budgeting (`gauss_binom(n, k, q)` matrices are
/// produced).
pub fn subspaces(f: &Arc<Field>, n: usize, k: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(Mat::zero(f.clone(), 0, n));
        return out;
    }
    // choose pivot columns p_1 < ... < p_k
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free positions: (row i, col j) with j > pivots[i], j not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pivots = &pivots;
                (pivots[i] + 1..n)
                    .filter(move |j| !pivots.contains(j))
                    .map(move |j| (i, j))
            })
            .collect();
        let q = f.q as usize;
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut m = Mat::zero(f.clone(), k, n);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            let mut c = code;
            for &(i, j) in &free {
                m.set(i, j, (c % q) as u8);
                c /= q;
            }
            out.push(m);
        }
        // next pivot pattern
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All subspaces `W` with `lower <= W <= F_q^n` and `dim W = k`, where
/// `lower` is an RREF basis.  Enumerates subspaces of the complement
/// coordinates and adjoins `lower`.
pub fn subspaces_containing(lower: &Mat, k: usize) -> Vec<Mat> {
    let n = lower.cols;
    let r = lower.rows;
    assert!(k >= r && k <= n);
    let mut lw = lower.clone();
    let pivots = lw.rref_in_place();
    assert_eq!(pivots.len(), r, "lower basis must have independent rows");
    let co: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for s in subspaces(&lower.f, n - r, k - r) {
        // lift: place quotient coordinates at the non-pivot columns
        let mut rows = Vec::with_capacity(k);
        for i in 0..r {
            rows.push(lw.row(i).to_vec());
        }
        for i in 0..s.rows {
            let mut v = vec![0u8; n];
            for (t, &c) in co.iter().enumerate() {
                v[c] = s.get(i, t);
            }
            rows.push(v);
        }
        out.push(Mat::from_rows(lower.f.clone(), rows, n).row_space());
    }
    out
}

/// Solve `basis^T y = w` for each column `w` of `vectors`, where the rows of
/// `basis` are independent and contain the columns of `vectors` in their
/// span: expresses vectors in the given subspace basis.  Returns the
/// coefficient matrix `y` of shape `basis.rows x vectors.cols`.
pub fn express_in_basis(vectors: &Mat, basis: &Mat) -> Mat {
    let f = &basis.f;
    assert_eq!(vectors.rows, basis.cols);
    // augmented system: [basis^T | vectors], eliminate
    let bt = basis.transpose();
    let mut aug = Mat::zero(f.clone(), bt.rows, bt.cols + vectors.cols);
    for i in 0..bt.rows {
        for j in 0..bt.cols {
            aug.set(i, j, bt.get(i, j));
        }
        for j in 0..vectors.cols {
            aug.set(i, bt.cols + j, vectors.get(i, j));
        }
    }
    let pivots = aug.rref_in_place();
    let mut y = Mat::zero(f.clone(), basis.rows, vectors.cols);
    for (r, &pc) in pivots.iter().enumerate() {
        if pc >= bt.cols {
            panic!("express_in_basis: vector outside subspace");
        }
        for j in 0..vectors.cols {
            y.set(pc, j, aug.get(r, bt.cols + j));
        }
    }
    // consistency: rows beyond the pivots must be zero
    for r in pivots.len()..aug.rows {
        for j in 0..aug.cols {
            assert_eq!(aug.get(r, j), 0, "express_in_basis: inconsistent system");
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gauss_binom;
    use num_bigint::BigUint;

    fn f(q: u64) -> Arc<Field> {
        Field::new(q).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let f2 = f(2);
        let m = Mat::from_rows(f2.clone(), vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3);
        assert_eq!(m.rank(), 2);
        let rs = m.row_space();
        assert_eq!(rs.rows, 2);
        assert_eq!(rs.row(0), &[1, 0, 1]);
        assert_eq!(rs.row(1), &[0, 1, 1]);
    }

    #[test]
    fn kernel_is_annihilated() {
        for q in [2u64, 3, 4, 9] {
            let fq = f(q);
            let m = Mat::from_fn(fq.clone(), 3, 5, |i, j| ((i * 5 + j * j + 1) % q as usize) as u8);
            let k = m.kernel();
            assert_eq!(k.rows, 5 - m.rank());
            for i in 0..k.rows {
                assert!(m.apply(k.row(i)).iter().all(|&x| x == 0), "kernel vector not killed");
            }
        }
    }

    #[test]
    fn matmul_against_apply() {
        let f3 = f(3);
        let a = Mat::from_rows(f3.clone(), vec![vec![1, 2], vec![0, 1], vec![2, 2]], 2);
        let b = Mat::from_rows(f3.clone(), vec![vec![1, 0, 1], vec![2, 1, 0]], 3);
        let ab = a.matmul(&b);
        assert_eq!(ab.rows, 3);
        assert_eq!(ab.cols, 3);
        // column j of ab = a applied to column j of b
        for j in 0..3 {
            let col: Vec<u8> = (0..2).map(|i| b.get(i, j)).collect();
            let expect = a.apply(&col);
            for i in 0..3 {
                assert_eq!(ab.get(i, j), expect[i]);
            }
        }
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for q in [2u64, 3, 4] {
            let fq = f(q);
            for n in 0..=4usize {
                for k in 0..=n {
                    let list = subspaces(&fq, n, k);
                    assert_eq!(
                        BigUint::from(list.len()),
                        gauss_binom(n as u32, k as u32, q),
                        "count of {k}-subspaces of F_{q}^{n}"
                    );
                    // all distinct and in canonical form
                    let mut seen = std::collections::HashSet::new();
                    for s in &list {
                        assert_eq!(&s.row_space(), s, "not canonical");
                        assert!(seen.insert(s.clone()), "duplicate subspace");
                    }
                }
            }
        }
    }

    #[test]
    fn subspaces_containing_a_line() {
        let f3 = f(3);
        // line spanned by (1,1,0) in F_3^3; planes containing it: (3^2-1)/(3-1) = 4
        let line = Mat::from_rows(f3.clone(), vec![vec![1, 1, 0]], 3);
        let planes = subspaces_containing(&line, 2);
        assert_eq!(planes.len(), 4);
        let mut lw = line.clone();
        let piv = lw.rref_in_place();
        for p in &planes {
            assert_eq!(p.rows, 2);
            assert!(contains_vector(p, &p.clone().rref_in_place(), &[1, 1, 0]));
            let _ = (&lw, &piv);
        }
        // trivial edges: the full space and the subspace itself
        assert_eq!(subspaces_containing(&line, 1), vec![line.row_space()]);
        assert_eq!(subspaces_containing(&line, 3).len(), 1);
    }

    #[test]
    fn express_in_basis_round_trip() {
        let f5 = f(5);
        let basis = Mat::from_rows(f5.clone(), vec![vec![1, 2, 0, 4], vec![0, 0, 1, 3]], 4);
        // vectors = basis^T * y0 for a known y0
        let y0 = Mat::from_rows(f5.clone(), vec![vec![2, 1], vec![3, 0]], 2);
        let vectors = basis.transpose().matmul(&y0);
        let y = express_in_basis(&vectors, &basis);
        assert_eq!(y, y0);
    }

    #[test]
    #[should_panic(expected = "outside subspace")]
    fn express_in_basis_rejects_outside_vectors() {
        let f2 = f(2);
        let basis = Mat::from_rows(f2.clone(), vec![vec![1, 0, 0]], 3);
        let v = Mat::from_rows(f2.clone(), vec![vec![0], vec![1], vec![0]], 1);
        express_in_basis(&v, &basis);
    }
}
