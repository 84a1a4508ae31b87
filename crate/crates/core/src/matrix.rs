//! Dense matrices over an exact field, with Gaussian elimination and the
//! subspace operations built on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Output of [`ExactMatrix::rref`].
#[derive(Debug, Clone)]
pub struct Rref<F: Field> {
    pub matrix: ExactMatrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl<F: Field> fmt::Debug for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}x{} [", self.field.spec(), self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<F: Field> ExactMatrix<F> {
    pub fn new(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(ExactMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(ExactMatrix {
            field: field.clone(),
            rows: r,
            cols,
            data,
        })
    }

    /// Integer entries, reduced into the field. Panics on ragged input.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                r.iter().map(|&v| field.from_i64(v))
            })
            .collect();
        ExactMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// A matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F::Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(f.zero(), |acc, j| {
                    f.add(&acc, &f.mul(self.get(i, j), &v[j]))
                })
            })
            .collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&F::Elem, &F::Elem) -> F::Elem) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| self.field.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| self.field.mul(x, s)).collect(),
        }
    }

    pub fn trace(&self) -> F::Elem {
        let f = &self.field;
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Concatenates matrices left to right. `rows` fixes the row count so
    /// that an empty list (or a list of 0-column blocks) is well defined.
    pub fn hstack(field: &F, rows: usize, parts: &[&Self]) -> Self {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(field, rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..p.cols {
                    out.data[i * cols + off + j] = p.get(i, j).clone();
                }
            }
            off += p.cols;
        }
        out
    }

    /// Concatenates matrices top to bottom.
    pub fn vstack(field: &F, cols: usize, parts: &[&Self]) -> Self {
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            data.extend(p.data.iter().cloned());
        }
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Block-diagonal juxtaposition.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, other);
        out
    }

    /// Overwrites the block at (`r0`, `c0`) with `m`.
    pub fn paste(&mut self, r0: usize, c0: usize, m: &Self) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = m.get(i, j).clone();
            }
        }
    }

    pub fn submatrix(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Self {
        let mut out = Self::zeros(&self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.data[i * cols + j] = self.get(r0 + i, c0 + j).clone();
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(&self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + k] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        ExactMatrix {
            field: self.field.clone(),
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form. The pivot in each column is the first
    /// nonzero entry at or below the current row.
    pub fn rref(&self) -> Rref<F> {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of `{x : Mx = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let rr = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rr.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&j| !is_pivot[j])
            .map(|free| {
                let mut v = vec![f.zero(); self.cols];
                v[free] = f.one();
                for (i, &p) in rr.pivots.iter().enumerate() {
                    v[p] = f.neg(rr.matrix.get(i, free));
                }
                v
            })
            .collect()
    }

    /// The null space as the columns of a matrix.
    pub fn nullspace_matrix(&self) -> Self {
        Self::from_columns(&self.field, self.cols, &self.nullspace_basis())
    }

    pub fn column_space_contains(&self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.rows);
        let col = Self::from_columns(&self.field, self.rows, &[v.to_vec()]);
        Self::hstack(&self.field, self.rows, &[self, &col]).rank() == self.rank()
    }

    /// True iff every column of `other` lies in the column space of `self`.
    pub fn column_space_contains_all(&self, other: &Self) -> bool {
        assert_eq!(self.rows, other.rows);
        Self::hstack(&self.field, self.rows, &[self, other]).rank() == self.rank()
    }

    /// Columns `C` with `[self | C]` of full row rank, picked greedily from
    /// the standard basis in index order.
    pub fn complete_to_full_rank(&self) -> Self {
        let f = &self.field;
        let mut current = self.clone();
        let mut rank = current.rank();
        let mut chosen = Vec::new();
        for i in 0..self.rows {
            if rank == self.rows {
                break;
            }
            let mut e = vec![f.zero(); self.rows];
            e[i] = f.one();
            let col = Self::from_columns(f, self.rows, &[e.clone()]);
            let trial = Self::hstack(f, self.rows, &[&current, &col]);
            let r = trial.rank();
            if r > rank {
                rank = r;
                current = trial;
                chosen.push(e);
            }
        }
        Self::from_columns(f, self.rows, &chosen)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::hstack(&self.field, n, &[self, &Self::identity(&self.field, n)]);
        let rr = aug.rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(rr.matrix.submatrix(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Some `X` with `self · X = b`, if one exists.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows);
        let f = &self.field;
        let n = self.cols;
        let aug = Self::hstack(f, self.rows, &[self, b]);
        let rr = aug.rref();
        if rr.pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Self::zeros(f, n, b.cols);
        for (i, &p) in rr.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, rr.matrix.get(i, n + j).clone());
            }
        }
        Some(x)
    }

    /// Canonical basis of the column space: the transposed nonzero rows of
    /// the RREF of the transpose. Equal subspaces give identical matrices.
    pub fn column_basis(&self) -> Self {
        let rr = self.transpose().rref();
        let r = rr.rank();
        rr.matrix.submatrix(0, r, 0, self.rows).transpose()
    }

    /// Indices of a maximal set of independent columns, greedy from the left.
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().pivots
    }

    pub fn same_column_space(&self, other: &Self) -> bool {
        self.rows == other.rows && self.column_basis() == other.column_basis()
    }

    /// Basis of the intersection of two column spaces.
    pub fn column_intersection(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let f = &self.field;
        let joint = Self::hstack(f, self.rows, &[self, &other.neg()]);
        let ns = joint.nullspace_basis();
        let coeffs: Vec<Vec<F::Elem>> = ns.iter().map(|v| v[..self.cols].to_vec()).collect();
        let c = Self::from_columns(f, self.cols, &coeffs);
        self.mul(&c).column_basis()
    }

    /// Basis of the sum of two column spaces.
    pub fn column_sum(&self, other: &Self) -> Self {
        Self::hstack(&self.field, self.rows, &[self, other]).column_basis()
    }

    /// Rows spanning `{y : yᵀ · self = 0}`; their common kernel is exactly the
    /// column space of `self`.
    pub fn left_annihilator(&self) -> Self {
        let ns = self.transpose().nullspace_basis();
        let mut out = Self::zeros(&self.field, ns.len(), self.rows);
        for (i, v) in ns.iter().enumerate() {
            for (j, e) in v.iter().enumerate() {
                out.set(i, j, e.clone());
            }
        }
        out
    }

    /// Coordinates of the columns of `v` in the basis given by the
    /// (independent) columns of `self`.
    pub fn coordinates(&self, v: &Self) -> Option<Self> {
        self.solve(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn rref_of_repeated_row() {
        let f = gf(2);
        let m = ExactMatrix::from_i64(&f, &[&[1, 1], &[1, 1]]);
        let rr = m.rref();
        assert_eq!(rr.matrix, ExactMatrix::from_i64(&f, &[&[1, 1], &[0, 0]]));
        assert_eq!(rr.pivots, vec![0]);
    }

    #[test]
    fn rref_identity_and_zero() {
        let f = gf(2);
        let i = ExactMatrix::identity(&f, 2);
        let rr = i.rref();
        assert_eq!(rr.matrix, i);
        assert_eq!(rr.pivots, vec![0, 1]);
        assert_eq!(ExactMatrix::zeros(&f, 2, 3).rank(), 0);
    }

    #[test]
    fn nullspace_examples() {
        let f = gf(2);
        assert!(ExactMatrix::identity(&f, 3).nullspace_basis().is_empty());
        assert_eq!(ExactMatrix::zeros(&f, 2, 3).nullspace_basis().len(), 3);
        assert_eq!(
            ExactMatrix::from_i64(&f, &[&[1, 1]]).nullspace_basis(),
            vec![vec![1, 1]]
        );
    }

    #[test]
    fn containment_examples() {
        let f = gf(3);
        let m = ExactMatrix::from_i64(&f, &[&[1], &[1]]);
        assert!(m.column_space_contains(&[2, 2]));
        assert!(m.column_space_contains(&[0, 0]));
        let e1 = ExactMatrix::from_i64(&f, &[&[1], &[0]]);
        assert!(!e1.column_space_contains(&[0, 1]));
    }

    #[test]
    fn completion_examples() {
        let f = gf(2);
        let empty = ExactMatrix::zeros(&f, 1, 0);
        assert_eq!(
            empty.complete_to_full_rank(),
            ExactMatrix::from_i64(&f, &[&[1]])
        );
        assert_eq!(
            ExactMatrix::identity(&f, 3).complete_to_full_rank().cols(),
            0
        );
        let m = ExactMatrix::from_i64(&f, &[&[1], &[0]]);
        assert_eq!(
            m.complete_to_full_rank(),
            ExactMatrix::from_i64(&f, &[&[0], &[1]])
        );
    }

    #[test]
    fn inverse_of_unipotent_over_gf2_is_itself() {
        let f = gf(2);
        let m = ExactMatrix::from_i64(&f, &[&[1, 1], &[0, 1]]);
        assert_eq!(m.inverse().unwrap(), m);
        assert!(ExactMatrix::from_i64(&f, &[&[1, 1], &[1, 1]])
            .inverse()
            .is_none());
    }

    #[test]
    fn rational_solve_and_inverse() {
        let q = Rationals;
        let m = ExactMatrix::from_i64(&q, &[&[2, 1], &[1, 3]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ExactMatrix::identity(&q, 2));
        let b = ExactMatrix::from_i64(&q, &[&[1], &[0]]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul(&x), b);
    }

    #[test]
    fn intersection_and_sum() {
        let f = gf(3);
        let a = ExactMatrix::from_i64(&f, &[&[1, 0], &[0, 1], &[0, 0]]);
        let b = ExactMatrix::from_i64(&f, &[&[0, 0], &[1, 0], &[0, 1]]);
        let i = a.column_intersection(&b);
        assert_eq!(i, ExactMatrix::from_i64(&f, &[&[0], &[1], &[0]]));
        assert_eq!(a.column_sum(&b).cols(), 3);
    }

    #[test]
    fn annihilator_cuts_out_column_space() {
        let f = gf(5);
        let a = ExactMatrix::from_i64(&f, &[&[1, 2], &[2, 4], &[0, 1]]);
        let n = a.left_annihilator();
        assert_eq!(n.rows(), 3 - a.rank());
        assert!(n.mul(&a).is_zero());
    }
}
