use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::ExactMatrix;
use crate::poset::Poset;
use crate::tits::DimensionVector;

/// A block matrix `M = [M(a)]_{a∈S}` with `d0` rows and `d(a)` columns in
/// block `a`; blocks are ordered like the poset elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRep<F: Field> {
    poset: Arc<Poset>,
    field: F,
    d0: usize,
    blocks: Vec<ExactMatrix<F>>,
}

impl<F: Field> MatrixRep<F> {
    pub fn new(
        poset: Arc<Poset>,
        field: F,
        d0: usize,
        blocks: Vec<ExactMatrix<F>>,
    ) -> Result<Self> {
        if blocks.len() != poset.len() {
            return Err(Error::DimensionMismatch {
                expected: poset.len(),
                got: blocks.len(),
            });
        }
        for b in &blocks {
            if b.rows() != d0 {
                return Err(Error::DimensionMismatch {
                    expected: d0,
                    got: b.rows(),
                });
            }
            if *b.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(MatrixRep {
            poset,
            field,
            d0,
            blocks,
        })
    }

    /// The zero matrix of the given dimension.
    pub fn zero(poset: Arc<Poset>, field: F, dim: &DimensionVector) -> Result<Self> {
        dim.check(&poset)?;
        let blocks = dim
            .values
            .iter()
            .map(|&c| ExactMatrix::zeros(&field, dim.d0, c))
            .collect();
        Self::new(poset, field, dim.d0, blocks)
    }

    /// Splits the columns of a `d0 × Σd` matrix into blocks of widths `widths`.
    pub fn from_full(poset: Arc<Poset>, full: &ExactMatrix<F>, widths: &[usize]) -> Result<Self> {
        if widths.len() != poset.len() {
            return Err(Error::DimensionMismatch {
                expected: poset.len(),
                got: widths.len(),
            });
        }
        let total: usize = widths.iter().sum();
        if total != full.cols() {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: full.cols(),
            });
        }
        let mut off = 0;
        let blocks = widths
            .iter()
            .map(|&w| {
                let b = full.submatrix(0, full.rows(), off, w);
                off += w;
                b
            })
            .collect();
        Self::new(poset, full.field().clone(), full.rows(), blocks)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn block(&self, a: usize) -> &ExactMatrix<F> {
        &self.blocks[a]
    }

    pub fn blocks(&self) -> &[ExactMatrix<F>] {
        &self.blocks
    }

    pub fn widths(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.cols()).collect()
    }

    /// Column offset of each block inside the full matrix.
    pub fn offsets(&self) -> Vec<usize> {
        offsets(&self.widths())
    }

    pub fn total_columns(&self) -> usize {
        self.blocks.iter().map(|b| b.cols()).sum()
    }

    pub fn dimension(&self) -> DimensionVector {
        DimensionVector::new(self.d0, self.widths())
    }

    /// All blocks side by side, `d0 × Σd`.
    pub fn full_matrix(&self) -> ExactMatrix<F> {
        let parts: Vec<&ExactMatrix<F>> = self.blocks.iter().collect();
        ExactMatrix::hstack(&self.field, self.d0, &parts)
    }

    /// The blocks `M(b)` with `b ⪯ a`, side by side.
    pub fn stacked(&self, a: usize) -> ExactMatrix<F> {
        self.stack_of(&self.poset.lower_cone(a))
    }

    /// The blocks `M(b)` with `b ≺ a`, side by side.
    pub fn stacked_strict(&self, a: usize) -> ExactMatrix<F> {
        self.stack_of(&self.poset.strict_lower_cone(a))
    }

    fn stack_of(&self, elems: &[usize]) -> ExactMatrix<F> {
        let parts: Vec<&ExactMatrix<F>> = elems.iter().map(|&b| &self.blocks[b]).collect();
        ExactMatrix::hstack(&self.field, self.d0, &parts)
    }

    pub fn is_sincere(&self) -> bool {
        self.blocks.iter().all(|b| b.cols() > 0)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.poset != other.poset || self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.block_diag(b))
            .collect();
        Self::new(
            self.poset.clone(),
            self.field.clone(),
            self.d0 + other.d0,
            blocks,
        )
    }

    pub fn direct_sum_all(poset: Arc<Poset>, field: F, parts: &[Self]) -> Result<Self> {
        let mut acc = Self::zero(poset.clone(), field, &DimensionVector::zero(poset.len()))?;
        for p in parts {
            acc = acc.direct_sum(p)?;
        }
        Ok(acc)
    }

    /// The trivial element `T_a`: no rows, one column at `a`.
    pub fn special_t(poset: Arc<Poset>, field: F, a: usize) -> Self {
        let blocks = (0..poset.len())
            .map(|b| ExactMatrix::zeros(&field, 0, usize::from(b == a)))
            .collect();
        MatrixRep {
            poset,
            field,
            d0: 0,
            blocks,
        }
    }

    /// `T_0`: one row and no columns.
    pub fn special_t0(poset: Arc<Poset>, field: F) -> Self {
        let blocks = (0..poset.len())
            .map(|_| ExactMatrix::zeros(&field, 1, 0))
            .collect();
        MatrixRep {
            poset,
            field,
            d0: 1,
            blocks,
        }
    }

    /// `E_a`: block `(1)` at `a`, empty elsewhere.
    pub fn special_e(poset: Arc<Poset>, field: F, a: usize) -> Self {
        Self::special_e_set(poset, field, &[a])
    }

    /// `E_p` for a pair `p = {b, c}`: block `(1)` at both members.
    pub fn special_e_pair(poset: Arc<Poset>, field: F, b: usize, c: usize) -> Self {
        Self::special_e_set(poset, field, &[b, c])
    }

    /// One row, a single `1` column at each listed element.
    pub fn special_e_set(poset: Arc<Poset>, field: F, elems: &[usize]) -> Self {
        let one = ExactMatrix::identity(&field, 1);
        let blocks = (0..poset.len())
            .map(|b| {
                if elems.contains(&b) {
                    one.clone()
                } else {
                    ExactMatrix::zeros(&field, 1, 0)
                }
            })
            .collect();
        MatrixRep {
            poset,
            field,
            d0: 1,
            blocks,
        }
    }

    /// Moves the element to a larger poset along `embed` (element `i` of
    /// this poset becomes `embed[i]`); other blocks are empty.
    pub fn extend_to(&self, target: Arc<Poset>, embed: &[usize]) -> Result<Self> {
        let mut blocks: Vec<ExactMatrix<F>> = (0..target.len())
            .map(|_| ExactMatrix::zeros(&self.field, self.d0, 0))
            .collect();
        for (i, &t) in embed.iter().enumerate() {
            blocks[t] = self.blocks[i].clone();
        }
        Self::new(target, self.field.clone(), self.d0, blocks)
    }

    /// The element on an induced subposet, dropping blocks outside `subset`
    /// (they must be empty for the result to be equivalent).
    pub fn restrict_to(&self, sub: Arc<Poset>, subset: &[usize]) -> Result<Self> {
        let blocks = subset.iter().map(|&i| self.blocks[i].clone()).collect();
        Self::new(sub, self.field.clone(), self.d0, blocks)
    }

    /// Column reduction `M X = R`, with `X` invertible and incidence-shaped:
    /// each block of `R` is `[C_a | 0]` where the columns of `C_a` stay
    /// independent modulo the span of the blocks below `a`. Returns `X`, `R`
    /// and the widths of the nonzero parts.
    pub fn column_reduction(&self) -> (ExactMatrix<F>, Self, Vec<usize>) {
        let f = &self.field;
        let widths = self.widths();
        let offs = offsets(&widths);
        let total = self.total_columns();
        let mut x = ExactMatrix::zeros(f, total, total);
        let mut ranks = Vec::with_capacity(self.poset.len());
        for a in 0..self.poset.len() {
            let lower = self.poset.strict_lower_cone(a);
            let l = self.stack_of(&lower);
            let ma = &self.blocks[a];
            let joint = ExactMatrix::hstack(f, self.d0, &[&l, ma]);
            let pivots: Vec<usize> = joint
                .rref()
                .pivots
                .into_iter()
                .filter(|&p| p >= l.cols())
                .map(|p| p - l.cols())
                .collect();
            let non_pivots: Vec<usize> = (0..ma.cols()).filter(|j| !pivots.contains(j)).collect();
            ranks.push(pivots.len());
            let mp = ma.select_columns(&pivots);
            let basis = ExactMatrix::hstack(f, self.d0, &[&l, &mp]);
            for (k, &p) in pivots.iter().enumerate() {
                x.set(offs[a] + p, offs[a] + k, f.one());
            }
            for (k, &j) in non_pivots.iter().enumerate() {
                let col = offs[a] + pivots.len() + k;
                x.set(offs[a] + j, col, f.one());
                let target = ma.select_columns(&[j]);
                let sol = basis
                    .solve(&target)
                    .expect("non-pivot column lies in the span");
                let mut r = 0;
                for &b in &lower {
                    for c in 0..widths[b] {
                        x.set(offs[b] + c, col, f.neg(sol.get(r, 0)));
                        r += 1;
                    }
                }
                for &p in &pivots {
                    x.set(offs[a] + p, col, f.neg(sol.get(r, 0)));
                    r += 1;
                }
            }
        }
        let reduced = self.full_matrix().mul(&x);
        let r = Self::from_full(self.poset.clone(), &reduced, &widths).expect("same shape");
        (x, r, ranks)
    }

    /// Number of `T_a` summands at each element: `d(a)` minus the rank gained
    /// by the block over the blocks strictly below.
    pub fn trivial_multiplicities(&self) -> Vec<usize> {
        (0..self.poset.len())
            .map(|a| {
                let gain = self.stacked(a).rank() - self.stacked_strict(a).rank();
                self.blocks[a].cols() - gain
            })
            .collect()
    }

    /// `rank(M_a) = rank(M_{≺a}) + d(a)` for every `a`: the columns realize
    /// `d` as the dimension of the associated subspace representation.
    pub fn realizes_dimension(&self) -> bool {
        self.trivial_multiplicities().iter().all(|&m| m == 0)
    }
}

pub(crate) fn offsets(widths: &[usize]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(widths.len());
    let mut acc = 0;
    for &w in widths {
        offs.push(acc);
        acc += w;
    }
    offs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    #[test]
    fn special_dimensions() {
        let p = Arc::new(Poset::antichain(3));
        let f = Fp::new(2).unwrap();
        assert_eq!(
            MatrixRep::special_t(p.clone(), f, 1).dimension(),
            DimensionVector::new(0, vec![0, 1, 0])
        );
        assert_eq!(
            MatrixRep::special_t0(p.clone(), f).dimension(),
            DimensionVector::new(1, vec![0, 0, 0])
        );
        assert_eq!(
            MatrixRep::special_e(p.clone(), f, 0).dimension(),
            DimensionVector::new(1, vec![1, 0, 0])
        );
        assert_eq!(
            MatrixRep::special_e_pair(p.clone(), f, 0, 1).dimension(),
            DimensionVector::new(1, vec![1, 1, 0])
        );
    }

    #[test]
    fn reduction_splits_off_dependent_columns() {
        let p = Arc::new(Poset::chain(2));
        let f = Fp::new(3).unwrap();
        let lo = ExactMatrix::from_i64(&f, &[&[1], &[0]]);
        let hi = ExactMatrix::from_i64(&f, &[&[2, 0], &[0, 1]]);
        let u = MatrixRep::new(p, f, 2, vec![lo, hi]).unwrap();
        assert_eq!(u.trivial_multiplicities(), vec![0, 1]);
        let (x, r, ranks) = u.column_reduction();
        assert_eq!(ranks, vec![1, 1]);
        assert!(x.is_invertible());
        assert_eq!(u.full_matrix().mul(&x), r.full_matrix());
        assert!(r.block(1).select_columns(&[1]).is_zero());
    }
}
