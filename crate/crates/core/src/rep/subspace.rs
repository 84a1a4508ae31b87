use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::ExactMatrix;
use crate::poset::Poset;
use crate::rep::matrix_rep::MatrixRep;
use crate::tits::DimensionVector;

/// A representation as an order-preserving family of subspaces `V(a)` of
/// `V(0) = F^ambient`. Each subspace is stored by its canonical column basis,
/// so equal representations compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceRep<F: Field> {
    poset: Arc<Poset>,
    field: F,
    ambient: usize,
    subspaces: Vec<ExactMatrix<F>>,
}

impl<F: Field> SubspaceRep<F> {
    /// Takes spanning sets (not necessarily independent) for each `V(a)`.
    pub fn new(
        poset: Arc<Poset>,
        field: F,
        ambient: usize,
        spans: Vec<ExactMatrix<F>>,
    ) -> Result<Self> {
        if spans.len() != poset.len() {
            return Err(Error::DimensionMismatch {
                expected: poset.len(),
                got: spans.len(),
            });
        }
        let mut subspaces = Vec::with_capacity(spans.len());
        for s in &spans {
            if s.rows() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: s.rows(),
                });
            }
            if *s.field() != field {
                return Err(Error::FieldMismatch);
            }
            subspaces.push(s.column_basis());
        }
        for (x, y) in poset.relations() {
            if !subspaces[y].column_space_contains_all(&subspaces[x]) {
                return Err(Error::Invalid(format!(
                    "V({}) is not contained in V({})",
                    poset.label(x),
                    poset.label(y)
                )));
            }
        }
        Ok(SubspaceRep {
            poset,
            field,
            ambient,
            subspaces,
        })
    }

    pub fn zero(poset: Arc<Poset>, field: F) -> Self {
        let subspaces = (0..poset.len())
            .map(|_| ExactMatrix::zeros(&field, 0, 0))
            .collect();
        SubspaceRep {
            poset,
            field,
            ambient: 0,
            subspaces,
        }
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

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Canonical basis of `V(a)`.
    pub fn subspace(&self, a: usize) -> &ExactMatrix<F> {
        &self.subspaces[a]
    }

    pub fn subspaces(&self) -> &[ExactMatrix<F>] {
        &self.subspaces
    }

    /// Basis of `Σ_{b≺a} V(b)`.
    pub fn lower_sum(&self, a: usize) -> ExactMatrix<F> {
        let lower = self.poset.strict_lower_cone(a);
        let parts: Vec<&ExactMatrix<F>> = lower.iter().map(|&b| &self.subspaces[b]).collect();
        ExactMatrix::hstack(&self.field, self.ambient, &parts).column_basis()
    }

    /// `d(0) = dim V(0)`, `d(a) = dim V(a)/Σ_{b≺a} V(b)`.
    pub fn dimension(&self) -> DimensionVector {
        let values = (0..self.poset.len())
            .map(|a| self.subspaces[a].cols() - self.lower_sum(a).cols())
            .collect();
        DimensionVector::new(self.ambient, values)
    }

    /// The block matrix whose block `a` spans a complement of
    /// `Σ_{b≺a} V(b)` in `V(a)`, chosen greedily from the canonical basis.
    pub fn lift(&self) -> MatrixRep<F> {
        let f = &self.field;
        let blocks = (0..self.poset.len())
            .map(|a| {
                let mut current = self.lower_sum(a);
                let mut rank = current.cols();
                let mut chosen = Vec::new();
                for j in 0..self.subspaces[a].cols() {
                    let col = self.subspaces[a].select_columns(&[j]);
                    let trial = ExactMatrix::hstack(f, self.ambient, &[&current, &col]);
                    if trial.rank() > rank {
                        rank += 1;
                        current = trial;
                        chosen.push(j);
                    }
                }
                self.subspaces[a].select_columns(&chosen)
            })
            .collect();
        MatrixRep::new(self.poset.clone(), f.clone(), self.ambient, blocks).expect("shapes agree")
    }

    /// The representation carried by `V(0) = Im B` for a matrix `B` with
    /// independent columns whose image is a direct summand compatible with
    /// every `V(a)` (for instance the image of an idempotent endomorphism).
    /// `proj` must map `V(0)` onto `Im B` and fix it.
    pub fn summand(&self, basis: &ExactMatrix<F>, proj: &ExactMatrix<F>) -> Self {
        let spans = self
            .subspaces
            .iter()
            .map(|s| {
                basis
                    .solve(&proj.mul(s))
                    .expect("projection lands in the summand")
            })
            .collect();
        SubspaceRep::new(self.poset.clone(), self.field.clone(), basis.cols(), spans)
            .expect("summand of a representation is a representation")
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.poset != other.poset || self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let spans = self
            .subspaces
            .iter()
            .zip(&other.subspaces)
            .map(|(a, b)| a.block_diag(b))
            .collect();
        Self::new(
            self.poset.clone(),
            self.field.clone(),
            self.ambient + other.ambient,
            spans,
        )
    }

    /// Applies an invertible change of coordinates `g` to `V(0)`.
    pub fn transform(&self, g: &ExactMatrix<F>) -> Self {
        let spans = self.subspaces.iter().map(|s| g.mul(s)).collect();
        SubspaceRep::new(self.poset.clone(), self.field.clone(), self.ambient, spans)
            .expect("image of a representation under an automorphism")
    }
}

/// The subspace representation of a block matrix: `V(a)` is the column span
/// of the blocks `M(b)`, `b ⪯ a`.
pub fn rho<F: Field>(u: &MatrixRep<F>) -> SubspaceRep<F> {
    let spans = (0..u.poset().len()).map(|a| u.stacked(a)).collect();
    SubspaceRep::new(u.poset_arc().clone(), u.field().clone(), u.d0(), spans)
        .expect("column spans of stacked blocks are order preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn three_lines() -> MatrixRep<Fp> {
        let f = Fp::new(2).unwrap();
        let p = Arc::new(Poset::antichain(3));
        let blocks = vec![
            ExactMatrix::from_i64(&f, &[&[1], &[0]]),
            ExactMatrix::from_i64(&f, &[&[0], &[1]]),
            ExactMatrix::from_i64(&f, &[&[1], &[1]]),
        ];
        MatrixRep::new(p, f, 2, blocks).unwrap()
    }

    #[test]
    fn rho_of_three_lines() {
        let v = rho(&three_lines());
        assert_eq!(v.subspace(2).column(0), vec![1, 1]);
        assert_eq!(v.dimension(), DimensionVector::new(2, vec![1, 1, 1]));
    }

    #[test]
    fn rho_of_trivial_is_zero() {
        let f = Fp::new(2).unwrap();
        let p = Arc::new(Poset::antichain(2));
        let v = rho(&MatrixRep::special_t(p, f, 0));
        assert_eq!(v.ambient(), 0);
        assert_eq!(v.dimension(), DimensionVector::zero(2));
    }

    #[test]
    fn lift_on_chain_with_equal_lines() {
        let f = Fp::new(3).unwrap();
        let p = Arc::new(Poset::chain(2));
        let line = ExactMatrix::from_i64(&f, &[&[1], &[2]]);
        let v = SubspaceRep::new(p, f, 2, vec![line.clone(), line]).unwrap();
        let u = v.lift();
        assert_eq!(u.widths(), vec![1, 0]);
        assert_eq!(rho(&u), v);
    }

    #[test]
    fn rejects_non_monotone_families() {
        let f = Fp::new(2).unwrap();
        let p = Arc::new(Poset::chain(2));
        let e1 = ExactMatrix::from_i64(&f, &[&[1], &[0]]);
        let e2 = ExactMatrix::from_i64(&f, &[&[0], &[1]]);
        assert!(SubspaceRep::new(p, f, 2, vec![e1, e2]).is_err());
    }
}
