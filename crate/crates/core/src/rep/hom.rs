use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::ExactMatrix;
use crate::rep::matrix_rep::{offsets, MatrixRep};
use crate::rep::subspace::SubspaceRep;

/// A morphism `u → u'` of block matrices: `Φ(0)` on rows and an
/// incidence-shaped `Φ1` on columns with `Φ(0)·M = M'·Φ1`. The block of `Φ1`
/// in row block `b` and column block `a` is `Φ(a)` for `b = a`, `Φ(ba)` for
/// `b ≺ a`, and zero otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElMorphism<F: Field> {
    pub phi0: ExactMatrix<F>,
    pub phi1: ExactMatrix<F>,
    source_widths: Vec<usize>,
    target_widths: Vec<usize>,
}

impl<F: Field> ElMorphism<F> {
    pub fn new(
        phi0: ExactMatrix<F>,
        phi1: ExactMatrix<F>,
        source_widths: Vec<usize>,
        target_widths: Vec<usize>,
    ) -> Self {
        ElMorphism {
            phi0,
            phi1,
            source_widths,
            target_widths,
        }
    }

    pub fn identity(u: &MatrixRep<F>) -> Self {
        let f = u.field();
        ElMorphism {
            phi0: ExactMatrix::identity(f, u.d0()),
            phi1: ExactMatrix::identity(f, u.total_columns()),
            source_widths: u.widths(),
            target_widths: u.widths(),
        }
    }

    /// `Φ(a)`.
    pub fn phi_diag(&self, a: usize) -> ExactMatrix<F> {
        self.phi_block(a, a)
    }

    /// `Φ(ba)`, the component from column block `a` of the source to column
    /// block `b` of the target.
    pub fn phi_tri(&self, b: usize, a: usize) -> ExactMatrix<F> {
        self.phi_block(b, a)
    }

    fn phi_block(&self, b: usize, a: usize) -> ExactMatrix<F> {
        let so = offsets(&self.source_widths);
        let to = offsets(&self.target_widths);
        self.phi1
            .submatrix(to[b], self.target_widths[b], so[a], self.source_widths[a])
    }

    /// `Ψ ∘ Φ` for `Φ: u → u'` (self) and `Ψ: u' → u''`.
    pub fn then(&self, psi: &Self) -> Self {
        ElMorphism {
            phi0: psi.phi0.mul(&self.phi0),
            phi1: psi.phi1.mul(&self.phi1),
            source_widths: self.source_widths.clone(),
            target_widths: psi.target_widths.clone(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.phi0.is_invertible() && self.phi1.is_invertible()
    }

    /// Checks the defining equation and the incidence shape against `u, u'`.
    pub fn is_morphism(&self, u: &MatrixRep<F>, v: &MatrixRep<F>) -> bool {
        if self.phi0.rows() != v.d0() || self.phi0.cols() != u.d0() {
            return false;
        }
        if self.phi1.rows() != v.total_columns() || self.phi1.cols() != u.total_columns() {
            return false;
        }
        let p = u.poset();
        for b in 0..p.len() {
            for a in 0..p.len() {
                if !p.le(b, a) && !self.phi_block(b, a).is_zero() {
                    return false;
                }
            }
        }
        self.phi0.mul(&u.full_matrix()) == v.full_matrix().mul(&self.phi1)
    }
}

fn check_compatible<F: Field>(u: &MatrixRep<F>, v: &MatrixRep<F>) -> Result<()> {
    if u.field() != v.field() || u.poset() != v.poset() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Positions `(row, col)` of `Φ1` that the incidence shape leaves free.
fn phi1_positions<F: Field>(u: &MatrixRep<F>, v: &MatrixRep<F>) -> Vec<(usize, usize)> {
    let p = u.poset();
    let (uw, vw) = (u.widths(), v.widths());
    let (uo, vo) = (offsets(&uw), offsets(&vw));
    let mut pos = Vec::new();
    for a in 0..p.len() {
        for b in p.lower_cone(a) {
            for i in 0..vw[b] {
                for j in 0..uw[a] {
                    pos.push((vo[b] + i, uo[a] + j));
                }
            }
        }
    }
    pos
}

/// A basis of all morphisms `u → v`, from the null space of the linear
/// system `Φ(0)·M − M'·Φ1 = 0`.
pub fn el_hom_basis<F: Field>(u: &MatrixRep<F>, v: &MatrixRep<F>) -> Result<Vec<ElMorphism<F>>> {
    check_compatible(u, v)?;
    let f = u.field();
    let (m, mp) = (u.full_matrix(), v.full_matrix());
    let (d0, e0) = (u.d0(), v.d0());
    let (cu, cv) = (u.total_columns(), v.total_columns());
    let pos = phi1_positions(u, v);
    let n0 = e0 * d0;
    let unknowns = n0 + pos.len();
    // One equation per entry (i, j) of the e0 × cu product.
    let mut sys = ExactMatrix::zeros(f, e0 * cu, unknowns);
    for i in 0..e0 {
        for j in 0..cu {
            let row = i * cu + j;
            // (Φ0 M)_{ij} = Σ_k Φ0_{ik} M_{kj}
            for k in 0..d0 {
                sys.set(row, i * d0 + k, m.get(k, j).clone());
            }
        }
    }
    for (idx, &(r, c)) in pos.iter().enumerate() {
        // (M' Φ1)_{i c} gets M'_{i r} · Φ1_{r c}
        for i in 0..e0 {
            let row = i * cu + c;
            let cur = sys.get(row, n0 + idx).clone();
            sys.set(row, n0 + idx, f.sub(&cur, mp.get(i, r)));
        }
    }
    let widths_u = u.widths();
    let widths_v = v.widths();
    Ok(sys
        .nullspace_basis()
        .into_iter()
        .map(|x| {
            let phi0 = ExactMatrix::new(f.clone(), e0, d0, x[..n0].to_vec()).expect("sized");
            let mut phi1 = ExactMatrix::zeros(f, cv, cu);
            for (idx, &(r, c)) in pos.iter().enumerate() {
                phi1.set(r, c, x[n0 + idx].clone());
            }
            ElMorphism::new(phi0, phi1, widths_u.clone(), widths_v.clone())
        })
        .collect())
}

/// Dimension of the El-level endomorphism space of `u`.
pub fn el_end_dimension<F: Field>(u: &MatrixRep<F>) -> usize {
    el_hom_basis(u, u).expect("same element").len()
}

/// A basis of the maps `f: V(0) → W(0)` with `f·V(a) ⊆ W(a)` for all `a`.
pub fn rep_hom_basis<F: Field>(
    v: &SubspaceRep<F>,
    w: &SubspaceRep<F>,
) -> Result<Vec<ExactMatrix<F>>> {
    if v.field() != w.field() || v.poset() != w.poset() {
        return Err(Error::FieldMismatch);
    }
    let f = v.field();
    let (n, m) = (v.ambient(), w.ambient());
    let unknowns = m * n;
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for a in 0..v.poset().len() {
        // A f B = 0 with A cutting out W(a) and B spanning V(a).
        let ann = w.subspace(a).left_annihilator();
        let b = v.subspace(a);
        for i in 0..ann.rows() {
            for j in 0..b.cols() {
                let mut row = vec![f.zero(); unknowns];
                for k in 0..m {
                    let aik = ann.get(i, k);
                    if f.is_zero(aik) {
                        continue;
                    }
                    for l in 0..n {
                        row[k * n + l] = f.mul(aik, b.get(l, j));
                    }
                }
                rows.push(row);
            }
        }
    }
    let sys = ExactMatrix::from_rows(f, unknowns, rows)?;
    Ok(sys
        .nullspace_basis()
        .into_iter()
        .map(|x| ExactMatrix::new(f.clone(), m, n, x).expect("sized"))
        .collect())
}

pub fn rep_end_dimension<F: Field>(v: &SubspaceRep<F>) -> usize {
    rep_hom_basis(v, v).expect("same representation").len()
}

/// True iff `f` maps every `V(a)` into `W(a)`.
pub fn is_rep_morphism<F: Field>(
    v: &SubspaceRep<F>,
    w: &SubspaceRep<F>,
    f: &ExactMatrix<F>,
) -> bool {
    f.rows() == w.ambient()
        && f.cols() == v.ambient()
        && (0..v.poset().len()).all(|a| {
            w.subspace(a)
                .column_space_contains_all(&f.mul(v.subspace(a)))
        })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::Fp;
    use crate::poset::Poset;
    use crate::rep::subspace::rho;

    fn gf2() -> Fp {
        Fp::new(2).unwrap()
    }

    #[test]
    fn hom_trivial_to_itself_is_one_dimensional() {
        let p = Arc::new(Poset::antichain(2));
        let t = MatrixRep::special_t(p, gf2(), 0);
        assert_eq!(el_end_dimension(&t), 1);
    }

    #[test]
    fn hom_between_different_lines_kills_phi0() {
        let p = Arc::new(Poset::antichain(2));
        let ex = MatrixRep::special_e(p.clone(), gf2(), 0);
        let ey = MatrixRep::special_e(p, gf2(), 1);
        for h in el_hom_basis(&ex, &ey).unwrap() {
            assert!(h.phi0.is_zero());
            assert!(h.is_morphism(&ex, &ey));
        }
    }

    #[test]
    fn end_of_double_is_matrix_algebra() {
        let p = Arc::new(Poset::antichain(1));
        let e = MatrixRep::special_e(p, gf2(), 0);
        let ee = e.direct_sum(&e).unwrap();
        assert_eq!(rep_end_dimension(&rho(&e)), 1);
        assert_eq!(rep_end_dimension(&rho(&ee)), 4);
        assert_eq!(el_end_dimension(&ee), 4 * el_end_dimension(&e));
    }

    #[test]
    fn rep_hom_to_zero_is_zero() {
        let p = Arc::new(Poset::antichain(2));
        let v = rho(&MatrixRep::special_e(p.clone(), gf2(), 0));
        let z = SubspaceRep::zero(p, gf2());
        assert!(rep_hom_basis(&v, &z).unwrap().is_empty());
    }
}
