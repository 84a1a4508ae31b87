//! Endomorphism algebras, indecomposability, Krull–Schmidt decomposition and
//! isomorphism testing.
//!
//! Everything is decided on the subspace side, where `End V ⊆ End V(0)`.
//! Block matrices are handled by splitting off their trivial summands first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::ExactMatrix;
use crate::rep::hom::{rep_hom_basis, ElMorphism};
use crate::rep::matrix_rep::{offsets, MatrixRep};
use crate::rep::subspace::{rho, SubspaceRep};

/// Above this many algebra elements the exhaustive idempotent search is
/// refused.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

const RANDOM_TRIALS: usize = 64;

/// The outcome of analysing an endomorphism algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndStructure<F: Field> {
    /// The algebra is local; the representation is indecomposable.
    Local,
    /// A nontrivial idempotent endomorphism.
    Split(ExactMatrix<F>),
}

fn flatten<F: Field>(ms: &[ExactMatrix<F>]) -> ExactMatrix<F> {
    let f = ms[0].field();
    let n = ms[0].data().len();
    let cols: Vec<Vec<F::Elem>> = ms.iter().map(|m| m.data().to_vec()).collect();
    ExactMatrix::from_columns(f, n, &cols)
}

fn is_nilpotent<F: Field>(x: &ExactMatrix<F>) -> bool {
    x.pow(x.rows() as u32).is_zero()
}

/// The Fitting idempotent of `y`: projection onto `Im yⁿ` along `Ker yⁿ`,
/// when both are nonzero.
fn fitting_idempotent<F: Field>(y: &ExactMatrix<F>) -> Option<ExactMatrix<F>> {
    let n = y.rows();
    let yn = y.pow(n as u32);
    let im = yn.column_basis();
    let r = im.cols();
    if r == 0 || r == n {
        return None;
    }
    let f = y.field();
    let ker = yn.nullspace_matrix();
    let p = ExactMatrix::hstack(f, n, &[&im, &ker]);
    let mut d = ExactMatrix::zeros(f, n, n);
    for i in 0..r {
        d.set(i, i, f.one());
    }
    Some(
        p.mul(&d)
            .mul(&p.inverse().expect("Fitting decomposition is direct")),
    )
}

fn shifts<F: Field>(f: &F, y: &ExactMatrix<F>) -> Vec<F::Elem> {
    match f.elements() {
        Some(all) if all.len() <= 16 => all,
        _ => {
            let mut v: Vec<F::Elem> = (-2..=2).map(|k| f.from_i64(k)).collect();
            if let Some(inv_n) = f.inv(&f.from_i64(y.rows() as i64)) {
                v.push(f.mul(&y.trace(), &inv_n));
            }
            v
        }
    }
}

fn random_combination<F: Field>(
    f: &F,
    basis: &[ExactMatrix<F>],
    rng: &mut ChaCha8Rng,
) -> ExactMatrix<F> {
    let n = basis[0].rows();
    let mut acc = ExactMatrix::zeros(f, n, n);
    for b in basis {
        let c = match f.order() {
            Some(q) => f.from_i64(rng.gen_range(0..q) as i64),
            None => f.from_i64(rng.gen_range(-3..=3)),
        };
        acc = acc.add(&b.scale(&c));
    }
    acc
}

/// Tries to certify that the algebra spanned by `basis` (which contains the
/// identity) is local with residue field `F`: every basis element is a
/// scalar plus a nilpotent, and the nilpotent parts span a nilpotent
/// subalgebra of codimension one.
fn certify_split_local<F: Field>(f: &F, basis: &[ExactMatrix<F>]) -> bool {
    let n = basis[0].rows();
    let id = ExactMatrix::identity(f, n);
    let mut radical = Vec::new();
    for b in basis {
        let candidates: Vec<F::Elem> = match f.inv(&f.from_i64(n as i64)) {
            Some(inv_n) => vec![f.mul(&b.trace(), &inv_n)],
            None => f.elements().unwrap_or_default(),
        };
        let Some(x) = candidates
            .into_iter()
            .map(|l| b.sub(&id.scale(&l)))
            .find(|x| is_nilpotent(x))
        else {
            return false;
        };
        radical.push(x);
    }
    let jmat = flatten(&radical).column_basis();
    if jmat.cols() + 1 != basis.len() {
        return false;
    }
    let j: Vec<ExactMatrix<F>> = jmat
        .columns()
        .into_iter()
        .map(|c| ExactMatrix::new(f.clone(), n, n, c).expect("sized"))
        .collect();
    if j.is_empty() {
        return true;
    }
    // Closed under products.
    let products: Vec<ExactMatrix<F>> = j
        .iter()
        .flat_map(|x| j.iter().map(move |y| x.mul(y)))
        .collect();
    if !jmat.column_space_contains_all(&flatten(&products)) {
        return false;
    }
    // Nilpotent as an algebra: Jᵏ shrinks to zero.
    let mut power = j.clone();
    for _ in 0..=n {
        let next: Vec<ExactMatrix<F>> = power
            .iter()
            .flat_map(|x| j.iter().map(move |y| x.mul(y)))
            .filter(|m| !m.is_zero())
            .collect();
        if next.is_empty() {
            return true;
        }
        let b = flatten(&next).column_basis();
        if b.cols() >= flatten(&power).column_basis().cols() {
            return false;
        }
        power = b
            .columns()
            .into_iter()
            .map(|c| ExactMatrix::new(f.clone(), n, n, c).expect("sized"))
            .collect();
    }
    false
}

/// Decides whether the algebra spanned by `basis` (square matrices, identity
/// in the span) is local, or returns a nontrivial idempotent.
pub fn analyse_algebra<F: Field>(f: &F, basis: &[ExactMatrix<F>]) -> Result<EndStructure<F>> {
    let m = basis.len();
    if m <= 1 {
        return Ok(EndStructure::Local);
    }
    let n = basis[0].rows();
    let id = ExactMatrix::identity(f, n);
    let try_split = |y: &ExactMatrix<F>| -> Option<ExactMatrix<F>> {
        for l in shifts(f, y) {
            if let Some(e) = fitting_idempotent(&y.sub(&id.scale(&l))) {
                return Some(e);
            }
        }
        None
    };
    for b in basis {
        if let Some(e) = try_split(b) {
            return Ok(EndStructure::Split(e));
        }
    }
    if certify_split_local(f, basis) {
        return Ok(EndStructure::Local);
    }
    for i in 0..m {
        for k in i + 1..m {
            for y in [basis[i].add(&basis[k]), basis[i].mul(&basis[k])] {
                if let Some(e) = try_split(&y) {
                    return Ok(EndStructure::Split(e));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1dea);
    for _ in 0..RANDOM_TRIALS {
        if let Some(e) = try_split(&random_combination(f, basis, &mut rng)) {
            return Ok(EndStructure::Split(e));
        }
    }
    exhaustive_idempotent(f, basis)
}

fn exhaustive_idempotent<F: Field>(f: &F, basis: &[ExactMatrix<F>]) -> Result<EndStructure<F>> {
    let m = basis.len();
    let Some(elems) = f.elements() else {
        return Err(Error::UndecidableAtBudget { dim: m });
    };
    let q = elems.len() as u128;
    if q.checked_pow(m as u32).is_none_or(|c| c > EXHAUSTIVE_LIMIT) {
        return Err(Error::UndecidableAtBudget { dim: m });
    }
    let n = basis[0].rows();
    let id = ExactMatrix::identity(f, n);
    let mut digits = vec![0usize; m];
    loop {
        let mut x = ExactMatrix::zeros(f, n, n);
        for (b, &d) in basis.iter().zip(&digits) {
            if d != 0 {
                x = x.add(&b.scale(&elems[d]));
            }
        }
        if !x.is_zero() && x != id && x.mul(&x) == x {
            return Ok(EndStructure::Split(x));
        }
        let mut k = 0;
        while k < m {
            digits[k] += 1;
            if digits[k] < elems.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == m {
            return Ok(EndStructure::Local);
        }
    }
}

pub fn end_structure<F: Field>(v: &SubspaceRep<F>) -> Result<EndStructure<F>> {
    let basis = rep_hom_basis(v, v)?;
    analyse_algebra(v.field(), &basis)
}

/// Nonzero with local endomorphism algebra.
pub fn is_indecomposable_rep<F: Field>(v: &SubspaceRep<F>) -> Result<bool> {
    if v.ambient() == 0 {
        return Ok(false);
    }
    Ok(matches!(end_structure(v)?, EndStructure::Local))
}

/// Indecomposable, `V(a) ≠ V(0)` and `V(a) ≠ Σ_{b≺a} V(b)` for every `a`.
pub fn is_quite_sincere<F: Field>(v: &SubspaceRep<F>) -> Result<bool> {
    let n = v.ambient();
    for a in 0..v.poset().len() {
        if v.subspace(a).cols() == n || v.subspace(a).cols() == v.lower_sum(a).cols() {
            return Ok(false);
        }
    }
    is_indecomposable_rep(v)
}

/// Indecomposable summands of a subspace representation, each with the
/// embedding of its ambient space into `V(0)`. The embeddings side by side
/// form an invertible matrix.
#[derive(Debug, Clone)]
pub struct RepDecomposition<F: Field> {
    pub summands: Vec<SubspaceRep<F>>,
    pub embeddings: Vec<ExactMatrix<F>>,
}

pub fn decompose_rep<F: Field>(v: &SubspaceRep<F>) -> Result<RepDecomposition<F>> {
    let mut out = RepDecomposition {
        summands: Vec::new(),
        embeddings: Vec::new(),
    };
    let id = ExactMatrix::identity(v.field(), v.ambient());
    split_into(v, &id, &mut out)?;
    Ok(out)
}

fn split_into<F: Field>(
    v: &SubspaceRep<F>,
    embed: &ExactMatrix<F>,
    out: &mut RepDecomposition<F>,
) -> Result<()> {
    if v.ambient() == 0 {
        return Ok(());
    }
    match end_structure(v)? {
        EndStructure::Local => {
            out.summands.push(v.clone());
            out.embeddings.push(embed.clone());
        }
        EndStructure::Split(e) => {
            let id = ExactMatrix::identity(v.field(), v.ambient());
            let comp = id.sub(&e);
            for proj in [e, comp] {
                let basis = proj.column_basis();
                let part = v.summand(&basis, &proj);
                split_into(&part, &embed.mul(&basis), out)?;
            }
        }
    }
    Ok(())
}

/// An isomorphism between indecomposable representations, found as a basis
/// element `f` of `Hom(X, Y)` with `g∘f` invertible for some basis element
/// `g` of `Hom(Y, X)`. Since non-invertible endomorphisms of `X` form a
/// subspace, checking basis pairs is exhaustive.
pub fn indecomposable_isomorphism<F: Field>(
    x: &SubspaceRep<F>,
    y: &SubspaceRep<F>,
) -> Result<Option<ExactMatrix<F>>> {
    if x.dimension() != y.dimension() {
        return Ok(None);
    }
    let xy = rep_hom_basis(x, y)?;
    let yx = rep_hom_basis(y, x)?;
    for f in &xy {
        if yx.iter().any(|g| g.mul(f).is_invertible()) {
            return Ok(Some(f.clone()));
        }
    }
    Ok(None)
}

/// An isomorphism `V(0) → W(0)` of representations, if one exists.
pub fn rep_isomorphism<F: Field>(
    v: &SubspaceRep<F>,
    w: &SubspaceRep<F>,
) -> Result<Option<ExactMatrix<F>>> {
    if v.field() != w.field() || v.poset() != w.poset() {
        return Err(Error::FieldMismatch);
    }
    if v.dimension() != w.dimension() {
        return Ok(None);
    }
    if v == w {
        return Ok(Some(ExactMatrix::identity(v.field(), v.ambient())));
    }
    let dv = decompose_rep(v)?;
    let dw = decompose_rep(w)?;
    if dv.summands.len() != dw.summands.len() {
        return Ok(None);
    }
    let mut used = vec![false; dw.summands.len()];
    let mut pairing = Vec::with_capacity(dv.summands.len());
    for x in &dv.summands {
        let mut hit = None;
        for (l, y) in dw.summands.iter().enumerate() {
            if used[l] {
                continue;
            }
            if let Some(f) = indecomposable_isomorphism(x, y)? {
                hit = Some((l, f));
                break;
            }
        }
        let Some((l, f)) = hit else {
            return Ok(None);
        };
        used[l] = true;
        pairing.push((l, f));
    }
    let field = v.field();
    let n = v.ambient();
    let pv = ExactMatrix::hstack(field, n, &dv.embeddings.iter().collect::<Vec<_>>());
    let pw = ExactMatrix::hstack(field, n, &dw.embeddings.iter().collect::<Vec<_>>());
    let vo = offsets(&dv.summands.iter().map(|s| s.ambient()).collect::<Vec<_>>());
    let wo = offsets(&dw.summands.iter().map(|s| s.ambient()).collect::<Vec<_>>());
    let mut mid = ExactMatrix::zeros(field, n, n);
    for (k, (l, f)) in pairing.iter().enumerate() {
        mid.paste(wo[*l], vo[k], f);
    }
    let iso = pw
        .mul(&mid)
        .mul(&pv.inverse().expect("summand embeddings form a basis"));
    Ok(Some(iso))
}

/// Krull–Schmidt decomposition of a block matrix: the trivial summands as
/// multiplicities `m_a` of `T_a`, and the remaining indecomposables.
#[derive(Debug, Clone)]
pub struct Decomposition<F: Field> {
    pub summands: Vec<MatrixRep<F>>,
    pub trivial: Vec<usize>,
}

impl<F: Field> Decomposition<F> {
    /// The trivial summands as elements `T_a`, with repetition.
    pub fn trivial_summands(&self, like: &MatrixRep<F>) -> Vec<MatrixRep<F>> {
        let mut out = Vec::new();
        for (a, &m) in self.trivial.iter().enumerate() {
            for _ in 0..m {
                out.push(MatrixRep::special_t(
                    like.poset_arc().clone(),
                    like.field().clone(),
                    a,
                ));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.summands.len() + self.trivial.iter().sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn decompose<F: Field>(u: &MatrixRep<F>) -> Result<Decomposition<F>> {
    let trivial = u.trivial_multiplicities();
    let summands = decompose_rep(&rho(u))?
        .summands
        .iter()
        .map(|s| s.lift())
        .collect();
    Ok(Decomposition { summands, trivial })
}

pub fn is_indecomposable<F: Field>(u: &MatrixRep<F>) -> Result<bool> {
    let trivial: usize = u.trivial_multiplicities().iter().sum();
    if u.d0() == 0 {
        return Ok(trivial == 1);
    }
    if trivial > 0 {
        return Ok(false);
    }
    is_indecomposable_rep(&rho(u))
}

/// An invertible morphism `u → v`, if the elements are isomorphic.
pub fn are_isomorphic<F: Field>(
    u: &MatrixRep<F>,
    v: &MatrixRep<F>,
) -> Result<Option<ElMorphism<F>>> {
    if u.field() != v.field() || u.poset() != v.poset() {
        return Err(Error::FieldMismatch);
    }
    if u.dimension() != v.dimension() {
        return Ok(None);
    }
    if u == v {
        return Ok(Some(ElMorphism::identity(u)));
    }
    let (xu, ru, ranks_u) = u.column_reduction();
    let (xv, rv, ranks_v) = v.column_reduction();
    if ranks_u != ranks_v {
        return Ok(None);
    }
    let Some(f) = rep_isomorphism(&rho(u), &rho(v))? else {
        return Ok(None);
    };
    let field = u.field();
    let p = u.poset();
    let widths = u.widths();
    let offs = offsets(&widths);
    let total = u.total_columns();
    let mut phi_red = ExactMatrix::zeros(field, total, total);
    for a in 0..p.len() {
        let r = ranks_u[a];
        let cone = p.lower_cone(a);
        let parts: Vec<ExactMatrix<F>> = cone
            .iter()
            .map(|&b| {
                rv.block(b)
                    .select_columns(&(0..ranks_v[b]).collect::<Vec<_>>())
            })
            .collect();
        let target = ExactMatrix::hstack(field, v.d0(), &parts.iter().collect::<Vec<_>>());
        let image = f.mul(&ru.block(a).select_columns(&(0..r).collect::<Vec<_>>()));
        let y = target
            .solve(&image)
            .expect("isomorphism maps V(a) into W(a)");
        let mut row = 0;
        for &b in &cone {
            phi_red.paste(offs[b], offs[a], &y.submatrix(row, ranks_v[b], 0, r));
            row += ranks_v[b];
        }
        for k in r..widths[a] {
            phi_red.set(offs[a] + k, offs[a] + k, field.one());
        }
    }
    let phi1 = xv
        .mul(&phi_red)
        .mul(&xu.inverse().expect("reduction is invertible"));
    let phi = ElMorphism::new(f, phi1, widths.clone(), widths);
    debug_assert!(phi.is_morphism(u, v) && phi.is_invertible());
    Ok(Some(phi))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::{Fp, Rationals};
    use crate::poset::Poset;

    fn three_lines<F: Field>(f: &F, order: [usize; 3]) -> MatrixRep<F> {
        let p = Arc::new(Poset::antichain(3));
        let cols = [
            ExactMatrix::from_i64(f, &[&[1], &[0]]),
            ExactMatrix::from_i64(f, &[&[0], &[1]]),
            ExactMatrix::from_i64(f, &[&[1], &[1]]),
        ];
        let blocks = order.iter().map(|&i| cols[i].clone()).collect();
        MatrixRep::new(p, f.clone(), 2, blocks).unwrap()
    }

    #[test]
    fn three_lines_is_indecomposable() {
        let f = Fp::new(2).unwrap();
        assert!(is_indecomposable(&three_lines(&f, [0, 1, 2])).unwrap());
        assert!(is_indecomposable(&three_lines(&Rationals, [0, 1, 2])).unwrap());
    }

    #[test]
    fn swapped_lines_are_isomorphic() {
        let f = Fp::new(3).unwrap();
        let u = three_lines(&f, [0, 1, 2]);
        let v = three_lines(&f, [1, 0, 2]);
        let phi = are_isomorphic(&u, &v).unwrap().unwrap();
        assert!(phi.is_morphism(&u, &v));
        assert!(phi.is_invertible());
    }

    #[test]
    fn sum_of_lines_splits() {
        let f = Fp::new(2).unwrap();
        let p = Arc::new(Poset::antichain(2));
        let ex = MatrixRep::special_e(p.clone(), f, 0);
        let ey = MatrixRep::special_e(p.clone(), f, 1);
        let s = ex.direct_sum(&ey).unwrap();
        assert!(!is_indecomposable(&s).unwrap());
        assert!(matches!(
            end_structure(&rho(&s)).unwrap(),
            EndStructure::Split(_)
        ));
        let d = decompose(&ex.direct_sum(&ex).unwrap()).unwrap();
        assert_eq!(d.summands.len(), 2);
        for x in &d.summands {
            assert!(are_isomorphic(x, &ex).unwrap().is_some());
        }
        assert!(are_isomorphic(&ex, &ey).unwrap().is_none());
    }

    #[test]
    fn trivial_summands_are_separated() {
        let f = Fp::new(2).unwrap();
        let p = Arc::new(Poset::antichain(2));
        let t = MatrixRep::special_t(p.clone(), f, 0);
        let e = MatrixRep::special_e(p, f, 1);
        let d = decompose(&t.direct_sum(&e).unwrap()).unwrap();
        assert_eq!(d.trivial, vec![1, 0]);
        assert_eq!(d.summands.len(), 1);
        assert!(is_indecomposable(&t).unwrap());
    }

    #[test]
    fn non_split_local_algebra_is_found_local() {
        // GF(4) inside M_2(GF(2)): the companion matrix of x² + x + 1 and
        // the identity span a field, so no idempotent exists.
        let f = Fp::new(2).unwrap();
        let c = ExactMatrix::from_i64(&f, &[&[0, 1], &[1, 1]]);
        let basis = vec![ExactMatrix::identity(&f, 2), c];
        assert_eq!(analyse_algebra(&f, &basis).unwrap(), EndStructure::Local);
    }
}
