//! The derivative `S^a` of a poset at a maximal element, the derived
//! representation `D_a V`, matrix-level integration `∫_a` and the matching
//! dimension bookkeeping.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::ExactMatrix;
use crate::poset::Poset;
use crate::rep::{MatrixRep, SubspaceRep};
use crate::tits::DimensionVector;

/// Where an element of `S^a` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Element(usize),
    /// Index into [`DerivedPoset::pairs`].
    Pair(usize),
}

/// A pair `{p', p''}` of incomparable elements of `Θ(a)`, stored marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkedPair {
    pub first: usize,
    pub second: usize,
}

impl MarkedPair {
    pub fn contains(&self, b: usize) -> bool {
        self.first == b || self.second == b
    }
}

/// How `D_a V(p)` is formed from `V(p')` and `V(p'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairReading {
    /// `(V(p') + V(p'')) ∩ V(a)`.
    #[default]
    Sum,
    /// `(V(p') ∩ V(p'')) ∩ V(a)`; usually not order preserving.
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedPoset {
    base: Arc<Poset>,
    pivot: usize,
    pairs: Vec<MarkedPair>,
    result: Arc<Poset>,
    provenance: Vec<Provenance>,
}

/// Elements of `S` as subsets: the lower-set relation `B ⪯ C` iff every
/// `b ∈ B` lies below some `c ∈ C`.
fn dominated(p: &Poset, b: &[usize], c: &[usize]) -> bool {
    b.iter().all(|&x| c.iter().any(|&y| p.le(x, y)))
}

pub fn derive_poset(base: Arc<Poset>, pivot: usize) -> Result<DerivedPoset> {
    if pivot >= base.len() {
        return Err(Error::UnknownElement(format!("#{pivot}")));
    }
    if !base.is_maximal(pivot) {
        return Err(Error::NotMaximal(base.label(pivot).to_string()));
    }
    let theta = base.incomparables(pivot);
    let mut pairs = Vec::new();
    for (i, &b) in theta.iter().enumerate() {
        for &c in &theta[i + 1..] {
            if base.comparable(b, c) {
                continue;
            }
            // b < c by index; the maximal member goes second when exactly
            // one member is maximal.
            let pair = if base.is_maximal(b) && !base.is_maximal(c) {
                MarkedPair {
                    first: c,
                    second: b,
                }
            } else {
                MarkedPair {
                    first: b,
                    second: c,
                }
            };
            pairs.push(pair);
        }
    }
    DerivedPoset::from_parts(base, pivot, pairs)
}

impl DerivedPoset {
    /// Rebuilds a derived poset from an explicit marked pair list, which must
    /// be exactly the incomparable pairs of `Θ(pivot)`.
    pub fn from_parts(base: Arc<Poset>, pivot: usize, pairs: Vec<MarkedPair>) -> Result<Self> {
        if !base.is_maximal(pivot) {
            return Err(Error::NotMaximal(base.label(pivot).to_string()));
        }
        let theta: HashSet<usize> = base.incomparables(pivot).into_iter().collect();
        let mut seen = HashSet::new();
        for p in &pairs {
            let key = (p.first.min(p.second), p.first.max(p.second));
            if !theta.contains(&p.first)
                || !theta.contains(&p.second)
                || base.comparable(p.first, p.second)
                || !seen.insert(key)
            {
                return Err(Error::Invalid(format!(
                    "{{{}, {}}} is not a pair of incomparable elements of Θ({})",
                    base.label(p.first),
                    base.label(p.second),
                    base.label(pivot)
                )));
            }
        }
        let expected: usize = {
            let t: Vec<usize> = theta.iter().copied().collect();
            let mut n = 0;
            for (i, &x) in t.iter().enumerate() {
                n += t[i + 1..]
                    .iter()
                    .filter(|&&y| !base.comparable(x, y))
                    .count();
            }
            n
        };
        if pairs.len() != expected {
            return Err(Error::Invalid(
                "pair list does not cover all incomparable pairs".into(),
            ));
        }

        let mut provenance = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut labels = Vec::new();
        let mut used: HashSet<String> = HashSet::new();
        for b in 0..base.len() {
            if b != pivot {
                provenance.push(Provenance::Element(b));
                members.push(vec![b]);
                labels.push(base.label(b).to_string());
                used.insert(base.label(b).to_string());
            }
        }
        for (k, p) in pairs.iter().enumerate() {
            provenance.push(Provenance::Pair(k));
            members.push(vec![p.first, p.second]);
            let mut label = format!("{{{},{}}}", base.label(p.first), base.label(p.second));
            while used.contains(&label) {
                label.push('\'');
            }
            used.insert(label.clone());
            labels.push(label);
        }
        let mut rels = Vec::new();
        for i in 0..members.len() {
            for j in 0..members.len() {
                if i != j && dominated(&base, &members[i], &members[j]) {
                    rels.push((i, j));
                }
            }
        }
        let result = Arc::new(Poset::from_index_relations(labels, &rels)?);
        Ok(DerivedPoset {
            base,
            pivot,
            pairs,
            result,
            provenance,
        })
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn pairs(&self) -> &[MarkedPair] {
        &self.pairs
    }

    /// The derived poset `S^a`.
    pub fn result(&self) -> &Arc<Poset> {
        &self.result
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Index in `S^a` of an element `b ≠ a` of `S`.
    pub fn element_index(&self, b: usize) -> usize {
        debug_assert_ne!(b, self.pivot);
        if b < self.pivot {
            b
        } else {
            b - 1
        }
    }

    /// Index in `S^a` of the `k`-th pair.
    pub fn pair_index(&self, k: usize) -> usize {
        self.base.len() - 1 + k
    }

    fn theta(&self) -> Vec<usize> {
        self.base.incomparables(self.pivot)
    }

    fn delta_strict(&self) -> Vec<usize> {
        self.base.strict_lower_cone(self.pivot)
    }

    /// The dimension of `∫_a v` for `v` of dimension `dp`, where `da` is the
    /// number of completion columns at the pivot.
    pub fn dstar(&self, dp: &DimensionVector, da: usize) -> Result<DimensionVector> {
        dp.check(&self.result)?;
        let pair_vals: Vec<usize> = (0..self.pairs.len())
            .map(|k| dp.values[self.pair_index(k)])
            .collect();
        let mut values = vec![0; self.base.len()];
        for b in 0..self.base.len() {
            if b == self.pivot {
                values[b] = da;
                continue;
            }
            let mut v = dp.values[self.element_index(b)];
            for (k, p) in self.pairs.iter().enumerate() {
                if p.contains(b) {
                    v += pair_vals[k];
                }
            }
            values[b] = v;
        }
        Ok(DimensionVector::new(
            dp.d0 + pair_vals.iter().sum::<usize>(),
            values,
        ))
    }

    /// All `d'` on `S^a` with `d*(d') = d`, where the pivot value `d(a)` is
    /// the completion count `d'(0) − dim Σ_{b≺a} V'(b)`.
    ///
    /// Besides non-negativity this keeps only vectors that some
    /// representation can realize: every chain of `S^a` has value sum at
    /// most `d'(0)`, and the span below the pivot has a dimension between
    /// the largest chain sum of `Δ'(a)` and `min(d'(0), Σ_{Δ'(a)} d')`.
    pub fn subordinate_dimensions(&self, d: &DimensionVector) -> Result<Vec<DimensionVector>> {
        d.check(&self.base)?;
        let delta = self.delta_strict();
        let mut out = Vec::new();
        let mut vals = vec![0usize; self.pairs.len()];
        self.enumerate_pairs(d, &delta, 0, &mut vals, &mut out);
        Ok(out)
    }

    fn enumerate_pairs(
        &self,
        d: &DimensionVector,
        delta: &[usize],
        k: usize,
        vals: &mut Vec<usize>,
        out: &mut Vec<DimensionVector>,
    ) {
        let used_at = |b: usize, vals: &[usize]| -> usize {
            self.pairs
                .iter()
                .zip(vals)
                .filter(|(p, _)| p.contains(b))
                .map(|(_, v)| v)
                .sum()
        };
        let total: usize = vals.iter().sum();
        if total > d.d0 {
            return;
        }
        if k == self.pairs.len() {
            let mut values = vec![0; self.result.len()];
            for b in 0..self.base.len() {
                if b == self.pivot {
                    continue;
                }
                let used = used_at(b, vals);
                if used > d.values[b] {
                    return;
                }
                values[self.element_index(b)] = d.values[b] - used;
            }
            for (j, &v) in vals.iter().enumerate() {
                values[self.pair_index(j)] = v;
            }
            let cand = DimensionVector::new(d.d0 - total, values);
            if self.realizable(&cand, d.values[self.pivot], delta) {
                out.push(cand);
            }
            return;
        }
        let p = self.pairs[k];
        let room = (d.values[p.first].saturating_sub(used_at(p.first, vals)))
            .min(d.values[p.second].saturating_sub(used_at(p.second, vals)))
            .min(d.d0 - total);
        for v in 0..=room {
            vals[k] = v;
            self.enumerate_pairs(d, delta, k + 1, vals, out);
        }
        vals[k] = 0;
    }

    fn realizable(&self, dp: &DimensionVector, da: usize, delta: &[usize]) -> bool {
        let Some(span) = dp.d0.checked_sub(da) else {
            return false;
        };
        let sum_delta: usize = delta
            .iter()
            .map(|&b| dp.values[self.element_index(b)])
            .sum();
        if span > sum_delta.min(dp.d0) {
            return false;
        }
        let delta_idx: Vec<usize> = delta.iter().map(|&b| self.element_index(b)).collect();
        if max_chain_sum(&self.result, &dp.values, Some(&delta_idx)) > span {
            return false;
        }
        max_chain_sum(&self.result, &dp.values, None) <= dp.d0
    }

    /// `∫_a v` with the deterministic completion at the pivot.
    pub fn integrate<F: Field>(&self, v: &MatrixRep<F>) -> Result<MatrixRep<F>> {
        self.check_context(v)?;
        let below = self.stacked_below(v);
        let completion = below.complete_to_full_rank();
        self.integrate_with(v, &completion)
    }

    fn stacked_below<F: Field>(&self, v: &MatrixRep<F>) -> ExactMatrix<F> {
        let parts: Vec<&ExactMatrix<F>> = self
            .delta_strict()
            .iter()
            .map(|&b| v.block(self.element_index(b)))
            .collect();
        ExactMatrix::hstack(v.field(), v.d0(), &parts)
    }

    fn check_context<F: Field>(&self, v: &MatrixRep<F>) -> Result<()> {
        if v.poset() != self.result.as_ref() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// `∫_a v` with an explicit pivot block `completion`, which must have
    /// independent columns completing the blocks below the pivot to full
    /// row rank.
    pub fn integrate_with<F: Field>(
        &self,
        v: &MatrixRep<F>,
        completion: &ExactMatrix<F>,
    ) -> Result<MatrixRep<F>> {
        self.check_context(v)?;
        let f = v.field();
        let d0 = v.d0();
        let below = self.stacked_below(v);
        if completion.rows() != d0
            || ExactMatrix::hstack(f, d0, &[&below, completion]).rank() != d0
            || completion.rank() != completion.cols()
        {
            return Err(Error::Invalid(
                "pivot block does not complete to full rank".into(),
            ));
        }
        let pair_dims: Vec<usize> = (0..self.pairs.len())
            .map(|k| v.block(self.pair_index(k)).cols())
            .collect();
        let mut pair_rows = Vec::with_capacity(pair_dims.len());
        let mut rows = d0;
        for &w in &pair_dims {
            pair_rows.push(rows);
            rows += w;
        }
        let lift = |m: &ExactMatrix<F>| -> ExactMatrix<F> {
            let mut out = ExactMatrix::zeros(f, rows, m.cols());
            out.paste(0, 0, m);
            out
        };
        let mut blocks = Vec::with_capacity(self.base.len());
        for b in 0..self.base.len() {
            if b == self.pivot {
                blocks.push(lift(completion));
                continue;
            }
            let own = v.block(self.element_index(b));
            let mut parts = vec![lift(own)];
            for (k, p) in self.pairs.iter().enumerate() {
                if !p.contains(b) {
                    continue;
                }
                let w = pair_dims[k];
                let mut col = ExactMatrix::zeros(f, rows, w);
                if p.second == b {
                    col.paste(0, 0, v.block(self.pair_index(k)));
                }
                col.paste(pair_rows[k], 0, &ExactMatrix::identity(f, w));
                parts.push(col);
            }
            blocks.push(ExactMatrix::hstack(
                f,
                rows,
                &parts.iter().collect::<Vec<_>>(),
            ));
        }
        MatrixRep::new(self.base.clone(), f.clone(), rows, blocks)
    }

    /// `D_a V` as a representation of `S^a` on `V(a)`, in the coordinates
    /// of the canonical basis of `V(a)`.
    pub fn differentiate<F: Field>(
        &self,
        v: &SubspaceRep<F>,
        reading: PairReading,
    ) -> Result<SubspaceRep<F>> {
        if v.poset() != self.base.as_ref() {
            return Err(Error::ContextMismatch);
        }
        let va = v.subspace(self.pivot).clone();
        let coords = |m: &ExactMatrix<F>| va.solve(m).expect("subspace of V(a)");
        let mut spans = Vec::with_capacity(self.result.len());
        for prov in &self.provenance {
            let s = match *prov {
                Provenance::Element(b) => v.subspace(b).column_intersection(&va),
                Provenance::Pair(k) => {
                    let p = self.pairs[k];
                    let (x, y) = (v.subspace(p.first), v.subspace(p.second));
                    let joined = match reading {
                        PairReading::Sum => x.column_sum(y),
                        PairReading::Intersection => x.column_intersection(y),
                    };
                    joined.column_intersection(&va)
                }
            };
            spans.push(coords(&s));
        }
        SubspaceRep::new(self.result.clone(), v.field().clone(), va.cols(), spans)
    }

    /// The dimensions of the representations killed by `D_a`.
    pub fn exceptional_set(&self) -> ExceptionalSet {
        let n = self.base.len();
        let mut members = vec![(ExceptionalKind::T0, DimensionVector::new(1, vec![0; n]))];
        for b in self.theta() {
            let mut v = vec![0; n];
            v[b] = 1;
            members.push((ExceptionalKind::E(b), DimensionVector::new(1, v)));
        }
        for p in &self.pairs {
            let mut v = vec![0; n];
            v[p.first] = 1;
            v[p.second] = 1;
            members.push((
                ExceptionalKind::EPair(p.first, p.second),
                DimensionVector::new(1, v),
            ));
        }
        ExceptionalSet { members }
    }
}

/// Largest value sum along a chain, optionally restricted to `within`.
fn max_chain_sum(p: &Poset, values: &[usize], within: Option<&[usize]>) -> usize {
    // Longest weighted path in the order; indices of a poset built from a
    // linear extension are not guaranteed, so iterate to a fixed point.
    let allowed = |i: usize| within.is_none_or(|w| w.contains(&i));
    let mut best: Vec<usize> = (0..p.len())
        .map(|i| if allowed(i) { values[i] } else { 0 })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (x, y) in p.relations() {
            if allowed(x) && allowed(y) && best[x] + values[y] > best[y] {
                best[y] = best[x] + values[y];
                changed = true;
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExceptionalKind {
    T0,
    E(usize),
    EPair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSet {
    pub members: Vec<(ExceptionalKind, DimensionVector)>,
}

impl ExceptionalSet {
    /// The members as one-row block matrices over the base poset.
    pub fn elements<F: Field>(&self, base: &Arc<Poset>, field: &F) -> Vec<MatrixRep<F>> {
        self.members
            .iter()
            .map(|(k, _)| match *k {
                ExceptionalKind::T0 => MatrixRep::special_t0(base.clone(), field.clone()),
                ExceptionalKind::E(b) => MatrixRep::special_e(base.clone(), field.clone(), b),
                ExceptionalKind::EPair(b, c) => {
                    MatrixRep::special_e_pair(base.clone(), field.clone(), b, c)
                }
            })
            .collect()
    }

    pub fn dimensions(&self) -> Vec<DimensionVector> {
        self.members.iter().map(|(_, d)| d.clone()).collect()
    }
}
