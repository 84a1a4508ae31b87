//! Finite-type classification: the brute-force orbit oracle over GF(p), the
//! recursive construction of indecomposables through derivatives, and the
//! harness that checks the classification on every small dimension vector.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::critical::CriticalEmbedding;
use crate::derivation::derive_poset;
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, Fp};
use crate::matrix::ExactMatrix;
use crate::poset::Poset;
use crate::rep::{
    are_isomorphic, el_end_dimension, is_indecomposable, rep_end_dimension, rho, MatrixRep,
};
use crate::tits::{
    dominated_critical, finite_type_scan, is_finite_type, tits_value, CriticalDimension,
    DimensionVector, DEFAULT_SCAN_BUDGET,
};

pub const DEFAULT_BRUTE_BUDGET: u128 = 1 << 24;

/// Largest characteristic the orbit enumerator accepts.
pub const MAX_BRUTE_PRIME: u32 = 251;

#[derive(Debug, Clone, Copy)]
enum Gen {
    RowAdd { dst: usize, src: usize },
    RowScale { row: usize },
    ColAdd { dst: usize, src: usize },
    ColScale { col: usize },
}

/// Orbit enumeration of `GL(d0) × G` acting on `d0 × Σd` matrices, where `G`
/// is the group of invertible incidence-shaped column transformations.
/// Matrices are encoded as base-`p` integers, entry `(i, j)` at digit
/// `i·cols + j`.
struct OrbitEnumerator {
    p: u32,
    g: u8,
    rows: usize,
    cols: usize,
    /// For each block: its column range and the columns strictly below it.
    blocks: Vec<(std::ops::Range<usize>, Vec<usize>, usize)>,
    gens: Vec<Gen>,
}

impl OrbitEnumerator {
    fn new(poset: &Poset, d: &DimensionVector, field: &Fp) -> Self {
        let widths = &d.values;
        let mut offs = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for &w in widths {
            offs.push(acc);
            acc += w;
        }
        let cols = acc;
        let blocks = (0..poset.len())
            .map(|a| {
                let below: Vec<usize> = poset
                    .strict_lower_cone(a)
                    .into_iter()
                    .flat_map(|b| offs[b]..offs[b] + widths[b])
                    .collect();
                (offs[a]..offs[a] + widths[a], below, widths[a])
            })
            .collect();
        let mut gens = Vec::new();
        for i in 0..d.d0 {
            for j in 0..d.d0 {
                if i != j {
                    gens.push(Gen::RowAdd { dst: i, src: j });
                }
            }
            gens.push(Gen::RowScale { row: i });
        }
        for a in 0..poset.len() {
            let own = offs[a]..offs[a] + widths[a];
            for c in own.clone() {
                for s in own.clone() {
                    if s != c {
                        gens.push(Gen::ColAdd { dst: c, src: s });
                    }
                }
                gens.push(Gen::ColScale { col: c });
                for b in poset.strict_lower_cone(a) {
                    for s in offs[b]..offs[b] + widths[b] {
                        gens.push(Gen::ColAdd { dst: c, src: s });
                    }
                }
            }
        }
        OrbitEnumerator {
            p: field.p(),
            g: field.primitive_root() as u8,
            rows: d.d0,
            cols,
            blocks,
            gens,
        }
    }

    fn entries(&self) -> usize {
        self.rows * self.cols
    }

    fn decode(&self, mut idx: u64, out: &mut [u8]) {
        let p = self.p as u64;
        for e in out.iter_mut() {
            *e = (idx % p) as u8;
            idx /= p;
        }
    }

    fn encode(&self, m: &[u8]) -> u64 {
        let p = self.p as u64;
        m.iter().rev().fold(0u64, |acc, &e| acc * p + e as u64)
    }

    fn apply(&self, gen: Gen, m: &mut [u8]) {
        let p = self.p as u16;
        let (r, c) = (self.rows, self.cols);
        match gen {
            Gen::RowAdd { dst, src } => {
                for j in 0..c {
                    m[dst * c + j] = ((m[dst * c + j] as u16 + m[src * c + j] as u16) % p) as u8;
                }
            }
            Gen::RowScale { row } => {
                for j in 0..c {
                    m[row * c + j] = ((m[row * c + j] as u16 * self.g as u16) % p) as u8;
                }
            }
            Gen::ColAdd { dst, src } => {
                for i in 0..r {
                    m[i * c + dst] = ((m[i * c + dst] as u16 + m[i * c + src] as u16) % p) as u8;
                }
            }
            Gen::ColScale { col } => {
                for i in 0..r {
                    m[i * c + col] = ((m[i * c + col] as u16 * self.g as u16) % p) as u8;
                }
            }
        }
    }

    /// Rank of the listed columns.
    fn rank(&self, m: &[u8], cols: &[usize], scratch: &mut Vec<u8>) -> usize {
        let (r, w) = (self.rows, cols.len());
        let p = self.p as u16;
        scratch.clear();
        for i in 0..r {
            for &j in cols {
                scratch.push(m[i * self.cols + j]);
            }
        }
        let mut rank = 0;
        for c in 0..w {
            let Some(piv) = (rank..r).find(|&i| scratch[i * w + c] != 0) else {
                continue;
            };
            for j in 0..w {
                scratch.swap(rank * w + j, piv * w + j);
            }
            let inv = inverse_mod(scratch[rank * w + c] as u16, p);
            for j in 0..w {
                scratch[rank * w + j] = ((scratch[rank * w + j] as u16 * inv) % p) as u8;
            }
            for i in 0..r {
                let factor = scratch[i * w + c] as u16;
                if i == rank || factor == 0 {
                    continue;
                }
                for j in 0..w {
                    let sub = (factor * scratch[rank * w + j] as u16) % p;
                    scratch[i * w + j] = ((scratch[i * w + j] as u16 + p - sub) % p) as u8;
                }
            }
            rank += 1;
            if rank == r {
                break;
            }
        }
        rank
    }

    /// Every block adds its full width to the rank of the blocks below it.
    fn realizes(&self, m: &[u8], scratch: &mut Vec<u8>) -> bool {
        let mut cols = Vec::new();
        for (range, below, width) in &self.blocks {
            if *width == 0 {
                continue;
            }
            let r0 = self.rank(m, below, scratch);
            cols.clear();
            cols.extend_from_slice(below);
            cols.extend(range.clone());
            if self.rank(m, &cols, scratch) != r0 + width {
                return false;
            }
        }
        true
    }

    /// Minimal encodings of all orbits of realizing matrices.
    fn realizing_orbits(&self) -> Vec<u64> {
        let total = (self.p as u64).pow(self.entries() as u32);
        let mut visited = vec![0u64; (total as usize).div_ceil(64)];
        let mut m = vec![0u8; self.entries()];
        let mut n = vec![0u8; self.entries()];
        let mut scratch = Vec::new();
        let mut queue = Vec::new();
        let mut reps = Vec::new();
        for idx in 0..total {
            if visited[(idx / 64) as usize] >> (idx % 64) & 1 == 1 {
                continue;
            }
            self.decode(idx, &mut m);
            if !self.realizes(&m, &mut scratch) {
                continue;
            }
            reps.push(idx);
            visited[(idx / 64) as usize] |= 1 << (idx % 64);
            queue.push(idx);
            while let Some(x) = queue.pop() {
                self.decode(x, &mut m);
                for &g in &self.gens {
                    n.copy_from_slice(&m);
                    self.apply(g, &mut n);
                    let y = self.encode(&n);
                    let (w, b) = ((y / 64) as usize, y % 64);
                    if visited[w] >> b & 1 == 0 {
                        visited[w] |= 1 << b;
                        queue.push(y);
                    }
                }
            }
        }
        reps
    }

    fn to_matrix(&self, idx: u64, field: &Fp) -> ExactMatrix<Fp> {
        let mut m = vec![0u8; self.entries()];
        self.decode(idx, &mut m);
        ExactMatrix::new(
            *field,
            self.rows,
            self.cols,
            m.into_iter().map(u32::from).collect(),
        )
        .expect("sized")
    }
}

fn inverse_mod(a: u16, p: u16) -> u16 {
    let (mut acc, mut base, mut e) = (1u32, a as u32, p as u32 - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        e >>= 1;
    }
    acc as u16
}

/// Longest value sum along a chain of the poset.
fn max_chain_sum(poset: &Poset, values: &[usize]) -> usize {
    let mut best: Vec<usize> = values.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for (x, y) in poset.relations() {
            if best[x] + values[y] > best[y] {
                best[y] = best[x] + values[y];
                changed = true;
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn check_brute_field(field: &Fp) -> Result<()> {
    if field.p() > MAX_BRUTE_PRIME {
        return Err(Error::Invalid(format!(
            "brute force supports primes up to {MAX_BRUTE_PRIME}"
        )));
    }
    Ok(())
}

/// One block matrix per isomorphism class of representations of dimension
/// exactly `d` (columns realizing `d`), each the orbit element with the
/// smallest encoding.
pub fn iso_class_representatives(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &Fp,
    budget: u128,
) -> Result<Vec<MatrixRep<Fp>>> {
    d.check(poset)?;
    check_brute_field(field)?;
    if max_chain_sum(poset, &d.values) > d.d0 {
        return Ok(Vec::new());
    }
    let support = d.support();
    let sub = Arc::new(poset.induced_subposet(&support));
    let ds = d.restrict(&support);
    let entries = ds.d0 as u32 * ds.values.iter().sum::<usize>() as u32;
    let needed = (field.p() as u128)
        .checked_pow(entries)
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let en = OrbitEnumerator::new(&sub, &ds, field);
    en.realizing_orbits()
        .into_iter()
        .map(|idx| {
            let full = en.to_matrix(idx, field);
            MatrixRep::from_full(sub.clone(), &full, &ds.values)?.extend_to(poset.clone(), &support)
        })
        .collect()
}

/// Number of isomorphism classes of representations of dimension `d`.
pub fn count_iso_classes(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &Fp,
    budget: u128,
) -> Result<usize> {
    Ok(iso_class_representatives(poset, d, field, budget)?.len())
}

/// All indecomposable elements of dimension `d`, pairwise non-isomorphic.
pub fn brute_force_indecomposables(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &Fp,
    budget: u128,
) -> Result<Vec<MatrixRep<Fp>>> {
    d.check(poset)?;
    if let Some(a) = d.trivial_element() {
        return Ok(vec![MatrixRep::special_t(poset.clone(), *field, a)]);
    }
    if d.d0 == 0 {
        return Ok(Vec::new());
    }
    // A complement of Σ V(a) in V(0) splits off as copies of T_0.
    let sum: usize = d.values.iter().sum();
    if sum < d.d0 && !(d.d0 == 1 && sum == 0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for u in iso_class_representatives(poset, d, field, budget)? {
        if is_indecomposable(&u)? {
            out.push(u);
        }
    }
    Ok(out)
}

/// Converts a matrix over GF(p) into the same matrix over a field `F` of
/// characteristic `p`.
fn transfer<F: Field>(u: &MatrixRep<Fp>, field: &F) -> MatrixRep<F> {
    let blocks = u
        .blocks()
        .iter()
        .map(|b| {
            let data = b.data().iter().map(|&x| field.from_i64(x as i64)).collect();
            ExactMatrix::new(field.clone(), b.rows(), b.cols(), data).expect("sized")
        })
        .collect();
    MatrixRep::new(u.poset_arc().clone(), field.clone(), u.d0(), blocks).expect("same shape")
}

/// Result of [`construct_indecomposable_traced`].
#[derive(Debug, Clone)]
pub struct Construction<F: Field> {
    pub element: Option<MatrixRep<F>>,
    /// True if some step of the recursion fell back to brute force.
    pub used_fallback: bool,
}

/// The indecomposable of a finite-type root dimension, built by recursion
/// through derivatives; `None` when `Q(d) ≠ 1`.
pub fn construct_indecomposable<F: Field>(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &F,
) -> Result<Option<MatrixRep<F>>> {
    Ok(construct_indecomposable_traced(poset, d, field, DEFAULT_BRUTE_BUDGET)?.element)
}

pub fn construct_indecomposable_traced<F: Field>(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &F,
    budget: u128,
) -> Result<Construction<F>> {
    d.check(poset)?;
    if !is_finite_type(poset, d)? {
        return Err(Error::NotFiniteType);
    }
    if tits_value(poset, d)? != 1 {
        return Ok(Construction {
            element: None,
            used_fallback: false,
        });
    }
    let mut used_fallback = false;
    let u = construct_root(poset, d, field, budget, &mut used_fallback)?;
    Ok(Construction {
        element: Some(u),
        used_fallback,
    })
}

fn construct_root<F: Field>(
    poset: &Arc<Poset>,
    d: &DimensionVector,
    field: &F,
    budget: u128,
    used_fallback: &mut bool,
) -> Result<MatrixRep<F>> {
    if let Some(a) = d.trivial_element() {
        return Ok(MatrixRep::special_t(poset.clone(), field.clone(), a));
    }
    let support = d.support();
    if d.d0 == 1 {
        // Q = 1 at d0 = 1 forces a 0/1 vector on an antichain.
        return Ok(MatrixRep::special_e_set(
            poset.clone(),
            field.clone(),
            &support,
        ));
    }
    let sub = Arc::new(poset.induced_subposet(&support));
    let ds = d.restrict(&support);
    for a in sub.maximal_elements() {
        let ctx = derive_poset(sub.clone(), a)?;
        let derived = ctx.result();
        for dp in ctx.subordinate_dimensions(&ds)? {
            if tits_value(derived, &dp)? != 1 || !is_finite_type(derived, &dp)? {
                continue;
            }
            let mut inner_fallback = false;
            let v = construct_root(derived, &dp, field, budget, &mut inner_fallback)?;
            let u = ctx.integrate(&v)?;
            if u.dimension() == ds && is_indecomposable(&u)? {
                *used_fallback |= inner_fallback;
                return u.extend_to(poset.clone(), &support);
            }
        }
    }
    *used_fallback = true;
    match field.spec() {
        FieldSpec::Prime(p) => {
            let fp = Fp::new(p as u64)?;
            let found = brute_force_indecomposables(poset, d, &fp, budget)?;
            let first = found.into_iter().next().ok_or_else(|| {
                Error::Invalid(format!(
                    "no indecomposable of dimension {d} found by enumeration"
                ))
            })?;
            Ok(transfer(&first, field))
        }
        FieldSpec::Rationals => Err(Error::FieldTooRestrictive),
    }
}

/// Everything the harness learned about one dimension vector.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub dimension: DimensionVector,
    pub q_value: i64,
    /// Criterion (c): no critical dimension below `d`.
    pub finite_type: bool,
    /// Criterion (b), when the subvector scan fit in its budget.
    pub weakly_positive: Option<bool>,
    pub witness: Option<(CriticalDimension, CriticalEmbedding)>,
    pub is_root: bool,
    /// The constructed indecomposable over the first field.
    pub indecomposable: Option<MatrixRep<Fp>>,
    /// El-level endomorphism dimension of the constructed indecomposable.
    pub end_dim: Option<usize>,
    pub iso_class_counts: BTreeMap<u32, usize>,
    pub indecomposable_counts: BTreeMap<u32, usize>,
    /// Criterion (a) approximated by enumeration: class counts agree across
    /// all fields that were enumerated. Not a proof of finiteness.
    pub class_counts_stable: Option<bool>,
    pub failures: Vec<String>,
    pub skipped: Vec<String>,
}

impl ClassificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All dimension vectors on `Ŝ` with `0 < |d| ≤ max_total`.
pub fn dimension_vectors_up_to(n: usize, max_total: usize) -> Vec<DimensionVector> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n + 1];
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<DimensionVector>) {
        if k == cur.len() {
            if cur.iter().any(|&v| v > 0) {
                out.push(DimensionVector::new(cur[0], cur[1..].to_vec()));
            }
            return;
        }
        for v in 0..=left {
            cur[k] = v;
            rec(k + 1, left - v, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    out
}

/// Checks the classification on every dimension vector of total at most
/// `max_total`: criteria (b) and (c) agree; for finite type the number of
/// indecomposables is 1 at roots and 0 otherwise, the indecomposable has a
/// one-dimensional endomorphism space and matches the constructed one, and
/// class counts do not depend on the field.
pub fn verify_main_theorem(
    poset: &Arc<Poset>,
    max_total: usize,
    fields: &[u32],
    budget: u128,
) -> Result<Vec<ClassificationReport>> {
    let fps: Vec<Fp> = fields
        .iter()
        .map(|&p| Fp::new(p as u64))
        .collect::<Result<_>>()?;
    dimension_vectors_up_to(poset.len(), max_total)
        .into_par_iter()
        .map(|d| classify_one(poset, d, &fps, budget))
        .collect()
}

fn classify_one(
    poset: &Arc<Poset>,
    d: DimensionVector,
    fields: &[Fp],
    budget: u128,
) -> Result<ClassificationReport> {
    let q_value = tits_value(poset, &d)?;
    let witness = dominated_critical(poset, &d)?;
    let finite_type = witness.is_none();
    let mut report = ClassificationReport {
        dimension: d.clone(),
        q_value,
        finite_type,
        weakly_positive: None,
        witness,
        is_root: q_value == 1,
        indecomposable: None,
        end_dim: None,
        iso_class_counts: BTreeMap::new(),
        indecomposable_counts: BTreeMap::new(),
        class_counts_stable: None,
        failures: Vec::new(),
        skipped: Vec::new(),
    };
    match finite_type_scan(poset, &d, DEFAULT_SCAN_BUDGET) {
        Ok(wp) => {
            report.weakly_positive = Some(wp);
            if wp != finite_type {
                report.failures.push(format!(
                    "weak positivity {wp} but critical criterion {finite_type}"
                ));
            }
        }
        Err(Error::BudgetExceeded { .. }) => {
            report.skipped.push("subvector scan over budget".into())
        }
        Err(e) => return Err(e),
    }

    let mut brute: Vec<(u32, Vec<MatrixRep<Fp>>)> = Vec::new();
    for f in fields {
        match count_iso_classes(poset, &d, f, budget) {
            Ok(c) => {
                report.iso_class_counts.insert(f.p(), c);
            }
            Err(Error::BudgetExceeded { .. }) => {
                report
                    .skipped
                    .push(format!("class count over GF({}) over budget", f.p()));
                continue;
            }
            Err(e) => return Err(e),
        }
        if finite_type {
            let found = brute_force_indecomposables(poset, &d, f, budget)?;
            report.indecomposable_counts.insert(f.p(), found.len());
            brute.push((f.p(), found));
        }
    }
    if report.iso_class_counts.len() >= 2 {
        let mut counts = report.iso_class_counts.values();
        let first = counts.next().copied();
        report.class_counts_stable = Some(counts.all(|&c| Some(c) == first));
    }
    if !finite_type {
        return Ok(report);
    }
    if report.class_counts_stable == Some(false) {
        report.failures.push(format!(
            "class counts depend on the field: {:?}",
            report.iso_class_counts
        ));
    }
    let expected = usize::from(report.is_root);
    for (p, found) in &brute {
        if found.len() != expected {
            report.failures.push(format!(
                "{} indecomposables over GF({p}), expected {expected}",
                found.len()
            ));
        }
        if let [u] = found.as_slice() {
            let el = el_end_dimension(u);
            if el as i64 != q_value {
                report
                    .failures
                    .push(format!("El endomorphisms of dimension {el} over GF({p})"));
            }
            if u.d0() > 0 && rep_end_dimension(&rho(u)) != 1 {
                report.failures.push(format!(
                    "representation endomorphisms not scalar over GF({p})"
                ));
            }
        }
    }
    if report.is_root {
        if let Some(f) = fields.first() {
            match construct_indecomposable_traced(poset, &d, f, budget) {
                Ok(c) => {
                    let u = c
                        .element
                        .expect("roots of finite type have an indecomposable");
                    report.end_dim = Some(el_end_dimension(&u));
                    if report.end_dim != Some(1) {
                        report
                            .failures
                            .push("constructed element has non-scalar endomorphisms".into());
                    }
                    if let Some((_, found)) = brute.iter().find(|(p, _)| *p == f.p()) {
                        if let [v] = found.as_slice() {
                            if are_isomorphic(&u, v)?.is_none() {
                                report.failures.push(
                                    "constructed element differs from the enumerated one".into(),
                                );
                            }
                        }
                    }
                    report.indecomposable = Some(u);
                }
                Err(Error::BudgetExceeded { .. }) => {
                    report.skipped.push("construction over budget".into())
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}
