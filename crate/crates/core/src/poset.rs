//! Finite posets with labelled elements and the order-theoretic queries used
//! throughout the crate.
//!
//! Elements are addressed by index (input order); labels are kept for I/O.
//! The strict order is stored transitively closed as bitmasks, which caps the
//! size at 64 elements.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ELEMENTS: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// `below[i]` has bit `j` set iff `j ≺ i`.
    below: Vec<u64>,
    /// `above[i]` has bit `j` set iff `i ≺ j`.
    above: Vec<u64>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relations()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.labels[a], self.labels[b]))
            .collect();
        write!(f, "Poset({:?}; {})", self.labels, rels.join(", "))
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// `a1, a2, ..., b1, ...` style label: chain letter plus 1-based height.
fn chain_label(chain: usize, height: usize) -> String {
    let letter = (b'a' + chain as u8) as char;
    format!("{letter}{height}")
}

impl Poset {
    /// Builds a poset from labels and generating relations `(x, y)` meaning
    /// `x ≺ y`. The relation is closed transitively.
    pub fn new<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut pairs = Vec::with_capacity(relations.len());
        for (x, y) in relations {
            let xi = *index
                .get(x.as_ref())
                .ok_or_else(|| Error::UnknownElement(x.as_ref().to_string()))?;
            let yi = *index
                .get(y.as_ref())
                .ok_or_else(|| Error::UnknownElement(y.as_ref().to_string()))?;
            pairs.push((xi, yi));
        }
        Self::from_index_relations(labels, &pairs)
    }

    /// Like [`Poset::new`] with relations given by index.
    pub fn from_index_relations(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(Error::Invalid(format!(
                "posets are limited to {MAX_ELEMENTS} elements"
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut below = vec![0u64; n];
        for &(x, y) in relations {
            if x >= n || y >= n {
                return Err(Error::UnknownElement(format!("#{}", x.max(y))));
            }
            below[y] |= 1 << x;
        }
        // Warshall closure on bit rows.
        for k in 0..n {
            for i in 0..n {
                if below[i] >> k & 1 == 1 {
                    below[i] |= below[k];
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| below[i] >> i & 1 == 1) {
            return Err(Error::CycleDetected(labels[i].clone()));
        }
        let mut above = vec![0u64; n];
        for i in 0..n {
            for j in bits(below[i]) {
                above[j] |= 1 << i;
            }
        }
        Ok(Poset {
            labels,
            below,
            above,
        })
    }

    pub fn empty() -> Self {
        Poset {
            labels: Vec::new(),
            below: Vec::new(),
            above: Vec::new(),
        }
    }

    /// `a1 ≺ a2 ≺ ... ≺ an`.
    pub fn chain(n: usize) -> Self {
        Self::primitive(&[n])
    }

    pub fn antichain(n: usize) -> Self {
        Self::primitive(&vec![1; n])
    }

    /// Disjoint union of chains of the given lengths. Chain `k` gets the
    /// letter `a + k`; heights are numbered from 1 at the bottom.
    pub fn primitive(lengths: &[usize]) -> Self {
        let mut labels = Vec::new();
        let mut rels = Vec::new();
        for (c, &len) in lengths.iter().enumerate() {
            let start = labels.len();
            for h in 0..len {
                labels.push(if lengths.len() == 1 && len == 1 {
                    "a".to_string()
                } else if len == 1 {
                    ((b'a' + c as u8) as char).to_string()
                } else {
                    chain_label(c, h + 1)
                });
                if h > 0 {
                    rels.push((start + h - 1, start + h));
                }
            }
        }
        Self::from_index_relations(labels, &rels).expect("primitive posets are valid")
    }

    /// Kleiner's poset K: `a2 ≺ a1`, `b2 ≺ b1`, `b2 ≺ a1`, `c1 ≺ c2 ≺ c3 ≺ c4`.
    pub fn kleiner_k() -> Self {
        let el = ["a1", "a2", "b1", "b2", "c1", "c2", "c3", "c4"];
        let rel = [
            ("a2", "a1"),
            ("b2", "b1"),
            ("b2", "a1"),
            ("c1", "c2"),
            ("c2", "c3"),
            ("c3", "c4"),
        ];
        let rel: Vec<(&str, &str)> = rel.to_vec();
        Self::new(&el, &rel).expect("K is a valid poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    /// `i ≺ j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.below[j] >> i & 1 == 1
    }

    /// `i ⪯ j`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.le(i, j) || self.lt(j, i)
    }

    pub fn below_mask(&self, i: usize) -> u64 {
        self.below[i]
    }

    pub fn above_mask(&self, i: usize) -> u64 {
        self.above[i]
    }

    /// All strict relations `(x, y)` with `x ≺ y`, in index order.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.len() {
            for x in bits(self.below[y]) {
                out.push((x, y));
            }
        }
        out.sort_unstable();
        out
    }

    /// Covering relations `(x, y)`: `x ≺ y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.relations()
            .into_iter()
            .filter(|&(x, y)| self.below[y] & self.above[x] == 0)
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.above[i] == 0).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.below[i] == 0).collect()
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.above[i] == 0
    }

    /// `{b : b ⪯ a}`.
    pub fn lower_cone(&self, a: usize) -> Vec<usize> {
        bits(self.below[a] | 1 << a).collect()
    }

    /// `{b : b ≺ a}`.
    pub fn strict_lower_cone(&self, a: usize) -> Vec<usize> {
        bits(self.below[a]).collect()
    }

    /// `{b : a ≺ b}`.
    pub fn strict_upper_cone(&self, a: usize) -> Vec<usize> {
        bits(self.above[a]).collect()
    }

    /// Elements other than `a` comparable with neither side.
    pub fn incomparables(&self, a: usize) -> Vec<usize> {
        let mask = self.full_mask() & !(self.below[a] | self.above[a] | 1 << a);
        bits(mask).collect()
    }

    fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn is_antichain(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &x)| set[k + 1..].iter().all(|&y| !self.comparable(x, y)))
    }

    pub fn is_chain(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &x)| set[k + 1..].iter().all(|&y| self.comparable(x, y)))
    }

    /// Size of a largest antichain together with one such antichain, found
    /// by exhaustive branch-and-bound search.
    pub fn width(&self) -> (usize, Vec<usize>) {
        self.width_within(self.full_mask())
    }

    /// Width of the induced subposet on the elements of `mask`.
    pub fn width_within(&self, mask: u64) -> (usize, Vec<usize>) {
        let mut best = Vec::new();
        let mut current = Vec::new();
        self.antichain_search(mask, &mut current, &mut best);
        (best.len(), best)
    }

    fn antichain_search(&self, candidates: u64, current: &mut Vec<usize>, best: &mut Vec<usize>) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        if current.len() + candidates.count_ones() as usize <= best.len() {
            return;
        }
        let Some(i) = bits(candidates).next() else {
            return;
        };
        let rest = candidates & !(1 << i);
        current.push(i);
        self.antichain_search(rest & !(self.below[i] | self.above[i]), current, best);
        current.pop();
        self.antichain_search(rest, current, best);
    }

    /// A partition into `width` chains, each listed bottom to top, obtained
    /// from a maximum matching in the comparability bipartite graph.
    pub fn chain_cover(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        // succ[i] = element matched as the next one above i.
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut succ: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let mut visited = vec![false; n];
            self.augment(i, &mut visited, &mut pred, &mut succ);
        }
        let mut chains = Vec::new();
        for start in 0..n {
            if pred[start].is_some() {
                continue;
            }
            let mut chain = vec![start];
            let mut cur = start;
            while let Some(nx) = succ[cur] {
                chain.push(nx);
                cur = nx;
            }
            chains.push(chain);
        }
        chains
    }

    fn augment(
        &self,
        i: usize,
        visited: &mut [bool],
        pred: &mut [Option<usize>],
        succ: &mut [Option<usize>],
    ) -> bool {
        for j in bits(self.above[i]) {
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let free = match pred[j] {
                None => true,
                Some(k) => self.augment(k, visited, pred, succ),
            };
            if free {
                pred[j] = Some(i);
                succ[i] = Some(j);
                return true;
            }
        }
        false
    }

    /// The restriction of the order to `subset`, with elements in the given
    /// order and their labels kept.
    pub fn induced_subposet(&self, subset: &[usize]) -> Poset {
        let labels = subset.iter().map(|&i| self.labels[i].clone()).collect();
        let mut rels = Vec::new();
        for (x, &i) in subset.iter().enumerate() {
            for (y, &j) in subset.iter().enumerate() {
                if self.lt(i, j) {
                    rels.push((x, y));
                }
            }
        }
        Poset::from_index_relations(labels, &rels).expect("restriction of a poset is a poset")
    }

    pub fn induced_by_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Poset> {
        Ok(self.induced_subposet(&self.indices_of(labels)?))
    }

    /// A partition `(S1, S2, S3)` with `S3` a chain, `S1` and `S2` nonempty
    /// and every element of `S2` below every element of `S1`.
    ///
    /// Once the chain `S3` is removed, such a split exists iff the
    /// incomparability graph of the remainder is disconnected: its components
    /// are totally ordered, so any proper lower set of components works.
    pub fn is_semidecomposable(&self) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let mut chains: Vec<u64> = vec![0];
        self.collect_chains(0, 0, &mut chains);
        chains.sort_by_key(|c| (c.count_ones(), *c));
        for s3 in chains {
            let rest = self.full_mask() & !s3;
            if rest.count_ones() < 2 {
                continue;
            }
            let comps = self.incomparability_components(rest);
            if comps.len() < 2 {
                continue;
            }
            // The lowest component: one lying below every other.
            let low = comps
                .iter()
                .copied()
                .find(|&c| {
                    comps
                        .iter()
                        .all(|&d| d == c || bits(c).all(|x| self.above[x] & d == d))
                })
                .expect("incomparability components are totally ordered");
            let s2 = low;
            let s1 = rest & !low;
            debug_assert!(bits(s1).all(|x| self.below[x] & s2 == s2));
            return Some((bits(s1).collect(), bits(s2).collect(), bits(s3).collect()));
        }
        None
    }

    fn collect_chains(&self, start: usize, current: u64, out: &mut Vec<u64>) {
        for i in start..self.len() {
            if bits(current).all(|j| self.comparable(i, j)) {
                let next = current | 1 << i;
                out.push(next);
                self.collect_chains(i + 1, next, out);
            }
        }
    }

    fn incomparability_components(&self, mask: u64) -> Vec<u64> {
        let mut left = mask;
        let mut comps = Vec::new();
        while left != 0 {
            let seed = left.trailing_zeros() as usize;
            let mut comp = 1u64 << seed;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for x in bits(frontier) {
                    let inc = mask & !(self.below[x] | self.above[x] | 1 << x);
                    next |= inc & !comp;
                }
                comp |= next;
                frontier = next;
            }
            left &= !comp;
            comps.push(comp);
        }
        comps
    }

    /// An isomorphism invariant that separates non-isomorphic posets: the
    /// lexicographically smallest relation bitmask over all relabellings.
    /// Exponential; intended for posets of at most 8 elements.
    pub fn canonical_key(&self) -> (usize, u64) {
        let n = self.len();
        assert!(n <= 8, "canonical_key is limited to 8 elements");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = u64::MAX;
        permute(&mut perm, 0, &mut |p| {
            // p[new] = old
            let mut key = 0u64;
            for x in 0..n {
                for y in 0..n {
                    if self.lt(p[x], p[y]) {
                        key |= 1 << (x * n + y);
                    }
                }
            }
            best = best.min(key);
        });
        (n, if n == 0 { 0 } else { best })
    }

    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        self.len() == other.len()
            && self.relations().len() == other.relations().len()
            && self.canonical_key() == other.canonical_key()
    }

    /// One representative of every isomorphism class of posets with `n`
    /// elements, labelled `a, b, c, ...` in a linear-extension order.
    pub fn enumerate_all(n: usize) -> Vec<Poset> {
        assert!(n <= 7, "enumerate_all is limited to 7 elements");
        let mut level: Vec<Poset> = vec![Poset::empty()];
        for k in 0..n {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for p in &level {
                // The new element is maximal; its strict down-set is any
                // order ideal of p.
                for ideal in p.order_ideals() {
                    let mut labels = p.labels.clone();
                    labels.push(((b'a' + k as u8) as char).to_string());
                    let mut rels = p.relations();
                    rels.extend(bits(ideal).map(|x| (x, k)));
                    let q =
                        Poset::from_index_relations(labels, &rels).expect("extension is acyclic");
                    if seen.insert(q.canonical_key()) {
                        next.push(q);
                    }
                }
            }
            level = next;
        }
        level
    }

    /// All down-closed subsets, as bitmasks.
    pub fn order_ideals(&self) -> Vec<u64> {
        let n = self.len();
        assert!(n <= 20, "order_ideals enumerates all subsets");
        (0..1u64 << n)
            .filter(|&m| bits(m).all(|x| self.below[x] & !m == 0))
            .collect()
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Iterates the set bits of a mask, lowest first.
pub fn mask_elements(mask: u64) -> impl Iterator<Item = usize> {
    bits(mask)
}
