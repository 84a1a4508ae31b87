//! Kleiner's five critical posets and their induced embeddings into a host.

use std::fmt;

use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriticalKind {
    /// Four incomparable points, (1,1,1,1).
    A4,
    /// Three 2-chains, (2,2,2).
    T222,
    /// A point and two 3-chains, (1,3,3).
    T133,
    /// A point, a 2-chain and a 5-chain, (1,2,5).
    T125,
    /// Kleiner's poset K.
    K,
}

impl CriticalKind {
    pub const ALL: [CriticalKind; 5] = [
        CriticalKind::A4,
        CriticalKind::T222,
        CriticalKind::T133,
        CriticalKind::T125,
        CriticalKind::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriticalKind::A4 => "A4",
            CriticalKind::T222 => "T222",
            CriticalKind::T133 => "T133",
            CriticalKind::T125 => "T125",
            CriticalKind::K => "K",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// The abstract critical poset.
    ///
    /// Labels: `p1..p4` for A4; `x1≺x2, y1≺y2, z1≺z2` for (2,2,2); `s` plus
    /// chains `x1≺..`, `y1≺..` for (1,3,3) and (1,2,5); the usual names for K.
    pub fn poset(self) -> Poset {
        fn chains(single: bool, lens: &[(char, usize)]) -> Poset {
            let mut labels = Vec::new();
            let mut rels = Vec::new();
            if single {
                labels.push("s".to_string());
            }
            for &(c, len) in lens {
                let start = labels.len();
                for h in 0..len {
                    labels.push(format!("{c}{}", h + 1));
                    if h > 0 {
                        rels.push((start + h - 1, start + h));
                    }
                }
            }
            Poset::from_index_relations(labels, &rels).expect("critical posets are valid")
        }
        match self {
            CriticalKind::A4 => {
                let labels = (1..=4).map(|i| format!("p{i}")).collect();
                Poset::from_index_relations(labels, &[]).expect("antichain is valid")
            }
            CriticalKind::T222 => chains(false, &[('x', 2), ('y', 2), ('z', 2)]),
            CriticalKind::T133 => chains(true, &[('x', 3), ('y', 3)]),
            CriticalKind::T125 => chains(true, &[('x', 2), ('y', 5)]),
            CriticalKind::K => Poset::kleiner_k(),
        }
    }

    /// Width of the abstract poset, used to prune embedding searches.
    pub fn width(self) -> usize {
        match self {
            CriticalKind::A4 => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An order embedding of a critical poset onto an induced subposet of a host.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CriticalEmbedding {
    pub kind: CriticalKind,
    /// `image[i]` is the host element that abstract element `i` maps to.
    pub image: Vec<usize>,
}

impl CriticalEmbedding {
    pub fn image_set(&self) -> Vec<usize> {
        let mut v = self.image.clone();
        v.sort_unstable();
        v
    }
}

/// Visits every injective map from `pattern` into `host` that preserves and
/// reflects the strict order, restricted to host elements accepted by
/// `allowed(pattern_elem, host_elem)`. The visitor returns `false` to stop.
pub fn for_each_embedding(
    pattern: &Poset,
    host: &Poset,
    allowed: &dyn Fn(usize, usize) -> bool,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let mut image = Vec::with_capacity(pattern.len());
    let mut used = vec![false; host.len()];
    extend(pattern, host, allowed, &mut image, &mut used, visit);
}

fn extend(
    pattern: &Poset,
    host: &Poset,
    allowed: &dyn Fn(usize, usize) -> bool,
    image: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let i = image.len();
    if i == pattern.len() {
        return visit(image);
    }
    for h in 0..host.len() {
        if used[h] || !allowed(i, h) {
            continue;
        }
        let consistent = image.iter().enumerate().all(|(j, &hj)| {
            pattern.lt(j, i) == host.lt(hj, h) && pattern.lt(i, j) == host.lt(h, hj)
        });
        if !consistent {
            continue;
        }
        used[h] = true;
        image.push(h);
        let go_on = extend(pattern, host, allowed, image, used, visit);
        image.pop();
        used[h] = false;
        if !go_on {
            return false;
        }
    }
    true
}

/// Every induced embedding of every critical poset into `host`. Automorphic
/// images are listed separately, so a 4-antichain yields 24 embeddings of A4.
pub fn critical_subposet_embeddings(host: &Poset) -> Vec<CriticalEmbedding> {
    let w = host.width().0;
    let mut out = Vec::new();
    for kind in CriticalKind::ALL {
        let pattern = kind.poset();
        if w < kind.width() || host.len() < pattern.len() {
            continue;
        }
        for_each_embedding(&pattern, host, &|_, _| true, &mut |img| {
            out.push(CriticalEmbedding {
                kind,
                image: img.to_vec(),
            });
            true
        });
    }
    out
}

/// Critical subsets of `host`: one embedding per distinct (kind, image set).
pub fn critical_subsets(host: &Poset) -> Vec<CriticalEmbedding> {
    let mut seen = std::collections::HashSet::new();
    critical_subposet_embeddings(host)
        .into_iter()
        .filter(|e| seen.insert((e.kind, e.image_set())))
        .collect()
}

/// True iff `host` has no critical subset, i.e. is of finite representation
/// type by Kleiner's criterion.
pub fn is_representation_finite(host: &Poset) -> bool {
    let w = host.width().0;
    CriticalKind::ALL.into_iter().all(|kind| {
        let pattern = kind.poset();
        if w < kind.width() || host.len() < pattern.len() {
            return true;
        }
        let mut found = false;
        for_each_embedding(&pattern, host, &|_, _| true, &mut |_| {
            found = true;
            false
        });
        !found
    })
}
