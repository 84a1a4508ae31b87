//! Dimension vectors, the Tits quadratic form of a poset, the critical
//! dimensions and both finite-type criteria.

use std::fmt;

use crate::critical::{for_each_embedding, CriticalEmbedding, CriticalKind};
use crate::error::{Error, Result};
use crate::poset::Poset;

pub const DEFAULT_SCAN_BUDGET: u128 = 10_000_000;

/// A dimension vector on `Ŝ = S ∪ {0}`: `d0` at the added point and one
/// value per poset element, indexed like the poset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimensionVector {
    pub d0: usize,
    pub values: Vec<usize>,
}

impl DimensionVector {
    pub fn new(d0: usize, values: Vec<usize>) -> Self {
        DimensionVector { d0, values }
    }

    pub fn zero(n: usize) -> Self {
        DimensionVector {
            d0: 0,
            values: vec![0; n],
        }
    }

    /// Builds a vector from `(label, value)` pairs; missing labels get 0.
    pub fn from_labels(poset: &Poset, d0: usize, entries: &[(&str, usize)]) -> Result<Self> {
        let mut values = vec![0; poset.len()];
        for &(l, v) in entries {
            values[poset.index_of(l)?] = v;
        }
        Ok(DimensionVector { d0, values })
    }

    pub fn check(&self, poset: &Poset) -> Result<()> {
        if self.values.len() != poset.len() {
            return Err(Error::DimensionMismatch {
                expected: poset.len(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|d|`, the sum over all of `Ŝ`.
    pub fn total(&self) -> usize {
        self.d0 + self.values.iter().sum::<usize>()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    /// Elements with nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != 0)
            .collect()
    }

    pub fn is_sincere(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }

    /// Pointwise comparison on all of `Ŝ`.
    pub fn le(&self, other: &Self) -> bool {
        self.d0 <= other.d0
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        DimensionVector {
            d0: self.d0 + other.d0,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Values on a subset of elements, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        DimensionVector {
            d0: self.d0,
            values: subset.iter().map(|&i| self.values[i]).collect(),
        }
    }

    /// Nonzero on exactly one element of `S` and zero at `0`: the dimension
    /// of a trivial element `T_a`.
    pub fn trivial_element(&self) -> Option<usize> {
        let s = self.support();
        (self.d0 == 0 && s.len() == 1 && self.values[s[0]] == 1).then(|| s[0])
    }

    pub fn display(&self, poset: &Poset) -> String {
        let parts: Vec<String> = (0..self.values.len())
            .filter(|&i| self.values[i] != 0)
            .map(|i| format!("{}={}", poset.label(i), self.values[i]))
            .collect();
        format!("({}; {})", self.d0, parts.join(", "))
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({}; {})", self.d0, vals.join(","))
    }
}

/// `Q(x) = Σ_Ŝ x_a² + Σ_{a≺b} x_a x_b − Σ_S x_0 x_a` for an arbitrary integer
/// vector; `x0` is the value at the added point.
pub fn tits_form(poset: &Poset, x0: i64, x: &[i64]) -> i64 {
    assert_eq!(x.len(), poset.len());
    let squares: i64 = x0 * x0 + x.iter().map(|v| v * v).sum::<i64>();
    let order: i64 = poset.relations().iter().map(|&(a, b)| x[a] * x[b]).sum();
    let linear: i64 = x.iter().map(|v| x0 * v).sum();
    squares + order - linear
}

fn as_i64(d: &DimensionVector) -> (i64, Vec<i64>) {
    (d.d0 as i64, d.values.iter().map(|&v| v as i64).collect())
}

pub fn tits_value(poset: &Poset, d: &DimensionVector) -> Result<i64> {
    d.check(poset)?;
    let (x0, x) = as_i64(d);
    Ok(tits_form(poset, x0, &x))
}

/// `d0² + Σ d(a)² + Σ_{a≺b} d(a)d(b)`, the dimension of the structure group.
pub fn group_dimension(poset: &Poset, d: &DimensionVector) -> Result<i64> {
    d.check(poset)?;
    let (x0, x) = as_i64(d);
    Ok(group_dimension_i64(poset, x0, &x))
}

/// `Σ d0·d(a)`, the dimension of the space of block matrices.
pub fn space_dimension(poset: &Poset, d: &DimensionVector) -> Result<i64> {
    d.check(poset)?;
    let (x0, x) = as_i64(d);
    Ok(space_dimension_i64(x0, &x))
}

pub fn group_dimension_i64(poset: &Poset, x0: i64, x: &[i64]) -> i64 {
    x0 * x0
        + x.iter().map(|v| v * v).sum::<i64>()
        + poset
            .relations()
            .iter()
            .map(|&(a, b)| x[a] * x[b])
            .sum::<i64>()
}

pub fn space_dimension_i64(x0: i64, x: &[i64]) -> i64 {
    x.iter().map(|v| x0 * v).sum()
}

pub fn is_root(poset: &Poset, d: &DimensionVector) -> Result<bool> {
    Ok(tits_value(poset, d)? == 1)
}

/// One of the five critical dimensions: `c0` at the added point and
/// `values[i]` on element `i` of `kind.poset()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalDimension {
    pub kind: CriticalKind,
    pub c0: usize,
    pub values: Vec<usize>,
}

impl CriticalDimension {
    pub fn for_kind(kind: CriticalKind) -> Self {
        let (c0, values) = match kind {
            CriticalKind::A4 => (2, vec![1; 4]),
            CriticalKind::T222 => (3, vec![1; 6]),
            // s, x1..x3, y1..y3
            CriticalKind::T133 => (4, vec![2, 1, 1, 1, 1, 1, 1]),
            // s, x1, x2, y1..y5
            CriticalKind::T125 => (6, vec![3, 2, 2, 1, 1, 1, 1, 1]),
            // a1, a2, b1, b2, c1..c4
            CriticalKind::K => (5, vec![1, 2, 2, 1, 1, 1, 1, 1]),
        };
        CriticalDimension { kind, c0, values }
    }

    pub fn as_dimension(&self) -> DimensionVector {
        DimensionVector::new(self.c0, self.values.clone())
    }

    /// Some value equals 1, which makes the vector primitive.
    pub fn has_unit_value(&self) -> bool {
        self.c0 == 1 || self.values.contains(&1)
    }
}

pub fn critical_dimension_table() -> Vec<CriticalDimension> {
    CriticalKind::ALL
        .into_iter()
        .map(CriticalDimension::for_kind)
        .collect()
}

/// A critical dimension lying below `d` through some embedding of its
/// support, if there is one.
pub fn dominated_critical(
    poset: &Poset,
    d: &DimensionVector,
) -> Result<Option<(CriticalDimension, CriticalEmbedding)>> {
    d.check(poset)?;
    let support = d.support();
    let width = if support.len() >= 3 {
        poset.width_within(mask_of(&support)).0
    } else {
        0
    };
    for c in critical_dimension_table() {
        if c.c0 > d.d0 || width < c.kind.width() || support.len() < c.values.len() {
            continue;
        }
        let pattern = c.kind.poset();
        let mut hit = None;
        for_each_embedding(
            &pattern,
            poset,
            &|i, h| c.values[i] <= d.values[h],
            &mut |img| {
                hit = Some(img.to_vec());
                false
            },
        );
        if let Some(image) = hit {
            let kind = c.kind;
            return Ok(Some((c, CriticalEmbedding { kind, image })));
        }
    }
    Ok(None)
}

fn mask_of(elems: &[usize]) -> u64 {
    elems.iter().fold(0, |m, &i| m | 1 << i)
}

/// Finite type by the critical-dimension criterion.
pub fn is_finite_type(poset: &Poset, d: &DimensionVector) -> Result<bool> {
    Ok(dominated_critical(poset, d)?.is_none())
}

/// Finite type by weak positivity: `Q(d') > 0` for every nonzero `d' ≤ d`.
/// Checks every subvector, so the number of them must fit in `budget`.
pub fn finite_type_scan(poset: &Poset, d: &DimensionVector, budget: u128) -> Result<bool> {
    d.check(poset)?;
    let needed = std::iter::once(d.d0)
        .chain(d.values.iter().copied())
        .try_fold(1u128, |acc, v| acc.checked_mul(v as u128 + 1))
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = poset.len();
    let rels = poset.relations();
    let mut x = vec![0i64; n];
    let mut x0 = 0i64;
    loop {
        // Odometer increment over (x0, x).
        let mut k = 0;
        loop {
            if k == 0 {
                if (x0 as usize) < d.d0 {
                    x0 += 1;
                    break;
                }
                x0 = 0;
            } else {
                let i = k - 1;
                if i == n {
                    return Ok(true);
                }
                if (x[i] as usize) < d.values[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
            }
            k += 1;
        }
        let q = x0 * x0
            + x.iter().map(|v| v * v).sum::<i64>()
            + rels.iter().map(|&(a, b)| x[a] * x[b]).sum::<i64>()
            - x.iter().map(|v| x0 * v).sum::<i64>();
        if q <= 0 {
            return Ok(false);
        }
    }
}
