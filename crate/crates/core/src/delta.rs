//! Finite subsets of ℕ under the symmetric-difference distance, and their
//! isometric image in ℓ1.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A finite set of naturals, stored sorted without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DeltaPoint(Vec<u64>);

impl DeltaPoint {
    pub fn empty() -> Self {
        DeltaPoint(Vec::new())
    }

    pub fn singleton(n: u64) -> Self {
        DeltaPoint(vec![n])
    }

    /// Sorts the input; duplicates are rejected.
    pub fn new(mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate element {} in set",
                w[0]
            )));
        }
        Ok(DeltaPoint(elements))
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    /// |σ △ τ|.
    pub fn distance(&self, other: &DeltaPoint) -> u64 {
        let common = self
            .0
            .iter()
            .merge_join_by(&other.0, |a, b| a.cmp(b))
            .filter(|e| e.is_both())
            .count();
        (self.0.len() + other.0.len() - 2 * common) as u64
    }
}

impl fmt::Display for DeltaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

impl<'de> Deserialize<'de> for DeltaPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u64>::deserialize(d)?;
        DeltaPoint::new(raw).map_err(serde::de::Error::custom)
    }
}

pub fn sym_diff_distance(sigma: &DeltaPoint, tau: &DeltaPoint) -> u64 {
    sigma.distance(tau)
}

/// All subsets of `{0,…,n−1}` with at most `k` elements, by size and then
/// lexicographically.
pub fn enumerate_delta(k: usize, n: u64) -> Vec<DeltaPoint> {
    (0..=k)
        .flat_map(|size| (0..n).combinations(size).map(DeltaPoint))
        .collect()
}

/// The two-branch subtree with root and all singletons, labelled as in
/// the classical argument: ∅, {i} for 1 ≤ i ≤ n, and {1,i}, {2,i} for
/// 3 ≤ i ≤ n.
pub fn t122_points(n: u64) -> Result<Vec<DeltaPoint>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("t122 needs n ≥ 3, got {n}")));
    }
    let mut out = vec![DeltaPoint::empty()];
    out.extend((1..=n).map(DeltaPoint::singleton));
    out.extend((3..=n).map(|i| DeltaPoint(vec![1, i])));
    out.extend((3..=n).map(|i| DeltaPoint(vec![2, i])));
    Ok(out)
}

/// n_i^r = k(i−1) + r − 1: k pairwise disjoint sequences of naturals.
pub fn index_grid(k: u64, i: u64, r: u64) -> Result<u64> {
    if r == 0 || r > k {
        return Err(Error::InvalidArgument(format!(
            "family r={r} outside 1..={k}"
        )));
    }
    if i == 0 {
        return Err(Error::InvalidArgument("index i starts at 1".into()));
    }
    Ok(k * (i - 1) + r - 1)
}

/// A finitely supported rational sequence (an element of c00 ⊂ ℓ1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector(BTreeMap<u64, Rational>);

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector(BTreeMap::new())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut v = SparseVector::zero();
        for (i, q) in entries {
            v.add_at(i, q);
        }
        v
    }

    /// δ·e_i.
    pub fn basis(i: u64, scale: Rational) -> Self {
        Self::from_entries([(i, scale)])
    }

    fn add_at(&mut self, i: u64, q: Rational) {
        let slot = self.0.entry(i).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn get(&self, i: u64) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.0.iter().map(|(i, q)| (*i, q))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    pub fn l1_norm(&self) -> Rational {
        self.0
            .values()
            .map(|q| q.abs())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, q) in &other.0 {
            out.add_at(*i, q.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, q) in &other.0 {
            out.add_at(*i, -q.clone());
        }
        out
    }

    /// First shared support index, if any.
    pub fn shared_index(&self, other: &SparseVector) -> Option<u64> {
        self.0.keys().find(|i| other.0.contains_key(i)).copied()
    }
}

impl fmt::Display for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts = self
            .0
            .iter()
            .map(|(i, q)| format!("{}·e_{i}", rational::format(q)));
        f.write_str(&parts.collect::<Vec<_>>().join(" + "))
    }
}

impl Serialize for SparseVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .0
            .iter()
            .map(|(i, q)| (i.to_string(), rational::format(q)))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let i: u64 = k
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad index {k:?}")))?;
            entries.push((i, rational::parse(&v).map_err(serde::de::Error::custom)?));
        }
        Ok(SparseVector::from_entries(entries))
    }
}

/// σ ↦ Σ_{n∈σ} e_n.
pub fn ell1_embed(sigma: &DeltaPoint) -> SparseVector {
    SparseVector::from_entries(sigma.elements().iter().map(|&n| (n, rational::int(1))))
}

pub fn ell1_distance(u: &SparseVector, v: &SparseVector) -> Rational {
    u.sub(v).l1_norm()
}
