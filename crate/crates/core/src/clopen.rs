//! Finite unions of clopen intervals `(γ, δ]` and `[0, δ]` inside a compact.

use std::fmt;

use crate::compacta::CompactInterval;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// `(lo, hi]`, or `[0, hi]` when `lo` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: Option<Ordinal>,
    pub hi: Ordinal,
}

impl Span {
    pub fn new(lo: Option<Ordinal>, hi: Ordinal) -> Self {
        Span { lo, hi }
    }

    fn is_empty(&self) -> bool {
        matches!(&self.lo, Some(lo) if lo >= &self.hi)
    }

    pub fn contains(&self, point: &Ordinal) -> bool {
        point <= &self.hi && self.lo.as_ref().is_none_or(|lo| point > lo)
    }

    /// Smallest point of the span whose rank is at least `rank`.
    pub fn first_of_rank(&self, rank: u32) -> Option<Ordinal> {
        let candidate = match &self.lo {
            None if rank == 0 => Ordinal::zero(),
            None => Ordinal::monomial(rank, 1),
            Some(lo) => lo.next_of_rank(rank),
        };
        (candidate <= self.hi).then_some(candidate)
    }

    /// Whether the span meets K^(rank).
    pub fn meets_rank(&self, rank: u32) -> bool {
        match self.hi.floor_rank(rank) {
            None => false,
            Some(top) => self.lo.as_ref().is_none_or(|lo| &top > lo),
        }
    }

    /// Representative member (the right end).
    pub fn representative(&self) -> &Ordinal {
        &self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            None => write!(f, "[0,{}]", self.hi.pretty()),
            Some(lo) => write!(f, "({},{}]", lo.pretty(), self.hi.pretty()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenUnion {
    compact: CompactInterval,
    spans: Vec<Span>,
}

fn lo_key(lo: &Option<Ordinal>) -> (bool, Option<&Ordinal>) {
    (lo.is_some(), lo.as_ref())
}

impl ClopenUnion {
    pub fn empty(compact: &CompactInterval) -> Self {
        ClopenUnion {
            compact: compact.clone(),
            spans: Vec::new(),
        }
    }

    pub fn full(compact: &CompactInterval) -> Self {
        ClopenUnion {
            compact: compact.clone(),
            spans: vec![Span::new(None, compact.endpoint().clone())],
        }
    }

    /// Normalizes arbitrary spans: clips to the compact, sorts, merges
    /// overlapping or touching spans, drops empties.
    pub fn from_spans(
        compact: &CompactInterval,
        spans: impl IntoIterator<Item = Span>,
    ) -> Result<Self> {
        let mut spans: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
        for s in &spans {
            compact.check_contains(&s.hi)?;
        }
        spans.sort_by(|a, b| lo_key(&a.lo).cmp(&lo_key(&b.lo)));
        let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            if let Some(last) = merged.last_mut() {
                let touches = match &s.lo {
                    None => true,
                    Some(lo) => lo <= &last.hi,
                };
                if touches {
                    if s.hi > last.hi {
                        last.hi = s.hi;
                    }
                    continue;
                }
            }
            merged.push(s);
        }
        Ok(ClopenUnion {
            compact: compact.clone(),
            spans: merged,
        })
    }

    pub fn compact(&self) -> &CompactInterval {
        &self.compact
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.spans.len() == 1
            && self.spans[0].lo.is_none()
            && &self.spans[0].hi == self.compact.endpoint()
    }

    pub fn contains(&self, point: &Ordinal) -> bool {
        self.spans.iter().any(|s| s.contains(point))
    }

    fn check_same(&self, other: &ClopenUnion) -> Result<()> {
        if self.compact != other.compact {
            return Err(Error::CompactMismatch {
                left: self.compact.endpoint().clone(),
                right: other.compact.endpoint().clone(),
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &ClopenUnion) -> Result<ClopenUnion> {
        self.check_same(other)?;
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let a = &self.spans[i];
            let b = &other.spans[j];
            let lo = std::cmp::max_by(a.lo.clone(), b.lo.clone(), |x, y| lo_key(x).cmp(&lo_key(y)));
            let hi = std::cmp::min(&a.hi, &b.hi).clone();
            let span = Span::new(lo, hi);
            if !span.is_empty() {
                out.push(span);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        ClopenUnion::from_spans(&self.compact, out)
    }

    pub fn union(&self, other: &ClopenUnion) -> Result<ClopenUnion> {
        self.check_same(other)?;
        ClopenUnion::from_spans(
            &self.compact,
            self.spans.iter().chain(&other.spans).cloned(),
        )
    }

    /// True iff some span contains a limit ordinal.
    pub fn contains_limit_point(&self) -> bool {
        self.meets_derived(1)
    }

    /// A clopen subset of an ordinal interval is infinite exactly when it
    /// contains a limit ordinal.
    pub fn is_infinite(&self) -> bool {
        self.contains_limit_point()
    }

    /// Whether the set meets K^(i).
    pub fn meets_derived(&self, order: u32) -> bool {
        self.spans.iter().any(|s| s.meets_rank(order))
    }

    /// Smallest point of the set lying in K^(i).
    pub fn first_of_rank(&self, order: u32) -> Option<Ordinal> {
        self.spans.iter().find_map(|s| s.first_of_rank(order))
    }

    /// All points of the set in K^(i), ascending. Fails for infinite sets or
    /// beyond `cap` points.
    pub fn derived_points(&self, order: u32, cap: usize) -> Result<Vec<Ordinal>> {
        let mut out = Vec::new();
        for s in &self.spans {
            let mut chunk = Vec::new();
            let mut cursor = s.hi.floor_rank(order);
            while let Some(p) = cursor {
                if s.lo.as_ref().is_some_and(|lo| &p <= lo) {
                    break;
                }
                if out.len() + chunk.len() >= cap {
                    return Err(Error::TooManyPoints(cap));
                }
                cursor = p
                    .prev_of_rank(order)
                    .map_err(|_| Error::TooManyPoints(cap))?;
                chunk.push(p);
            }
            chunk.reverse();
            out.extend(chunk);
        }
        Ok(out)
    }

    pub fn points(&self, cap: usize) -> Result<Vec<Ordinal>> {
        self.derived_points(0, cap)
    }
}

impl fmt::Display for ClopenUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.spans.iter().map(Span::to_string).collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn k(s: &str) -> CompactInterval {
        CompactInterval::new(o(s))
    }

    fn span(lo: Option<&str>, hi: &str) -> Span {
        Span::new(lo.map(o), o(hi))
    }

    #[test]
    fn interval_algebra() {
        let kk = k("w");
        let a = ClopenUnion::from_spans(&kk, [span(Some("5"), "w")]).unwrap();
        let b = ClopenUnion::from_spans(&kk, [span(None, "7")]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.spans(), &[span(Some("5"), "7")]);
        assert!(a.is_infinite());
        assert!(!i.is_infinite());
        let u = a.union(&b).unwrap();
        assert!(u.is_full());
    }

    #[test]
    fn meets_derived_examples() {
        let kk = k("w");
        let a = ClopenUnion::from_spans(&kk, [span(Some("3"), "9")]).unwrap();
        assert!(!a.meets_derived(1));
        assert!(a.meets_derived(0));
        let kk = k("w^2*2");
        let b = ClopenUnion::from_spans(&kk, [span(Some("w^2"), "w^2+w*3")]).unwrap();
        assert!(b.meets_derived(1));
        assert!(!b.meets_derived(2));
        assert_eq!(b.first_of_rank(1), Some(o("w^2+w")));
        assert_eq!(
            b.derived_points(1, 10).unwrap(),
            vec![o("w^2+w"), o("w^2+w*2"), o("w^2+w*3")]
        );
    }

    #[test]
    fn normalization_merges_touching() {
        let kk = k("w");
        let u = ClopenUnion::from_spans(
            &kk,
            [span(Some("3"), "5"), span(None, "3"), span(Some("8"), "8")],
        )
        .unwrap();
        assert_eq!(u.spans(), &[span(None, "5")]);
        assert_eq!(u.points(100).unwrap().len(), 6);
    }

    #[test]
    fn mismatch_rejected() {
        let a = ClopenUnion::full(&k("w"));
        let b = ClopenUnion::full(&k("w*2"));
        assert!(a.intersection(&b).is_err());
    }

    #[test]
    fn empty_set_display() {
        let e = ClopenUnion::empty(&k("w"));
        assert!(e.is_empty());
        assert_eq!(e.to_string(), "∅");
        assert_eq!(e.first_of_rank(0), None);
    }
}
