//! Locally constant functions on `[0,β]` with exact rational values.
//!
//! Piece j holds on `(γ_{j-1}, γ_j]`; the first piece starts at 0 and the
//! last ends at the endpoint. Right-closed intervals are clopen in the order
//! topology, so every such function is continuous.

use num::{Signed, Zero};

use crate::clopen::{ClopenUnion, Span};
use crate::compacta::CompactInterval;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    end: Ordinal,
    value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    compact: CompactInterval,
    pieces: Vec<Piece>,
}

impl StepFunction {
    pub fn new(
        compact: CompactInterval,
        cuts: Vec<Ordinal>,
        values: Vec<Rational>,
    ) -> Result<Self> {
        if values.len() != cuts.len() + 1 {
            return Err(Error::LengthMismatch {
                cuts: cuts.len(),
                expected: cuts.len() + 1,
                got: values.len(),
            });
        }
        for w in cuts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnsortedCuts(w[1].clone()));
            }
        }
        if let Some(last) = cuts.last() {
            if last >= compact.endpoint() {
                return Err(Error::CutBeyondEndpoint {
                    cut: last.clone(),
                    endpoint: compact.endpoint().clone(),
                });
            }
        }
        let ends = cuts
            .into_iter()
            .chain(std::iter::once(compact.endpoint().clone()));
        let pieces = ends
            .zip(values)
            .map(|(end, value)| Piece { end, value })
            .collect();
        Ok(Self::canonical(compact, pieces))
    }

    pub fn constant(compact: &CompactInterval, value: Rational) -> Self {
        StepFunction {
            pieces: vec![Piece {
                end: compact.endpoint().clone(),
                value,
            }],
            compact: compact.clone(),
        }
    }

    pub fn zero(compact: &CompactInterval) -> Self {
        Self::constant(compact, Rational::zero())
    }

    /// `value` on the listed spans, 0 elsewhere. Spans need not be sorted
    /// but must be disjoint.
    pub fn indicator_sum(compact: &CompactInterval, parts: &[(Span, Rational)]) -> Result<Self> {
        let mut parts: Vec<&(Span, Rational)> = parts.iter().collect();
        parts.sort_by(|a, b| a.0.hi.cmp(&b.0.hi));
        let mut pieces = Vec::new();
        let mut covered: Option<Ordinal> = None;
        for (span, value) in parts {
            compact.check_contains(&span.hi)?;
            let overlaps = match (&covered, &span.lo) {
                (Some(c), Some(lo)) => lo < c,
                (Some(_), None) => true,
                _ => false,
            };
            if overlaps {
                return Err(Error::InvalidArgument(format!("overlapping span {span}")));
            }
            if span.lo != covered {
                if let Some(lo) = &span.lo {
                    pieces.push(Piece {
                        end: lo.clone(),
                        value: Rational::zero(),
                    });
                }
            }
            pieces.push(Piece {
                end: span.hi.clone(),
                value: value.clone(),
            });
            covered = Some(span.hi.clone());
        }
        if covered.as_ref() != Some(compact.endpoint()) {
            pieces.push(Piece {
                end: compact.endpoint().clone(),
                value: Rational::zero(),
            });
        }
        Ok(Self::canonical(compact.clone(), pieces))
    }

    fn canonical(compact: CompactInterval, pieces: Vec<Piece>) -> Self {
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.value == p.value => last.end = p.end,
                _ => merged.push(p),
            }
        }
        StepFunction {
            compact,
            pieces: merged,
        }
    }

    pub fn compact(&self) -> &CompactInterval {
        &self.compact
    }

    pub fn cuts(&self) -> Vec<Ordinal> {
        self.pieces[..self.pieces.len() - 1]
            .iter()
            .map(|p| p.end.clone())
            .collect()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.pieces.iter().map(|p| p.value.clone()).collect()
    }

    fn spans(&self) -> impl Iterator<Item = (Span, &Rational)> + '_ {
        let mut prev: Option<Ordinal> = None;
        self.pieces.iter().map(move |p| {
            let span = Span::new(prev.replace(p.end.clone()), p.end.clone());
            (span, &p.value)
        })
    }

    pub fn eval(&self, point: &Ordinal) -> Result<Rational> {
        self.compact.check_contains(point)?;
        let idx = self.pieces.partition_point(|p| &p.end < point);
        Ok(self.pieces[idx].value.clone())
    }

    fn check_same(&self, other: &StepFunction) -> Result<()> {
        if self.compact != other.compact {
            return Err(Error::CompactMismatch {
                left: self.compact.endpoint().clone(),
                right: other.compact.endpoint().clone(),
            });
        }
        Ok(())
    }

    /// Pointwise combination over the common refinement of both partitions.
    pub fn zip_with(
        &self,
        other: &StepFunction,
        op: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<Self> {
        self.check_same(other)?;
        let mut pieces = Vec::with_capacity(self.pieces.len() + other.pieces.len());
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let a = &self.pieces[i];
            let b = &other.pieces[j];
            let end = std::cmp::min(&a.end, &b.end).clone();
            pieces.push(Piece {
                value: op(&a.value, &b.value),
                end: end.clone(),
            });
            if a.end == end {
                i += 1;
            }
            if b.end == end {
                j += 1;
            }
        }
        Ok(Self::canonical(self.compact.clone(), pieces))
    }

    pub fn sub(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                end: p.end.clone(),
                value: &p.value * factor,
            })
            .collect();
        Self::canonical(self.compact.clone(), pieces)
    }

    pub fn sup_norm(&self) -> Rational {
        self.pieces
            .iter()
            .map(|p| p.value.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `‖f − g‖∞` together with the set where it is attained.
    pub fn sup_norm_diff(&self, other: &StepFunction) -> Result<(Rational, ClopenUnion)> {
        let diff = self.sub(other)?.abs();
        let max = diff.sup_norm();
        let attained = diff.level_set(|v| *v == max)?;
        Ok((max, attained))
    }

    /// `{β : |f(β) − g(β)| ≥ θ}` for θ > 0.
    pub fn threshold_set(&self, other: &StepFunction, theta: &Rational) -> Result<ClopenUnion> {
        if !theta.is_positive() {
            return Err(Error::NonPositive("threshold"));
        }
        self.sub(other)?.abs().level_set(|v| v >= theta)
    }

    fn abs(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                end: p.end.clone(),
                value: p.value.abs(),
            })
            .collect();
        Self::canonical(self.compact.clone(), pieces)
    }

    fn level_set(&self, keep: impl Fn(&Rational) -> bool) -> Result<ClopenUnion> {
        let spans = self.spans().filter(|(_, v)| keep(v)).map(|(s, _)| s);
        ClopenUnion::from_spans(&self.compact, spans)
    }

    /// One derivation: the restriction to K′ re-read on `[0, β′]`.
    fn restrict_once(&self) -> Result<Self> {
        let derived = self.compact.derivative().ok_or(Error::EmptyDerivedSet)?;
        let mut pieces = Vec::new();
        let mut prev_limit: Option<Ordinal> = None;
        for p in &self.pieces {
            // Limits in (prev end, end] are those in (prev_limit, last_limit].
            let Some(last_limit) = p.end.floor_rank(1) else {
                continue;
            };
            if prev_limit.as_ref() == Some(&last_limit) {
                continue;
            }
            pieces.push(Piece {
                end: last_limit.to_derived_position().expect("limit ordinal"),
                value: p.value.clone(),
            });
            prev_limit = Some(last_limit);
        }
        debug_assert_eq!(pieces.last().map(|p| &p.end), Some(derived.endpoint()));
        Ok(Self::canonical(derived, pieces))
    }

    /// β ↦ f(β) on K^(i), expressed on the abstract interval for K^(i).
    pub fn restrict_to_derived(&self, order: u32) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.restrict_once()?;
        }
        Ok(f)
    }

    /// Values at one representative per piece, with the piece span.
    pub fn piece_spans(&self) -> Vec<(Span, Rational)> {
        self.spans().map(|(s, v)| (s, v.clone())).collect()
    }
}
