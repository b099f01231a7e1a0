//! Countable compacta `[0,β]` with exact Cantor-Bendixson derivatives.
//!
//! A derived set is exposed two ways: as the subset of the original
//! interval (points of rank ≥ i, see [`CompactInterval::point_in_derivative`])
//! and as a standalone interval `[0, β′]` obtained through the order
//! isomorphism ω·(1+ν) ↦ ν of [`Ordinal::to_derived_position`].

use std::fmt;

use crate::error::{Error, Result};
use crate::ordinal::{CbRank, Ordinal};

#[derive(Clone, Debug, Eq)]
pub struct CompactInterval {
    endpoint: Ordinal,
    /// Original endpoint and number of derivations taken from it.
    origin: Option<(Ordinal, u32)>,
}

impl PartialEq for CompactInterval {
    fn eq(&self, other: &Self) -> bool {
        self.endpoint == other.endpoint
    }
}

/// Derivation order σ(K).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SigmaValue {
    Finite(u32),
    Omega,
    /// Non-scattered compacta such as `[0,1]` or βℕ. Never produced from an
    /// interval; exists for the lower-bound table.
    Infinite,
}

impl fmt::Display for SigmaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaValue::Finite(n) => write!(f, "{n}"),
            SigmaValue::Omega => f.write_str("ω"),
            SigmaValue::Infinite => f.write_str("∞"),
        }
    }
}

/// Order of an iterated derivative: a natural or ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Finite(u32),
    Omega,
}

impl std::str::FromStr for Derivation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "omega" | "w" | "ω" => Ok(Derivation::Omega),
            t => t
                .parse()
                .map(Derivation::Finite)
                .map_err(|_| Error::InvalidArgument(format!("bad derivation order {s:?}"))),
        }
    }
}

impl CompactInterval {
    pub fn new(endpoint: Ordinal) -> Self {
        CompactInterval {
            endpoint,
            origin: None,
        }
    }

    pub fn endpoint(&self) -> &Ordinal {
        &self.endpoint
    }

    /// `(original endpoint, derivations)` when this interval is a derived set.
    pub fn origin(&self) -> Option<&(Ordinal, u32)> {
        self.origin.as_ref()
    }

    pub fn contains(&self, point: &Ordinal) -> bool {
        point <= &self.endpoint
    }

    pub fn check_contains(&self, point: &Ordinal) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(Error::OutsideCompact {
                point: point.clone(),
                endpoint: self.endpoint.clone(),
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.endpoint.is_finite()
    }

    /// Number of points, when finite.
    #[allow(clippy::len_without_is_empty)] // never empty: 0 is always a point
    pub fn len(&self) -> Option<u64> {
        self.endpoint.as_finite().map(|n| n + 1)
    }

    /// K′ as an abstract interval; `None` when K is finite.
    pub fn derivative(&self) -> Option<CompactInterval> {
        let last_limit = self.endpoint.floor_rank(1)?;
        let endpoint = last_limit.to_derived_position()?;
        let origin = match &self.origin {
            Some((o, n)) => (o.clone(), n + 1),
            None => (self.endpoint.clone(), 1),
        };
        Some(CompactInterval {
            endpoint,
            origin: Some(origin),
        })
    }

    pub fn iterated_derivative(&self, order: Derivation) -> Option<CompactInterval> {
        match order {
            Derivation::Finite(n) => {
                let mut current = self.clone();
                for _ in 0..n {
                    current = current.derivative()?;
                }
                Some(current)
            }
            // Only ω^ω survives every finite derivation.
            Derivation::Omega => self.endpoint.is_top().then(|| CompactInterval {
                endpoint: Ordinal::zero(),
                origin: Some((self.origin_endpoint().clone(), u32::MAX)),
            }),
        }
    }

    fn origin_endpoint(&self) -> &Ordinal {
        self.origin.as_ref().map_or(&self.endpoint, |(o, _)| o)
    }

    pub fn sigma(&self) -> SigmaValue {
        if self.endpoint.is_top() {
            SigmaValue::Omega
        } else {
            SigmaValue::Finite(self.endpoint.leading_exponent().unwrap_or(0))
        }
    }

    /// Cantor-Bendixson index σ(K)+1, the least α with K^(α) empty.
    pub fn cb_index(&self) -> Ordinal {
        match self.sigma() {
            SigmaValue::Finite(n) => Ordinal::finite(u64::from(n) + 1),
            _ => Ordinal::omega().succ(),
        }
    }

    /// Whether γ ∈ K^(i), viewing the derived set as a subset of K.
    pub fn point_in_derivative(&self, point: &Ordinal, order: u32) -> Result<bool> {
        self.check_contains(point)?;
        Ok(point.cb_point_rank() >= CbRank::Finite(order))
    }

    /// Points of K^(i) as a subset of K, ascending. Fails once more than
    /// `cap` points would be produced (in particular for infinite sets).
    pub fn derived_points(&self, order: u32, cap: usize) -> Result<Vec<Ordinal>> {
        let mut out = Vec::new();
        let mut cursor = self.endpoint.floor_rank(order);
        while let Some(point) = cursor {
            if out.len() >= cap {
                return Err(Error::TooManyPoints(cap));
            }
            cursor = point
                .prev_of_rank(order)
                .map_err(|_| Error::TooManyPoints(cap))?;
            out.push(point);
        }
        out.reverse();
        Ok(out)
    }

    /// Maps a point of K^(i) ⊂ K to its position in the abstract interval
    /// `iterated_derivative(i)`.
    pub fn derived_position(&self, point: &Ordinal, order: u32) -> Option<Ordinal> {
        let mut p = point.clone();
        for _ in 0..order {
            p = p.to_derived_position()?;
        }
        Some(p)
    }

    pub fn pretty(&self) -> String {
        format!("[0,{}]", self.endpoint.pretty())
    }
}

impl fmt::Display for CompactInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0,{}]", self.endpoint)
    }
}
