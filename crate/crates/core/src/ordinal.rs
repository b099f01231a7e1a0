//! Ordinals up to ω^ω in Cantor normal form.
//!
//! An [`Ordinal`] is either the distinguished top element ω^ω or a finite
//! sum ω^e₁·c₁ + … + ω^eₘ·cₘ with e₁ > … > eₘ ≥ 0 and every cᵢ ≥ 1. The
//! representation is canonical, so structural equality is ordinal equality.
//!
//! Literals use ASCII: `w^2*3+w+4`, `w^w`, `0`. [`Ordinal::pretty`] renders
//! the same value with ω and ·.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Cnf(Vec<Term>),
    Top,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordinal(Repr);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor,
    Limit,
}

/// How many Cantor-Bendixson derivations a point survives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CbRank {
    Finite(u32),
    Omega,
}

impl fmt::Display for CbRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CbRank::Finite(n) => write!(f, "{n}"),
            CbRank::Omega => f.write_str("ω"),
        }
    }
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Repr::Cnf(Vec::new()))
    }

    pub fn finite(n: u64) -> Self {
        Self::monomial(0, n)
    }

    pub fn omega() -> Self {
        Self::monomial(1, 1)
    }

    /// ω^ω.
    pub fn top() -> Self {
        Ordinal(Repr::Top)
    }

    /// ω^exponent · coefficient (zero when the coefficient is zero).
    pub fn monomial(exponent: u32, coefficient: u64) -> Self {
        if coefficient == 0 {
            Self::zero()
        } else {
            Ordinal(Repr::Cnf(vec![Term {
                exponent,
                coefficient,
            }]))
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs in CNF order.
    pub fn from_terms(terms: &[(u32, u64)]) -> Result<Self> {
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for &(exponent, coefficient) in terms {
            if coefficient == 0 {
                return Err(Error::ParseOrdinal {
                    input: format!("{terms:?}"),
                    reason: "zero coefficient".into(),
                });
            }
            if let Some(prev) = out.last() {
                if prev.exponent <= exponent {
                    return Err(Error::ParseOrdinal {
                        input: format!("{terms:?}"),
                        reason: "exponents must be strictly decreasing".into(),
                    });
                }
            }
            out.push(Term {
                exponent,
                coefficient,
            });
        }
        Ok(Ordinal(Repr::Cnf(out)))
    }

    fn cnf(terms: Vec<Term>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].exponent > w[1].exponent));
        debug_assert!(terms.iter().all(|t| t.coefficient > 0));
        Ordinal(Repr::Cnf(terms))
    }

    /// CNF terms; `None` for ω^ω.
    pub fn terms(&self) -> Option<&[Term]> {
        match &self.0 {
            Repr::Cnf(t) => Some(t),
            Repr::Top => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self.0, Repr::Top)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Cnf(t) if t.is_empty())
    }

    pub fn as_finite(&self) -> Option<u64> {
        match &self.0 {
            Repr::Cnf(t) => match t.as_slice() {
                [] => Some(0),
                [Term {
                    exponent: 0,
                    coefficient,
                }] => Some(*coefficient),
                _ => None,
            },
            Repr::Top => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    /// Leading CNF exponent; `None` for 0 and for ω^ω.
    pub fn leading_exponent(&self) -> Option<u32> {
        self.terms().and_then(|t| t.first()).map(|t| t.exponent)
    }

    pub fn classify(&self) -> Kind {
        match &self.0 {
            Repr::Top => Kind::Limit,
            Repr::Cnf(t) => match t.last() {
                None => Kind::Zero,
                Some(last) if last.exponent == 0 => Kind::Successor,
                Some(_) => Kind::Limit,
            },
        }
    }

    /// Smallest CNF exponent (0 for zero and successors, ω for ω^ω).
    pub fn cb_point_rank(&self) -> CbRank {
        match &self.0 {
            Repr::Top => CbRank::Omega,
            Repr::Cnf(t) => CbRank::Finite(t.last().map_or(0, |l| l.exponent)),
        }
    }

    /// Shifts every exponent down by one after dropping the finite part.
    /// `None` below ω; ω^ω maps to itself.
    pub fn div_omega(&self) -> Option<Ordinal> {
        match &self.0 {
            Repr::Top => Some(Self::top()),
            Repr::Cnf(t) => {
                let shifted: Vec<Term> = t
                    .iter()
                    .filter(|term| term.exponent > 0)
                    .map(|term| Term {
                        exponent: term.exponent - 1,
                        coefficient: term.coefficient,
                    })
                    .collect();
                if shifted.is_empty() {
                    None
                } else {
                    Some(Self::cnf(shifted))
                }
            }
        }
    }

    /// α + 1.
    pub fn succ(&self) -> Ordinal {
        match &self.0 {
            Repr::Top => panic!("ω^ω+1 is outside the representable range"),
            Repr::Cnf(t) => {
                let mut t = t.clone();
                match t.last_mut() {
                    Some(last) if last.exponent == 0 => last.coefficient += 1,
                    _ => t.push(Term {
                        exponent: 0,
                        coefficient: 1,
                    }),
                }
                Self::cnf(t)
            }
        }
    }

    /// Largest ordinal ≤ self whose point rank is at least `rank`: the CNF
    /// truncated to exponents ≥ `rank`. `None` when that is 0 and `rank > 0`,
    /// since 0 only has rank 0.
    pub fn floor_rank(&self, rank: u32) -> Option<Ordinal> {
        match &self.0 {
            Repr::Top => Some(Self::top()),
            Repr::Cnf(t) => {
                if rank == 0 {
                    return Some(self.clone());
                }
                let kept: Vec<Term> = t.iter().copied().filter(|x| x.exponent >= rank).collect();
                if kept.is_empty() {
                    None
                } else {
                    Some(Self::cnf(kept))
                }
            }
        }
    }

    /// Smallest ordinal strictly above `self` with point rank ≥ `rank`.
    pub fn next_of_rank(&self, rank: u32) -> Ordinal {
        match &self.0 {
            Repr::Top => panic!("nothing lies above ω^ω"),
            Repr::Cnf(t) => {
                let mut kept: Vec<Term> =
                    t.iter().copied().filter(|x| x.exponent >= rank).collect();
                match kept.last_mut() {
                    Some(last) if last.exponent == rank => last.coefficient += 1,
                    _ => kept.push(Term {
                        exponent: rank,
                        coefficient: 1,
                    }),
                }
                Self::cnf(kept)
            }
        }
    }

    /// Largest ordinal strictly below `self` with point rank ≥ `rank`, if it
    /// exists. `Err(())` when `self` is a limit of such points (no
    /// predecessor in that order).
    pub(crate) fn prev_of_rank(&self, rank: u32) -> std::result::Result<Option<Ordinal>, ()> {
        let t = match &self.0 {
            Repr::Top => return Err(()),
            Repr::Cnf(t) => t,
        };
        let Some(last) = t.last() else {
            return Ok(None);
        };
        if last.exponent > rank {
            return Err(());
        }
        let mut t = t.clone();
        if last.exponent < rank {
            // self does not have the rank: step to the floor.
            t.retain(|x| x.exponent >= rank);
            let floor = Self::cnf(t);
            return Ok(if floor.is_zero() && rank > 0 {
                None
            } else {
                Some(floor)
            });
        }
        let lastm = t.last_mut().unwrap();
        if lastm.coefficient > 1 {
            lastm.coefficient -= 1;
        } else {
            t.pop();
        }
        let prev = Self::cnf(t);
        Ok(if prev.is_zero() && rank > 0 {
            None
        } else {
            Some(prev)
        })
    }

    /// Position of a limit ordinal among the limit ordinals: ω·(1+ν) ↦ ν.
    /// This is the order isomorphism from the derived set of `[0,β]` onto
    /// `[0, β′]`. Returns `None` for zero and successors.
    pub fn to_derived_position(&self) -> Option<Ordinal> {
        if self.classify() != Kind::Limit {
            return None;
        }
        let quotient = self.div_omega()?;
        Some(match quotient.as_finite() {
            Some(n) => Self::finite(n - 1),
            None => quotient,
        })
    }

    /// Inverse of [`Ordinal::to_derived_position`].
    pub fn from_derived_position(&self) -> Ordinal {
        match &self.0 {
            Repr::Top => Self::top(),
            Repr::Cnf(_) if self.is_finite() => Self::monomial(1, self.as_finite().unwrap() + 1),
            Repr::Cnf(t) => Self::cnf(
                t.iter()
                    .map(|x| Term {
                        exponent: x.exponent + 1,
                        coefficient: x.coefficient,
                    })
                    .collect(),
            ),
        }
    }

    /// Unicode rendering: `ω^2·3+ω+4`.
    pub fn pretty(&self) -> String {
        self.render("ω", "·")
    }

    fn render(&self, w: &str, times: &str) -> String {
        let t = match &self.0 {
            Repr::Top => return format!("{w}^{w}"),
            Repr::Cnf(t) => t,
        };
        if t.is_empty() {
            return "0".into();
        }
        t.iter()
            .map(|term| {
                let base = match term.exponent {
                    0 => return term.coefficient.to_string(),
                    1 => w.to_string(),
                    e => format!("{w}^{e}"),
                };
                if term.coefficient == 1 {
                    base
                } else {
                    format!("{base}{times}{}", term.coefficient)
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Top, Repr::Top) => Ordering::Equal,
            (Repr::Top, _) => Ordering::Greater,
            (_, Repr::Top) => Ordering::Less,
            // Term orders by (exponent, coefficient), so lexicographic Vec
            // order is exactly CNF order.
            (Repr::Cnf(a), Repr::Cnf(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("w", "*"))
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: &str| Error::ParseOrdinal {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let text: String = input.trim().replace('ω', "w").replace('·', "*");
        if text.is_empty() {
            return Err(fail("empty literal"));
        }
        if text == "0" {
            return Ok(Self::zero());
        }
        if text == "w^w" {
            return Ok(Self::top());
        }
        let mut terms: Vec<(u32, u64)> = Vec::new();
        for piece in text.split('+') {
            terms.push(parse_term(piece).map_err(|r| fail(&r))?);
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(fail("zero coefficient"));
        }
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(fail("exponents must be strictly decreasing"));
        }
        Self::from_terms(&terms)
    }
}

fn parse_natural<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal natural, found {s:?}"));
    }
    s.parse().map_err(|_| format!("number {s:?} out of range"))
}

fn parse_term(piece: &str) -> std::result::Result<(u32, u64), String> {
    let Some(rest) = piece.strip_prefix('w') else {
        return Ok((0, parse_natural(piece)?));
    };
    let (exponent, rest) = match rest.strip_prefix('^') {
        Some(r) => {
            let end = r.find('*').unwrap_or(r.len());
            if &r[..end] == "w" {
                return Err("w^w may only appear alone".into());
            }
            (parse_natural::<u32>(&r[..end])?, &r[end..])
        }
        None => (1, rest),
    };
    let coefficient = match rest {
        "" => 1,
        r => match r.strip_prefix('*') {
            Some(c) => parse_natural(c)?,
            None => return Err(format!("unexpected {r:?}")),
        },
    };
    Ok((exponent, coefficient))
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
