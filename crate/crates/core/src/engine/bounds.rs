use std::fmt;

use num::{BigInt, BigUint, One, Signed, ToPrimitive, Zero};

use crate::compacta::{CompactInterval, SigmaValue};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Separation margin η = 2k − 2(k−1)D; positive iff D < k/(k−1).
pub fn eta(k: usize, claimed_d: &Rational) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("η needs k ≥ 2, got {k}")));
    }
    let k = rational::int(k as i64);
    Ok(&k * rational::int(2) - rational::int(2) * (&k - Rational::one()) * claimed_d)
}

/// Maximum size of a family in [−D,D]^d that is pairwise η-separated in the
/// sup norm: (⌊2D/η⌋+1)^d. A larger family has two members closer than η
/// in every coordinate.
pub fn packing_bound(d: &Rational, eta: &Rational, dim: usize) -> Result<BigUint> {
    if !d.is_positive() {
        return Err(Error::NonPositive("D"));
    }
    if !eta.is_positive() {
        return Err(Error::NonPositive("η"));
    }
    let per_axis: BigInt = rational::floor(&(rational::int(2) * d / eta)) + 1;
    let per_axis = per_axis.to_biguint().expect("positive");
    Ok(num::pow(per_axis, dim))
}

/// Lower bound on the C(K)-distortion of separable Banach spaces implied
/// by the derivation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerBound {
    Value(Rational),
    /// σ = 0: K is finite, C(K) is finite dimensional, no bi-Lipschitz
    /// embedding of an infinite bounded separated space exists.
    Unembeddable,
}

impl fmt::Display for LowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerBound::Value(q) => f.write_str(&rational::format(q)),
            LowerBound::Unembeddable => f.write_str("∞"),
        }
    }
}

pub fn lower_bound_for_sigma(sigma: SigmaValue) -> LowerBound {
    match sigma {
        SigmaValue::Finite(0) => LowerBound::Unembeddable,
        SigmaValue::Finite(m) => LowerBound::Value(rational::ratio(i64::from(m) + 1, i64::from(m))),
        SigmaValue::Omega | SigmaValue::Infinite => LowerBound::Value(Rational::one()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub sigma: SigmaValue,
    pub bound: LowerBound,
    /// Almost isometric universality is only possible when σ(K) ≥ ω.
    pub ai_universal_possible: bool,
}

pub fn universality_obstruction(compact: &CompactInterval) -> ObstructionReport {
    let sigma = compact.sigma();
    ObstructionReport {
        sigma,
        bound: lower_bound_for_sigma(sigma),
        ai_universal_possible: sigma >= SigmaValue::Omega,
    }
}

/// Convenience for small bounds.
pub(crate) fn bound_as_usize(b: &BigUint) -> Option<usize> {
    if b.is_zero() {
        Some(0)
    } else {
        b.to_usize()
    }
}
