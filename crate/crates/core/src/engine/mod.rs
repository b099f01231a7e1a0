//! Distortion evaluation and refutation of candidate embeddings of
//! Δ≤k(ℕ) into C(K).
//!
//! A [`CandidateMap`] assigns a step function to every set of at most `k`
//! naturals. [`refute`] runs the derived-set descent: at each level it
//! pigeonholes singleton images on a finite set of points, descends one
//! Cantor-Bendixson level when a witness set misses the derived set, and at
//! the bottom evaluates a pair of disjoint full sets. Every failure of an
//! inequality is reported as a concrete [`RefutationWitness`] that
//! [`verify_witness`] rechecks from scratch.

mod bounds;
mod distortion;
mod refute;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clopen::Span;
use crate::compacta::CompactInterval;
use crate::delta::{enumerate_delta, DeltaPoint};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{self, Rational};
use crate::step::StepFunction;

pub use bounds::{
    eta, lower_bound_for_sigma, packing_bound, universality_obstruction, LowerBound,
    ObstructionReport,
};
pub use distortion::{distortion_of_sample, normalize_noncontractive, DistortionReport};
pub use refute::{
    aharoni_demo, refute, refute_with, verify_witness, EngineOutcome, InconclusiveReason,
    RefutationWitness, RefuteConfig, SetRef, TraceStep, Violation,
};

/// Image generator for sets not listed in a table. `None` means the point
/// lies outside what the generator covers.
pub type ImageFn = Arc<dyn Fn(&DeltaPoint) -> Result<Option<StepFunction>> + Send + Sync>;

/// Named image generators usable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum DefaultRule {
    /// Every set maps to 0.
    Zero,
    /// σ ↦ scale · Σ_{n∈σ} 1_{n}, the indicator of the isolated point n.
    Basis {
        #[serde(default = "one_str")]
        scale: String,
    },
    /// Fréchet coordinates over `enumerate_delta(k, window)`: point p_t sits
    /// at the ordinal t and carries d(σ,p_t) − d(∅,p_t); 0 elsewhere.
    Frechet { window: u64 },
}

fn one_str() -> String {
    "1".into()
}

impl DefaultRule {
    pub fn compile(&self, k: usize, compact: &CompactInterval) -> Result<ImageFn> {
        let compact = compact.clone();
        Ok(match self {
            DefaultRule::Zero => Arc::new(move |_| Ok(Some(StepFunction::zero(&compact)))),
            DefaultRule::Basis { scale } => {
                let scale = rational::parse(scale)?;
                Arc::new(move |sigma| basis_image(&compact, sigma, &scale))
            }
            DefaultRule::Frechet { window } => {
                let coords = enumerate_delta(k, *window);
                frechet_generator(&compact, coords)?
            }
        })
    }
}

/// The clopen piece holding only the finite ordinal n.
fn point_span(n: u64) -> Span {
    let lo = n.checked_sub(1).map(Ordinal::finite);
    Span::new(lo, Ordinal::finite(n))
}

pub fn basis_image(
    compact: &CompactInterval,
    sigma: &DeltaPoint,
    scale: &Rational,
) -> Result<Option<StepFunction>> {
    if sigma
        .elements()
        .iter()
        .any(|&n| !compact.contains(&Ordinal::finite(n)))
    {
        return Ok(None);
    }
    let parts: Vec<(Span, Rational)> = sigma
        .elements()
        .iter()
        .map(|&n| (point_span(n), scale.clone()))
        .collect();
    StepFunction::indicator_sum(compact, &parts).map(Some)
}

/// Isometric on `coords`: coordinate t lives at the isolated point t and
/// holds d(σ,p_t) − |p_t|.
pub fn frechet_generator(compact: &CompactInterval, coords: Vec<DeltaPoint>) -> Result<ImageFn> {
    if let Some(last) = coords.len().checked_sub(1) {
        compact.check_contains(&Ordinal::finite(last as u64))?;
    }
    let compact = compact.clone();
    Ok(Arc::new(move |sigma| {
        let parts: Vec<(Span, Rational)> = coords
            .iter()
            .enumerate()
            .map(|(t, p)| {
                let v = sigma.distance(p) as i64 - p.len() as i64;
                (point_span(t as u64), rational::int(v))
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        StepFunction::indicator_sum(&compact, &parts).map(Some)
    }))
}

/// A claimed embedding f: Δ≤k(ℕ) → C(K) in noncontractive form
/// `d(σ,τ) ≤ ‖f(σ)−f(τ)‖∞ ≤ D·d(σ,τ)`. Images are translated so that
/// f(∅) = 0.
#[derive(Clone)]
pub struct CandidateMap {
    k: usize,
    compact: CompactInterval,
    claimed_d: Rational,
    table: BTreeMap<DeltaPoint, StepFunction>,
    fallback: Option<ImageFn>,
    origin: Option<StepFunction>,
    scale: Rational,
}

impl fmt::Debug for CandidateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateMap")
            .field("k", &self.k)
            .field("compact", &self.compact)
            .field("claimed_d", &self.claimed_d)
            .field("table_len", &self.table.len())
            .field("has_fallback", &self.fallback.is_some())
            .finish()
    }
}

impl CandidateMap {
    pub fn new(
        k: usize,
        compact: CompactInterval,
        claimed_d: Rational,
        table: BTreeMap<DeltaPoint, StepFunction>,
        fallback: Option<ImageFn>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if claimed_d <= Rational::zero() {
            return Err(Error::NonPositive("claimed distortion"));
        }
        for (point, f) in &table {
            if point.len() > k {
                return Err(Error::InvalidArgument(format!(
                    "{point} has more than k={k} elements"
                )));
            }
            if f.compact() != &compact {
                return Err(Error::CompactMismatch {
                    left: compact.endpoint().clone(),
                    right: f.compact().endpoint().clone(),
                });
            }
        }
        let mut map = CandidateMap {
            k,
            compact,
            claimed_d,
            table,
            fallback,
            origin: None,
            scale: Rational::one(),
        };
        map.origin = map
            .raw_image(&DeltaPoint::empty())?
            .filter(|f| f.sup_norm() != Rational::zero());
        Ok(map)
    }

    /// Finite table only: points outside it are unknown.
    pub fn from_table(
        k: usize,
        compact: CompactInterval,
        claimed_d: Rational,
        table: BTreeMap<DeltaPoint, StepFunction>,
    ) -> Result<Self> {
        Self::new(k, compact, claimed_d, table, None)
    }

    pub fn from_fn(
        k: usize,
        compact: CompactInterval,
        claimed_d: Rational,
        f: ImageFn,
    ) -> Result<Self> {
        Self::new(k, compact, claimed_d, BTreeMap::new(), Some(f))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn compact(&self) -> &CompactInterval {
        &self.compact
    }

    pub fn claimed_d(&self) -> &Rational {
        &self.claimed_d
    }

    /// Points listed explicitly in the table.
    pub fn table_points(&self) -> impl Iterator<Item = &DeltaPoint> {
        self.table.keys()
    }

    pub fn with_claimed_d(mut self, claimed_d: Rational) -> Result<Self> {
        if claimed_d <= Rational::zero() {
            return Err(Error::NonPositive("claimed distortion"));
        }
        self.claimed_d = claimed_d;
        Ok(self)
    }

    /// Multiplies every image by `factor`.
    pub fn rescaled(mut self, factor: &Rational) -> Result<Self> {
        if factor <= &Rational::zero() {
            return Err(Error::NonPositive("scale factor"));
        }
        self.scale = &self.scale * factor;
        Ok(self)
    }

    fn raw_image(&self, sigma: &DeltaPoint) -> Result<Option<StepFunction>> {
        if let Some(f) = self.table.get(sigma) {
            return Ok(Some(f.clone()));
        }
        match &self.fallback {
            Some(g) => {
                let f = g(sigma)?;
                if let Some(f) = &f {
                    if f.compact() != &self.compact {
                        return Err(Error::CompactMismatch {
                            left: self.compact.endpoint().clone(),
                            right: f.compact().endpoint().clone(),
                        });
                    }
                }
                Ok(f)
            }
            None if sigma.is_empty() => Ok(Some(StepFunction::zero(&self.compact))),
            None => Ok(None),
        }
    }

    /// Normalized image of σ, or `None` when σ is outside the known domain.
    pub fn image(&self, sigma: &DeltaPoint) -> Result<Option<StepFunction>> {
        if sigma.len() > self.k {
            return Err(Error::InvalidArgument(format!(
                "{sigma} has more than k={} elements",
                self.k
            )));
        }
        let Some(f) = self.raw_image(sigma)? else {
            return Ok(None);
        };
        let f = match &self.origin {
            Some(o) => f.sub(o)?,
            None => f,
        };
        Ok(Some(if self.scale.is_one() {
            f
        } else {
            f.scale(&self.scale)
        }))
    }

    pub fn require_image(&self, sigma: &DeltaPoint) -> Result<StepFunction> {
        self.image(sigma)?
            .ok_or_else(|| Error::MissingImage(sigma.to_string()))
    }

    /// σ ↦ scale · Σ 1_{n}.
    pub fn basis(
        k: usize,
        compact: CompactInterval,
        claimed_d: Rational,
        scale: Rational,
    ) -> Result<Self> {
        let rule = DefaultRule::Basis {
            scale: rational::format(&scale),
        };
        let f = rule.compile(k, &compact)?;
        Self::from_fn(k, compact, claimed_d, f)
    }

    /// Fréchet coordinates over `coords`. With `total`, every set gets an
    /// image from the same formula; otherwise only `coords` are known.
    pub fn frechet(
        k: usize,
        compact: CompactInterval,
        claimed_d: Rational,
        coords: Vec<DeltaPoint>,
        total: bool,
    ) -> Result<Self> {
        let g = frechet_generator(&compact, coords.clone())?;
        if total {
            return Self::from_fn(k, compact, claimed_d, g);
        }
        let mut table = BTreeMap::new();
        for p in coords {
            let f = g(&p)?.expect("Fréchet generator is total");
            table.insert(p, f);
        }
        Self::from_table(k, compact, claimed_d, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn kw() -> CompactInterval {
        CompactInterval::new(Ordinal::omega())
    }

    fn p(v: &[u64]) -> DeltaPoint {
        DeltaPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn basis_images() {
        let m = CandidateMap::basis(2, kw(), ratio(19, 10), int(1)).unwrap();
        let f = m.require_image(&p(&[0, 2])).unwrap();
        assert_eq!(f.eval(&Ordinal::finite(0)).unwrap(), int(1));
        assert_eq!(f.eval(&Ordinal::finite(1)).unwrap(), int(0));
        assert_eq!(f.eval(&Ordinal::finite(2)).unwrap(), int(1));
        assert_eq!(f.eval(&Ordinal::omega()).unwrap(), int(0));
        assert!(m.image(&p(&[0, 1, 2])).is_err());
    }

    #[test]
    fn origin_is_translated_to_zero() {
        let kk = kw();
        let mut table = BTreeMap::new();
        table.insert(DeltaPoint::empty(), StepFunction::constant(&kk, int(5)));
        table.insert(p(&[1]), StepFunction::constant(&kk, int(6)));
        let m = CandidateMap::from_table(1, kk.clone(), int(2), table).unwrap();
        assert_eq!(
            m.require_image(&DeltaPoint::empty()).unwrap(),
            StepFunction::zero(&kk)
        );
        assert_eq!(
            m.require_image(&p(&[1])).unwrap(),
            StepFunction::constant(&kk, int(1))
        );
        assert!(m.image(&p(&[2])).unwrap().is_none());
    }

    #[test]
    fn frechet_is_isometric_on_window() {
        let coords = enumerate_delta(2, 4);
        let m = CandidateMap::frechet(2, kw(), int(1), coords.clone(), false).unwrap();
        for a in &coords {
            for b in &coords {
                let d = m
                    .require_image(a)
                    .unwrap()
                    .sup_norm_diff(&m.require_image(b).unwrap())
                    .unwrap()
                    .0;
                assert_eq!(d, int(a.distance(b) as i64));
            }
        }
        assert!(m.image(&p(&[7])).unwrap().is_none());
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(CandidateMap::from_table(2, kw(), int(0), BTreeMap::new()).is_err());
        let mut table = BTreeMap::new();
        table.insert(
            p(&[1]),
            StepFunction::zero(&CompactInterval::new(Ordinal::finite(3))),
        );
        assert!(CandidateMap::from_table(2, kw(), int(2), table).is_err());
    }

    #[test]
    fn default_rule_json() {
        let r: DefaultRule = serde_json::from_str(r#"{"generator":"basis","scale":"4"}"#).unwrap();
        assert_eq!(r, DefaultRule::Basis { scale: "4".into() });
        let r: DefaultRule = serde_json::from_str(r#"{"generator":"frechet","window":4}"#).unwrap();
        assert_eq!(r, DefaultRule::Frechet { window: 4 });
        let r: DefaultRule = serde_json::from_str(r#"{"generator":"basis"}"#).unwrap();
        assert_eq!(r, DefaultRule::Basis { scale: "1".into() });
    }
}
