//! Restricting a near-isometric embedding of c00 ⊂ ℓ1 from C(K) to C(K′),
//! and locating the limit point that carries the lower bound down.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::clopen::{ClopenUnion, Span};
use crate::compacta::CompactInterval;
use crate::delta::SparseVector;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{self, Rational};
use crate::step::StepFunction;

/// Finitely many values of a map g: c00 → C(K) with
/// `‖x−y‖₁/(1+ε′) ≤ ‖g(x)−g(y)‖∞ ≤ ‖x−y‖₁` expected on disjoint pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSample {
    compact: CompactInterval,
    epsilon_prime: Rational,
    table: BTreeMap<SparseVector, StepFunction>,
}

impl EmbeddingSample {
    pub fn new(
        compact: CompactInterval,
        epsilon_prime: Rational,
        table: BTreeMap<SparseVector, StepFunction>,
    ) -> Result<Self> {
        if epsilon_prime.is_negative() {
            return Err(Error::InvalidArgument("ε′ must be non-negative".into()));
        }
        for f in table.values() {
            if f.compact() != &compact {
                return Err(Error::CompactMismatch {
                    left: compact.endpoint().clone(),
                    right: f.compact().endpoint().clone(),
                });
            }
        }
        Ok(EmbeddingSample {
            compact,
            epsilon_prime,
            table,
        })
    }

    pub fn compact(&self) -> &CompactInterval {
        &self.compact
    }

    pub fn epsilon_prime(&self) -> &Rational {
        &self.epsilon_prime
    }

    pub fn table(&self) -> &BTreeMap<SparseVector, StepFunction> {
        &self.table
    }

    pub fn image(&self, x: &SparseVector) -> Result<&StepFunction> {
        self.table
            .get(x)
            .ok_or_else(|| Error::MissingImage(x.to_string()))
    }

    /// Pairs whose image distance leaves `[‖x−y‖₁/(1+ε′), ‖x−y‖₁]`.
    pub fn bound_violations(&self) -> Result<Vec<(SparseVector, SparseVector)>> {
        let lower_factor = Rational::one() / (Rational::one() + &self.epsilon_prime);
        let entries: Vec<_> = self.table.iter().collect();
        let mut out = Vec::new();
        for (a, (x, fx)) in entries.iter().enumerate() {
            for (y, fy) in &entries[a + 1..] {
                let d = x.sub(y).l1_norm();
                let (m, _) = fx.sup_norm_diff(fy)?;
                if m > d || m < &d * &lower_factor {
                    out.push(((*x).clone(), (*y).clone()));
                }
            }
        }
        Ok(out)
    }
}

/// The piece (ω·t, ω·(t+1)], or [0,ω] for t = 0.
fn block(t: u64) -> Span {
    let lo = (t > 0).then(|| Ordinal::monomial(1, t));
    Span::new(lo, Ordinal::monomial(1, t + 1))
}

/// Fréchet coordinates for `vectors`: coordinate t is constant on the block
/// (ω·t, ω·(t+1)] with value ‖x−v_t‖₁ − ‖v_t‖₁, and the tail is 0. Every
/// block contains a limit point, so the sample survives one derivation.
pub fn frechet_sample(
    compact: CompactInterval,
    epsilon_prime: Rational,
    vectors: &[SparseVector],
) -> Result<EmbeddingSample> {
    compact.check_contains(&Ordinal::monomial(1, vectors.len().max(1) as u64))?;
    let mut table = BTreeMap::new();
    for x in vectors.iter().chain(std::iter::once(&SparseVector::zero())) {
        let parts: Vec<(Span, Rational)> = vectors
            .iter()
            .enumerate()
            .map(|(t, v)| (block(t as u64), x.sub(v).l1_norm() - v.l1_norm()))
            .filter(|(_, q)| !q.is_zero())
            .collect();
        table.insert(x.clone(), StepFunction::indicator_sum(&compact, &parts)?);
    }
    EmbeddingSample::new(compact, epsilon_prime, table)
}

/// f(x) = g(x) restricted to K′, re-read on the abstract interval of K′.
pub fn restrict_embedding(sample: &EmbeddingSample) -> Result<EmbeddingSample> {
    restrict_embedding_to(sample, 1)
}

/// Restriction to K^(order) in one step.
pub fn restrict_embedding_to(sample: &EmbeddingSample, order: u32) -> Result<EmbeddingSample> {
    let Some(derived) = sample
        .compact
        .iterated_derivative(crate::compacta::Derivation::Finite(order))
    else {
        return Err(Error::EmptyDerivedSet);
    };
    let mut table = BTreeMap::new();
    for (x, f) in &sample.table {
        table.insert(x.clone(), f.restrict_to_derived(order)?);
    }
    EmbeddingSample::new(derived, sample.epsilon_prime.clone(), table)
}

fn lower_threshold(epsilon_prime: &Rational, distance: &Rational) -> Rational {
    (Rational::one() - rational::int(2) * epsilon_prime) * distance
        / (Rational::one() + epsilon_prime)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCheck {
    pub x: SparseVector,
    pub y: SparseVector,
    pub distance: Rational,
    pub measured: Rational,
    /// (1−2ε′)‖x−y‖₁/(1+ε′)
    pub threshold: Rational,
    pub slack: Rational,
    pub holds: bool,
}

/// For each disjoint-support pair, compares ‖f(x)−f(y)‖∞ with
/// (1−2ε′)‖x−y‖₁/(1+ε′).
pub fn check_disjoint_lower_bound(
    sample: &EmbeddingSample,
    pairs: &[(SparseVector, SparseVector)],
) -> Result<Vec<PairCheck>> {
    let mut out = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if let Some(i) = x.shared_index(y) {
            return Err(Error::OverlappingSupports(i));
        }
        let (measured, _) = sample.image(x)?.sup_norm_diff(sample.image(y)?)?;
        let distance = x.sub(y).l1_norm();
        let threshold = lower_threshold(&sample.epsilon_prime, &distance);
        let slack = &measured - &threshold;
        out.push(PairCheck {
            x: x.clone(),
            y: y.clone(),
            distance,
            holds: !slack.is_negative(),
            measured,
            threshold,
            slack,
        });
    }
    Ok(out)
}

/// One inequality of the chain evaluated at β₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainValue {
    pub label: &'static str,
    pub value: Rational,
    pub threshold: Rational,
}

impl ChainValue {
    pub fn slack(&self) -> Rational {
        &self.value - &self.threshold
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Beta0Report {
    pub beta0: Ordinal,
    pub b: ClopenUnion,
    /// The window pair (i, j) whose threshold set contains β₀.
    pub pair: (u64, u64),
    pub chain: Vec<ChainValue>,
}

/// The three smallest naturals outside both supports.
pub fn default_window(x: &SparseVector, y: &SparseVector) -> Vec<u64> {
    (0..)
        .filter(|n| x.get(*n).is_zero() && y.get(*n).is_zero())
        .take(3)
        .collect()
}

/// B = ⋃_{i≠j} {β : |g(x+δe_i)(β) − g(y+δe_j)(β)| ≥ 3δ/(1+ε′)} over window
/// pairs; β₀ is the least limit point of B. The chain at β₀ is
/// recomputed from the table and must hold exactly.
pub fn locate_beta0(
    sample: &EmbeddingSample,
    x: &SparseVector,
    y: &SparseVector,
    delta: &Rational,
    window: &[u64],
) -> Result<Beta0Report> {
    if let Some(i) = x.shared_index(y) {
        return Err(Error::OverlappingSupports(i));
    }
    if !delta.is_positive() {
        return Err(Error::NonPositive("δ"));
    }
    if &x.sub(y).l1_norm() != delta {
        return Err(Error::InvalidArgument(format!(
            "‖x−y‖₁ ≠ δ = {}",
            rational::format(delta)
        )));
    }
    if let Some(n) = window
        .iter()
        .find(|n| !x.get(**n).is_zero() || !y.get(**n).is_zero())
    {
        return Err(Error::InvalidArgument(format!(
            "window index {n} lies in a support"
        )));
    }
    let eps = &sample.epsilon_prime;
    let denom = Rational::one() + eps;
    let t3 = rational::int(3) * delta / &denom;
    let t5 = (rational::int(2) - eps) * delta / &denom;
    let t6 = lower_threshold(eps, delta);

    let shifted = |v: &SparseVector, n: u64| v.add(&SparseVector::basis(n, delta.clone()));
    let mut b = ClopenUnion::empty(&sample.compact);
    let mut pieces = Vec::new();
    for &i in window {
        for &j in window {
            if i == j {
                continue;
            }
            let gi = sample.image(&shifted(x, i))?;
            let gj = sample.image(&shifted(y, j))?;
            let set = gi.threshold_set(gj, &t3)?;
            b = b.union(&set)?;
            pieces.push(((i, j), set));
        }
    }
    let beta0 = b.first_of_rank(1).ok_or(Error::InsufficientWindow)?;
    let (pair, _) = pieces
        .iter()
        .find(|(_, s)| s.contains(&beta0))
        .ok_or_else(|| Error::Internal("β₀ not in any threshold set".into()))?;
    let (i, j) = *pair;

    let gap = |a: &StepFunction, c: &StepFunction| -> Result<Rational> {
        Ok((a.eval(&beta0)? - c.eval(&beta0)?).abs())
    };
    let chain = vec![
        ChainValue {
            label: "|g(x+δe_i)(β₀) − g(y+δe_j)(β₀)| ≥ 3δ/(1+ε′)",
            value: gap(sample.image(&shifted(x, i))?, sample.image(&shifted(y, j))?)?,
            threshold: t3,
        },
        ChainValue {
            label: "|g(δe_i)(β₀) − g(δe_j)(β₀)| ≥ (2−ε′)δ/(1+ε′)",
            value: gap(
                sample.image(&SparseVector::basis(i, delta.clone()))?,
                sample.image(&SparseVector::basis(j, delta.clone()))?,
            )?,
            threshold: t5,
        },
        ChainValue {
            label: "|g(x)(β₀) − g(y)(β₀)| ≥ (1−2ε′)δ/(1+ε′)",
            value: gap(sample.image(x)?, sample.image(y)?)?,
            threshold: t6,
        },
    ];
    if let Some(bad) = chain.iter().find(|c| c.value < c.threshold) {
        return Err(Error::ChainViolated(format!(
            "{} fails at β₀ = {}: {} < {}",
            bad.label,
            beta0.pretty(),
            rational::format(&bad.value),
            rational::format(&bad.threshold)
        )));
    }
    Ok(Beta0Report {
        beta0,
        b,
        pair: (i, j),
        chain,
    })
}

/// Half of the boundary solution t* = ε/(3+2ε) of (1−2t)/(1+t) = 1/(1+ε),
/// so that (1−2ε′)/(1+ε′) > 1/(1+ε) strictly.
pub fn epsilon_prime_for(epsilon: &Rational) -> Result<Rational> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositive("ε"));
    }
    let t_star = epsilon / (rational::int(3) + rational::int(2) * epsilon);
    Ok(t_star / rational::int(2))
}

/// The vectors a window run of [`locate_beta0`] reads: x, y, x+δe_i,
/// y+δe_i and δe_i for i in the window.
pub fn chain_vectors(
    x: &SparseVector,
    y: &SparseVector,
    delta: &Rational,
    window: &[u64],
) -> Vec<SparseVector> {
    let mut out = vec![x.clone(), y.clone()];
    for &i in window {
        let e = SparseVector::basis(i, delta.clone());
        out.push(x.add(&e));
        out.push(y.add(&e));
        out.push(e);
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn kw2() -> CompactInterval {
        CompactInterval::new(Ordinal::monomial(2, 1))
    }

    fn xy() -> (SparseVector, SparseVector) {
        (
            SparseVector::from_entries([(0, int(1))]),
            SparseVector::from_entries([(1, ratio(1, 2)), (2, ratio(-1, 2))]),
        )
    }

    #[test]
    fn epsilon_prime_examples() {
        assert_eq!(epsilon_prime_for(&int(1)).unwrap(), ratio(1, 10));
        assert_eq!(epsilon_prime_for(&int(3)).unwrap(), ratio(1, 6));
        let e = ratio(1, 100);
        let ep = epsilon_prime_for(&e).unwrap();
        assert!(ep < ratio(1, 300));
        let one = Rational::one();
        assert!((&one - int(2) * &ep) / (&one + &ep) > &one / (&one + &e));
        assert!(epsilon_prime_for(&int(0)).is_err());
    }

    #[test]
    fn lower_bound_threshold() {
        let sample =
            frechet_sample(kw2(), ratio(1, 10), &[SparseVector::basis(0, int(1))]).unwrap();
        let x = SparseVector::basis(0, int(1));
        let checks =
            check_disjoint_lower_bound(&sample, &[(x.clone(), SparseVector::zero())]).unwrap();
        assert_eq!(checks[0].threshold, ratio(8, 11));
        assert!(checks[0].holds);
        assert!(matches!(
            check_disjoint_lower_bound(&sample, &[(x.clone(), x)]),
            Err(Error::OverlappingSupports(0))
        ));
    }

    #[test]
    fn frechet_sample_is_isometric() {
        let (x, y) = xy();
        let delta = x.sub(&y).l1_norm();
        let vs = chain_vectors(&x, &y, &delta, &default_window(&x, &y));
        let s = frechet_sample(kw2(), int(0), &vs).unwrap();
        assert!(s.bound_violations().unwrap().is_empty());
        let checks = check_disjoint_lower_bound(&s, &[(x, y)]).unwrap();
        assert_eq!(checks[0].slack, int(0));
    }

    #[test]
    fn beta0_is_a_limit_point() {
        let (x, y) = xy();
        let delta = x.sub(&y).l1_norm();
        assert_eq!(delta, int(2));
        let window = default_window(&x, &y);
        assert_eq!(window, vec![3, 4, 5]);
        let s = frechet_sample(kw2(), int(0), &chain_vectors(&x, &y, &delta, &window)).unwrap();
        let r = locate_beta0(&s, &x, &y, &delta, &window).unwrap();
        assert!(s.compact().point_in_derivative(&r.beta0, 1).unwrap());
        assert!(r.chain.iter().all(|c| c.slack() >= int(0)));
        assert_eq!(r.chain[2].threshold, delta);
    }

    #[test]
    fn empty_window_is_insufficient() {
        let (x, y) = xy();
        let delta = int(2);
        let s = frechet_sample(kw2(), int(0), &chain_vectors(&x, &y, &delta, &[3])).unwrap();
        assert!(matches!(
            locate_beta0(&s, &x, &y, &delta, &[3]),
            Err(Error::InsufficientWindow)
        ));
    }

    #[test]
    fn restriction_needs_infinite_compact() {
        let k = CompactInterval::new(Ordinal::finite(5));
        let s = EmbeddingSample::new(
            k.clone(),
            int(0),
            BTreeMap::from([(SparseVector::zero(), StepFunction::zero(&k))]),
        )
        .unwrap();
        assert!(matches!(
            restrict_embedding(&s),
            Err(Error::EmptyDerivedSet)
        ));
    }

    #[test]
    fn restriction_keeps_upper_bound() {
        let (x, y) = xy();
        let delta = int(2);
        let s = frechet_sample(kw2(), int(0), &chain_vectors(&x, &y, &delta, &[3, 4, 5])).unwrap();
        let r = restrict_embedding(&s).unwrap();
        assert_eq!(r.compact().endpoint(), &Ordinal::omega());
        for (a, fa) in r.table() {
            for (b, fb) in r.table() {
                assert!(fa.sup_norm_diff(fb).unwrap().0 <= a.sub(b).l1_norm());
            }
        }
        let twice = restrict_embedding(&r).unwrap();
        assert_eq!(twice, restrict_embedding_to(&s, 2).unwrap());
    }
}
