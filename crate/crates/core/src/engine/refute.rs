use std::collections::HashMap;
use std::fmt;

use num::{BigInt, BigUint, Signed};

use super::bounds::{bound_as_usize, eta, packing_bound};
use super::CandidateMap;
use crate::clopen::ClopenUnion;
use crate::compacta::SigmaValue;
use crate::delta::{index_grid, DeltaPoint};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{self, Rational};
use crate::step::StepFunction;

#[derive(Clone, Debug)]
pub struct RefuteConfig {
    /// First singleton window scanned by each pigeonhole step.
    pub initial_window: usize,
    /// The window doubles up to this many indices per family.
    pub max_window: usize,
    /// Largest finite point set enumerated at any level.
    pub max_points: usize,
}

impl Default for RefuteConfig {
    fn default() -> Self {
        RefuteConfig {
            initial_window: 8,
            max_window: 1024,
            max_points: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// ‖f(σ)−f(τ)‖ < d(σ,τ)
    Lower,
    /// ‖f(σ)−f(τ)‖ > D·d(σ,τ)
    Upper,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::Lower => "lower",
            Violation::Upper => "upper",
        })
    }
}

/// X^r_{i,j}, labelled as in the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetRef {
    pub family: usize,
    pub i: u64,
    pub j: u64,
}

impl fmt::Display for SetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{}_{{{},{}}}", self.family, self.i, self.j)
    }
}

fn join_sets(level: u32, sets: &[SetRef]) -> String {
    let mut parts = vec![format!("K^({level})")];
    parts.extend(sets.iter().map(SetRef::to_string));
    parts.join(" ∩ ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    Setup {
        k: usize,
        claimed_d: Rational,
        eta: Rational,
        sigma: SigmaValue,
    },
    /// Anchor set of the classical two-branch argument.
    Anchor {
        set: SetRef,
        value: ClopenUnion,
        finite: bool,
    },
    Pigeonhole {
        level: u32,
        family: usize,
        fixed: Vec<SetRef>,
        points: Vec<Ordinal>,
        bound: BigUint,
        window: usize,
        /// Singleton indices examined.
        scanned: u64,
        found: Option<SetRef>,
    },
    Descend {
        level: u32,
        sets: Vec<SetRef>,
    },
    FullSets {
        sigma: DeltaPoint,
        tau: DeltaPoint,
        measured: Rational,
        beta: Option<Ordinal>,
        family: Option<usize>,
        gap: Option<Rational>,
    },
    Violated {
        sigma: DeltaPoint,
        tau: DeltaPoint,
        measured: Rational,
        distance: u64,
        kind: Violation,
    },
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::Setup {
                k,
                claimed_d,
                eta,
                sigma,
            } => write!(
                f,
                "k = {k}, D = {}, η = 2k − 2(k−1)D = {} > 0, σ(K) = {sigma} < k so K^({}) is finite",
                rational::format(claimed_d),
                rational::format(eta),
                k - 1
            ),
            TraceStep::Anchor { set, value, finite } => write!(
                f,
                "{set} = {value} is {}",
                if *finite { "finite" } else { "infinite" }
            ),
            TraceStep::Pigeonhole {
                level,
                family,
                fixed,
                points,
                bound,
                window,
                scanned,
                found,
            } => {
                let pts: Vec<String> = points.iter().map(Ordinal::pretty).collect();
                write!(
                    f,
                    "B = {} = {{{}}} ({} point{}); family {family} singletons are D-bounded, packing bound {bound}; ",
                    join_sets(*level, fixed),
                    pts.join(", "),
                    points.len(),
                    if points.len() == 1 { "" } else { "s" },
                )?;
                match found {
                    Some(set) => write!(
                        f,
                        "indices {} and {} share a cell of width η, so B ∩ {set} = ∅ (window {window})",
                        set.i, set.j
                    ),
                    None => write!(f, "no collision among the first {scanned} indices (window {window})"),
                }
            }
            TraceStep::Descend { level, sets } => write!(
                f,
                "{} = ∅, hence {} has no accumulation point and is finite",
                join_sets(*level, sets),
                join_sets(level - 1, sets)
            ),
            TraceStep::FullSets {
                sigma,
                tau,
                measured,
                beta,
                family,
                gap,
            } => {
                write!(
                    f,
                    "σ = {sigma}, τ = {tau}: ‖f(σ)−f(τ)‖∞ = {}",
                    rational::format(measured)
                )?;
                if let Some(beta) = beta {
                    write!(f, ", attained at β = {}", beta.pretty())?;
                }
                if let (Some(r), Some(gap)) = (family, gap) {
                    write!(f, "; family {r} gap at β is {} < η", rational::format(gap))?;
                }
                Ok(())
            }
            TraceStep::Violated {
                sigma,
                tau,
                measured,
                distance,
                kind,
            } => match kind {
                Violation::Lower => write!(
                    f,
                    "violation: ‖f({sigma})−f({tau})‖∞ = {} < d_Δ = {distance}",
                    rational::format(measured)
                ),
                Violation::Upper => write!(
                    f,
                    "violation: ‖f({sigma})−f({tau})‖∞ = {} > D·d_Δ with d_Δ = {distance}",
                    rational::format(measured)
                ),
            },
        }
    }
}

/// A pair of domain points whose images break the claimed bi-Lipschitz
/// bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutationWitness {
    pub sigma: DeltaPoint,
    pub tau: DeltaPoint,
    pub sigma_image: StepFunction,
    pub tau_image: StepFunction,
    pub measured: Rational,
    pub domain_distance: u64,
    pub claimed_d: Rational,
    pub violation: Violation,
    pub trace: Vec<TraceStep>,
}

impl RefutationWitness {
    /// The bound that fails: d for lower violations, D·d for upper ones.
    pub fn bound(&self) -> Rational {
        let d = rational::int(self.domain_distance as i64);
        match self.violation {
            Violation::Lower => d,
            Violation::Upper => &self.claimed_d * d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconclusiveReason {
    /// The scan ran past the known images or the window cap.
    WindowExhausted,
    /// σ(K) ≥ k: K^(k−1) is infinite and the obstruction does not apply.
    DerivedSetInfinite,
    /// The anchor set X^1_{1,2} of the two-branch argument is infinite.
    AnchorSetInfinite,
}

impl fmt::Display for InconclusiveReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InconclusiveReason::WindowExhausted => "window-exhausted",
            InconclusiveReason::DerivedSetInfinite => "derived-set-infinite",
            InconclusiveReason::AnchorSetInfinite => "anchor-set-infinite",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineOutcome {
    Witness(Box<RefutationWitness>),
    Inconclusive {
        reason: InconclusiveReason,
        trace: Vec<TraceStep>,
    },
}

impl EngineOutcome {
    pub fn witness(&self) -> Option<&RefutationWitness> {
        match self {
            EngineOutcome::Witness(w) => Some(w),
            EngineOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            EngineOutcome::Witness(w) => &w.trace,
            EngineOutcome::Inconclusive { trace, .. } => trace,
        }
    }
}

/// Which natural plays n^r_i, and how it is labelled in traces.
trait Families {
    fn point(&self, family: usize, i: u64) -> Option<u64>;
    fn label(&self, family: usize, i: u64) -> u64;
}

struct Grid {
    k: u64,
}

impl Families for Grid {
    fn point(&self, family: usize, i: u64) -> Option<u64> {
        index_grid(self.k, i, family as u64).ok()
    }

    fn label(&self, _family: usize, i: u64) -> u64 {
        i
    }
}

/// Family 1 is {1, 2}; family 2 is {3, 4, …}. Labels are the elements.
struct TwoBranch;

impl Families for TwoBranch {
    fn point(&self, family: usize, i: u64) -> Option<u64> {
        match family {
            1 if (1..=2).contains(&i) => Some(i),
            2 => Some(i + 2),
            _ => None,
        }
    }

    fn label(&self, family: usize, i: u64) -> u64 {
        self.point(family, i).unwrap_or(i)
    }
}

enum Halt {
    Exhausted,
    Failed(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Failed(e)
    }
}

type Step<T> = std::result::Result<T, Halt>;

struct Run<'a> {
    map: &'a CandidateMap,
    families: &'a dyn Families,
    config: &'a RefuteConfig,
    eta: Rational,
    k: usize,
    images: HashMap<DeltaPoint, StepFunction>,
    trace: Vec<TraceStep>,
}

impl Run<'_> {
    fn image(&mut self, sigma: &DeltaPoint) -> Step<StepFunction> {
        if let Some(f) = self.images.get(sigma) {
            return Ok(f.clone());
        }
        match self.map.image(sigma)? {
            Some(f) => {
                self.images.insert(sigma.clone(), f.clone());
                Ok(f)
            }
            None => Err(Halt::Exhausted),
        }
    }

    fn singleton(&self, family: usize, i: u64) -> Step<DeltaPoint> {
        self.families
            .point(family, i)
            .map(DeltaPoint::singleton)
            .ok_or(Halt::Exhausted)
    }

    fn set_ref(&self, family: usize, (i, j): (u64, u64)) -> SetRef {
        SetRef {
            family,
            i: self.families.label(family, i),
            j: self.families.label(family, j),
        }
    }

    fn set_refs(&self, pairs: &[(u64, u64)]) -> Vec<SetRef> {
        pairs
            .iter()
            .enumerate()
            .map(|(r, &p)| self.set_ref(r + 1, p))
            .collect()
    }

    fn witness_set(&mut self, family: usize, (i, j): (u64, u64)) -> Step<ClopenUnion> {
        let a = self.singleton(family, i)?;
        let b = self.singleton(family, j)?;
        let fa = self.image(&a)?;
        let fb = self.image(&b)?;
        Ok(fa.threshold_set(&fb, &self.eta)?)
    }

    /// X^1_{p_1} ∩ … ∩ X^m_{p_m}.
    fn intersection(&mut self, pairs: &[(u64, u64)]) -> Step<ClopenUnion> {
        let mut acc = ClopenUnion::full(self.map.compact());
        for (r, &pair) in pairs.iter().enumerate() {
            let x = self.witness_set(r + 1, pair)?;
            acc = acc.intersection(&x)?;
        }
        Ok(acc)
    }

    fn violation(
        &mut self,
        sigma: DeltaPoint,
        tau: DeltaPoint,
        kind: Violation,
    ) -> Step<RefutationWitness> {
        let sigma_image = self.image(&sigma)?;
        let tau_image = self.image(&tau)?;
        let (measured, _) = sigma_image.sup_norm_diff(&tau_image)?;
        let distance = sigma.distance(&tau);
        let d = rational::int(distance as i64);
        let holds = match kind {
            Violation::Lower => measured < d,
            Violation::Upper => measured > self.map.claimed_d() * &d,
        };
        if !holds {
            return Err(Error::Internal(format!(
                "{kind} violation claimed for {sigma}, {tau} does not hold"
            ))
            .into());
        }
        self.trace.push(TraceStep::Violated {
            sigma: sigma.clone(),
            tau: tau.clone(),
            measured: measured.clone(),
            distance,
            kind,
        });
        Ok(RefutationWitness {
            sigma,
            tau,
            sigma_image,
            tau_image,
            measured,
            domain_distance: distance,
            claimed_d: self.map.claimed_d().clone(),
            violation: kind,
            trace: self.trace.clone(),
        })
    }

    /// B = K^(level) ∩ X^1_{p_1} ∩ … ∩ X^m_{p_m} is finite. Scans singletons
    /// of family m+1 until two images fall in the same η-cell on every
    /// point of B; then B misses X^{m+1} for that pair.
    fn pigeonhole(&mut self, level: u32, fixed: Vec<(u64, u64)>) -> Step<RefutationWitness> {
        let family = fixed.len() + 1;
        let b = self.intersection(&fixed)?;
        let points = b.derived_points(level, self.config.max_points)?;
        let d = self.map.claimed_d().clone();
        let bound = packing_bound(&d, &self.eta, points.len())?;
        let empty = DeltaPoint::empty();

        let mut seen: HashMap<Vec<BigInt>, u64> = HashMap::new();
        let mut window = self.config.initial_window.max(2);
        let mut i: u64 = 1;
        let found = loop {
            if i as usize > window {
                if window >= self.config.max_window {
                    break None;
                }
                window = (window * 2).min(self.config.max_window);
            }
            let sigma = match self.singleton(family, i) {
                Ok(s) => s,
                Err(Halt::Exhausted) => break None,
                Err(e) => return Err(e),
            };
            let f = match self.image(&sigma) {
                Ok(f) => f,
                Err(Halt::Exhausted) => break None,
                Err(e) => return Err(e),
            };
            if f.sup_norm() > d {
                self.trace.push(TraceStep::Pigeonhole {
                    level,
                    family,
                    fixed: self.set_refs(&fixed),
                    points,
                    bound,
                    window,
                    scanned: i,
                    found: None,
                });
                return self.violation(empty, sigma, Violation::Upper);
            }
            let mut cell = Vec::with_capacity(points.len());
            for gamma in &points {
                let v = f.eval(gamma)?;
                cell.push(rational::floor(&((v + &d) / &self.eta)));
            }
            if let Some(&j) = seen.get(&cell) {
                break Some((j, i));
            }
            seen.insert(cell, i);
            if bound_as_usize(&bound).is_some_and(|n| i as usize > n) {
                return Err(Error::Internal(
                    "more bounded η-separated singletons than the packing bound".into(),
                )
                .into());
            }
            i += 1;
        };

        let found_ref = found.map(|p| self.set_ref(family, p));
        self.trace.push(TraceStep::Pigeonhole {
            level,
            family,
            fixed: self.set_refs(&fixed),
            points,
            bound,
            window,
            scanned: found.map_or(i - 1, |(_, j)| j),
            found: found_ref,
        });
        let Some(pair) = found else {
            return Err(Halt::Exhausted);
        };
        let mut pairs = fixed;
        pairs.push(pair);
        self.refute_level(level, pairs)
    }

    /// K^(level) ∩ X^1_{p_1} ∩ … ∩ X^m_{p_m} = ∅ with m = k − level.
    fn refute_level(&mut self, level: u32, pairs: Vec<(u64, u64)>) -> Step<RefutationWitness> {
        if level == 0 {
            return self.full_sets(&pairs);
        }
        let c = self.intersection(&pairs)?;
        if c.meets_derived(level) {
            return Err(Error::Internal(format!(
                "{} should be empty",
                join_sets(level, &self.set_refs(&pairs))
            ))
            .into());
        }
        self.trace.push(TraceStep::Descend {
            level,
            sets: self.set_refs(&pairs),
        });
        self.pigeonhole(level - 1, pairs)
    }

    /// The k pairs give disjoint full sets σ, τ with d(σ,τ) = 2k and
    /// X^1 ∩ … ∩ X^k = ∅. Either ‖f(σ)−f(τ)‖ < 2k, or at an attaining β some
    /// family gap is below η, which forces a singleton-to-full-set distance
    /// above D(k−1).
    fn full_sets(&mut self, pairs: &[(u64, u64)]) -> Step<RefutationWitness> {
        let mut left = Vec::with_capacity(pairs.len());
        let mut right = Vec::with_capacity(pairs.len());
        for (r, &(i, j)) in pairs.iter().enumerate() {
            left.push(self.families.point(r + 1, i).ok_or(Halt::Exhausted)?);
            right.push(self.families.point(r + 1, j).ok_or(Halt::Exhausted)?);
        }
        let sigma = DeltaPoint::new(left.clone())?;
        let tau = DeltaPoint::new(right.clone())?;
        let fs = self.image(&sigma)?;
        let ft = self.image(&tau)?;
        let (measured, attained) = fs.sup_norm_diff(&ft)?;
        let full = rational::int(2 * self.k as i64);
        if measured < full {
            self.trace.push(TraceStep::FullSets {
                sigma: sigma.clone(),
                tau: tau.clone(),
                measured,
                beta: None,
                family: None,
                gap: None,
            });
            return self.violation(sigma, tau, Violation::Lower);
        }
        let beta = attained
            .first_of_rank(0)
            .ok_or_else(|| Error::Internal("empty attaining set".into()))?;
        for r in 0..pairs.len() {
            let a = DeltaPoint::singleton(left[r]);
            let b = DeltaPoint::singleton(right[r]);
            let fa = self.image(&a)?;
            let fb = self.image(&b)?;
            let gap = (fa.eval(&beta)? - fb.eval(&beta)?).abs();
            if gap >= self.eta {
                continue;
            }
            self.trace.push(TraceStep::FullSets {
                sigma: sigma.clone(),
                tau: tau.clone(),
                measured,
                beta: Some(beta.clone()),
                family: Some(r + 1),
                gap: Some(gap),
            });
            let limit = self.map.claimed_d() * rational::int(self.k as i64 - 1);
            let (da, _) = fa.sup_norm_diff(&fs)?;
            if da > limit {
                return self.violation(a, sigma, Violation::Upper);
            }
            let (db, _) = fb.sup_norm_diff(&ft)?;
            if db > limit {
                return self.violation(b, tau, Violation::Upper);
            }
            return Err(
                Error::Internal("gap below η with both singleton bounds intact".into()).into(),
            );
        }
        Err(Error::Internal("every family gap reached η on an empty intersection".into()).into())
    }

    fn finish(self, result: Step<RefutationWitness>) -> Result<EngineOutcome> {
        match result {
            Ok(w) => Ok(EngineOutcome::Witness(Box::new(w))),
            Err(Halt::Exhausted) => Ok(EngineOutcome::Inconclusive {
                reason: InconclusiveReason::WindowExhausted,
                trace: self.trace,
            }),
            Err(Halt::Failed(e)) => Err(e),
        }
    }
}

fn prepare(map: &CandidateMap) -> Result<Rational> {
    let k = map.k();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "refutation needs k ≥ 2, got {k}"
        )));
    }
    let eta = eta(k, map.claimed_d())?;
    if !eta.is_positive() {
        return Err(Error::NonPositive("η = 2k − 2(k−1)D"));
    }
    Ok(eta)
}

pub fn refute(map: &CandidateMap) -> Result<EngineOutcome> {
    refute_with(map, &RefuteConfig::default())
}

pub fn refute_with(map: &CandidateMap, config: &RefuteConfig) -> Result<EngineOutcome> {
    let eta = prepare(map)?;
    let k = map.k();
    let sigma = map.compact().sigma();
    if sigma >= SigmaValue::Finite(k as u32) {
        return Ok(EngineOutcome::Inconclusive {
            reason: InconclusiveReason::DerivedSetInfinite,
            trace: Vec::new(),
        });
    }
    let families = Grid { k: k as u64 };
    let mut run = Run {
        map,
        families: &families,
        config,
        eta: eta.clone(),
        k,
        images: HashMap::new(),
        trace: vec![TraceStep::Setup {
            k,
            claimed_d: map.claimed_d().clone(),
            eta,
            sigma,
        }],
    };
    let result = run.pigeonhole(k as u32 - 1, Vec::new());
    run.finish(result)
}

/// The two-branch argument for k = 2: fix X^1_{1,2} from the singletons
/// {1}, {2}; if it is finite, pigeonhole the singletons {3}, {4}, … on it and
/// evaluate f({1,i}) against f({2,j}).
pub fn aharoni_demo(map: &CandidateMap, config: &RefuteConfig) -> Result<EngineOutcome> {
    if map.k() != 2 {
        return Err(Error::InvalidArgument(
            "the two-branch argument needs k = 2".into(),
        ));
    }
    let eta = prepare(map)?;
    let families = TwoBranch;
    let mut run = Run {
        map,
        families: &families,
        config,
        eta: eta.clone(),
        k: 2,
        images: HashMap::new(),
        trace: vec![TraceStep::Setup {
            k: 2,
            claimed_d: map.claimed_d().clone(),
            eta,
            sigma: map.compact().sigma(),
        }],
    };
    let anchor = match run.intersection(&[(1, 2)]) {
        Ok(a) => a,
        Err(halt) => return run.finish(Err(halt)),
    };
    let finite = !anchor.is_infinite();
    run.trace.push(TraceStep::Anchor {
        set: run.set_ref(1, (1, 2)),
        value: anchor,
        finite,
    });
    if !finite {
        return Ok(EngineOutcome::Inconclusive {
            reason: InconclusiveReason::AnchorSetInfinite,
            trace: run.trace,
        });
    }
    let result = run.pigeonhole(0, vec![(1, 2)]);
    run.finish(result)
}

/// Recomputes both images and the distance from the map and checks the
/// claimed inequality exactly.
pub fn verify_witness(map: &CandidateMap, w: &RefutationWitness) -> Result<bool> {
    let fs = map.require_image(&w.sigma)?;
    let ft = map.require_image(&w.tau)?;
    let distance = w.sigma.distance(&w.tau);
    if distance == 0 || distance != w.domain_distance {
        return Ok(false);
    }
    if fs != w.sigma_image || ft != w.tau_image || &w.claimed_d != map.claimed_d() {
        return Ok(false);
    }
    let (measured, _) = fs.sup_norm_diff(&ft)?;
    if measured != w.measured {
        return Ok(false);
    }
    let d = rational::int(distance as i64);
    Ok(match w.violation {
        Violation::Lower => measured < d,
        Violation::Upper => measured > map.claimed_d() * d,
    })
}
