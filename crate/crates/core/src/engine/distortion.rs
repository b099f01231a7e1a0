use num::Zero;

use super::CandidateMap;
use crate::delta::DeltaPoint;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistortionReport {
    /// max ‖f(σ)−f(τ)‖ / d(σ,τ)
    pub expansion: Rational,
    /// max d(σ,τ) / ‖f(σ)−f(τ)‖
    pub contraction: Rational,
    pub distortion: Rational,
    pub expansion_pair: (DeltaPoint, DeltaPoint),
    pub contraction_pair: (DeltaPoint, DeltaPoint),
}

/// Lipschitz constants of the map and its inverse on a finite sample.
/// Ties keep the first pair in sample order.
pub fn distortion_of_sample(points: &[DeltaPoint], map: &CandidateMap) -> Result<DistortionReport> {
    let mut distinct: Vec<&DeltaPoint> = Vec::with_capacity(points.len());
    for p in points {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    if distinct.len() < 2 {
        return Err(Error::TooFewPoints(distinct.len()));
    }
    let images = distinct
        .iter()
        .map(|p| map.require_image(p))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<DistortionReport> = None;
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            let dom = rational::int(distinct[i].distance(distinct[j]) as i64);
            let (img, _) = images[i].sup_norm_diff(&images[j])?;
            if img.is_zero() {
                return Err(Error::CoincidentImages {
                    sigma: distinct[i].clone(),
                    tau: distinct[j].clone(),
                });
            }
            let stretch = &img / &dom;
            let shrink = &dom / &img;
            let pair = (distinct[i].clone(), distinct[j].clone());
            match &mut best {
                None => {
                    best = Some(DistortionReport {
                        expansion: stretch,
                        contraction: shrink,
                        distortion: Rational::zero(),
                        expansion_pair: pair.clone(),
                        contraction_pair: pair,
                    })
                }
                Some(r) => {
                    if stretch > r.expansion {
                        r.expansion = stretch;
                        r.expansion_pair = pair.clone();
                    }
                    if shrink > r.contraction {
                        r.contraction = shrink;
                        r.contraction_pair = pair;
                    }
                }
            }
        }
    }
    let mut report = best.expect("at least one pair");
    report.distortion = &report.expansion * &report.contraction;
    Ok(report)
}

/// Rescales the map so that its smallest stretch on `points` is exactly 1.
pub fn normalize_noncontractive(map: CandidateMap, points: &[DeltaPoint]) -> Result<CandidateMap> {
    let report = distortion_of_sample(points, &map)?;
    map.rescaled(&report.contraction)
}
