//! JSON documents for step functions, candidate maps, embedding samples
//! and engine reports. Ordinals and rationals are encoded as strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compacta::CompactInterval;
use crate::delta::{DeltaPoint, SparseVector};
use crate::engine::{
    CandidateMap, DefaultRule, DistortionReport, EngineOutcome, RefutationWitness,
};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{self, Rational};
use crate::restriction::EmbeddingSample;
use crate::step::StepFunction;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    compact: Ordinal,
    cuts: Vec<Ordinal>,
    values: Vec<String>,
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepDoc {
            compact: self.compact().endpoint().clone(),
            cuts: self.cuts(),
            values: self.values().iter().map(rational::format).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = StepDoc::deserialize(d)?;
        let values = doc
            .values
            .iter()
            .map(|v| rational::parse(v))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        StepFunction::new(CompactInterval::new(doc.compact), doc.cuts, values)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    pub point: DeltaPoint,
    pub function: StepFunction,
}

/// `{"k", "compact", "claimed_distortion", "images", "default_rule"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub k: usize,
    pub compact: Ordinal,
    pub claimed_distortion: String,
    #[serde(default)]
    pub images: Vec<ImageEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_rule: Option<DefaultRule>,
}

impl MapDoc {
    pub fn from_images(
        k: usize,
        compact: &CompactInterval,
        claimed_d: &Rational,
        images: impl IntoIterator<Item = (DeltaPoint, StepFunction)>,
    ) -> Self {
        MapDoc {
            k,
            compact: compact.endpoint().clone(),
            claimed_distortion: rational::format(claimed_d),
            images: images
                .into_iter()
                .map(|(point, function)| ImageEntry { point, function })
                .collect(),
            default_rule: None,
        }
    }

    pub fn into_map(self) -> Result<CandidateMap> {
        let compact = CompactInterval::new(self.compact);
        let claimed_d = rational::parse(&self.claimed_distortion)?;
        let mut table = BTreeMap::new();
        for entry in self.images {
            if table.insert(entry.point.clone(), entry.function).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "image for {} listed twice",
                    entry.point
                )));
            }
        }
        let fallback = self
            .default_rule
            .map(|r| r.compile(self.k, &compact))
            .transpose()?;
        CandidateMap::new(self.k, compact, claimed_d, table, fallback)
    }
}

pub fn parse_map(text: &str) -> Result<CandidateMap> {
    serde_json::from_str::<MapDoc>(text)?.into_map()
}

pub fn load_map(path: &Path) -> Result<CandidateMap> {
    parse_map(&std::fs::read_to_string(path)?)
}

pub fn parse_points(text: &str) -> Result<Vec<DeltaPoint>> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_points(path: &Path) -> Result<Vec<DeltaPoint>> {
    parse_points(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleEntry {
    pub vector: SparseVector,
    pub function: StepFunction,
}

/// `{"compact", "epsilon_prime", "entries": [{"vector", "function"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDoc {
    pub compact: Ordinal,
    pub epsilon_prime: String,
    pub entries: Vec<SampleEntry>,
}

impl From<&EmbeddingSample> for SampleDoc {
    fn from(s: &EmbeddingSample) -> Self {
        SampleDoc {
            compact: s.compact().endpoint().clone(),
            epsilon_prime: rational::format(s.epsilon_prime()),
            entries: s
                .table()
                .iter()
                .map(|(v, f)| SampleEntry {
                    vector: v.clone(),
                    function: f.clone(),
                })
                .collect(),
        }
    }
}

impl SampleDoc {
    pub fn into_sample(self) -> Result<EmbeddingSample> {
        let table = self
            .entries
            .into_iter()
            .map(|e| (e.vector, e.function))
            .collect();
        EmbeddingSample::new(
            CompactInterval::new(self.compact),
            rational::parse(&self.epsilon_prime)?,
            table,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub sigma: DeltaPoint,
    pub tau: DeltaPoint,
    pub measured: String,
    pub domain_distance: u64,
    pub violation: String,
    /// d for lower violations, D·d for upper ones.
    pub bound: String,
    pub claimed_distortion: String,
    pub sigma_image: StepFunction,
    pub tau_image: StepFunction,
}

impl From<&RefutationWitness> for WitnessDoc {
    fn from(w: &RefutationWitness) -> Self {
        WitnessDoc {
            sigma: w.sigma.clone(),
            tau: w.tau.clone(),
            measured: rational::format(&w.measured),
            domain_distance: w.domain_distance,
            violation: w.violation.to_string(),
            bound: rational::format(&w.bound()),
            claimed_distortion: rational::format(&w.claimed_d),
            sigma_image: w.sigma_image.clone(),
            tau_image: w.tau_image.clone(),
        }
    }
}

/// Engine outcome with a readable trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    pub trace: Vec<String>,
}

impl From<&EngineOutcome> for OutcomeDoc {
    fn from(o: &EngineOutcome) -> Self {
        let trace = o.trace().iter().map(ToString::to_string).collect();
        match o {
            EngineOutcome::Witness(w) => OutcomeDoc {
                outcome: "witness".into(),
                reason: None,
                witness: Some(WitnessDoc::from(w.as_ref())),
                trace,
            },
            EngineOutcome::Inconclusive { reason, .. } => OutcomeDoc {
                outcome: "inconclusive".into(),
                reason: Some(reason.to_string()),
                witness: None,
                trace,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionDoc {
    pub expansion: String,
    pub contraction: String,
    pub distortion: String,
    pub expansion_pair: (DeltaPoint, DeltaPoint),
    pub contraction_pair: (DeltaPoint, DeltaPoint),
}

impl From<&DistortionReport> for DistortionDoc {
    fn from(r: &DistortionReport) -> Self {
        DistortionDoc {
            expansion: rational::format(&r.expansion),
            contraction: rational::format(&r.contraction),
            distortion: rational::format(&r.distortion),
            expansion_pair: r.expansion_pair.clone(),
            contraction_pair: r.contraction_pair.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::refute;
    use crate::rational::int;

    #[test]
    fn step_round_trip() {
        let text = r#"{"compact":"w","cuts":["5"],"values":["1","0"]}"#;
        let f: StepFunction = serde_json::from_str(text).unwrap();
        assert_eq!(f.eval(&Ordinal::finite(5)).unwrap(), int(1));
        assert_eq!(serde_json::to_string(&f).unwrap(), text);
        assert!(serde_json::from_str::<StepFunction>(
            r#"{"compact":"w","cuts":["5","5"],"values":["1","0","1"]}"#
        )
        .is_err());
    }

    #[test]
    fn map_with_default_rule() {
        let text = r#"{"k":2,"compact":"w","claimed_distortion":"19/10","default_rule":{"generator":"basis"}}"#;
        let m = parse_map(text).unwrap();
        let out = refute(&m).unwrap();
        let doc = OutcomeDoc::from(&out);
        assert_eq!(doc.outcome, "witness");
        assert_eq!(doc.witness.unwrap().measured, "1");
    }

    #[test]
    fn duplicate_images_rejected() {
        let f = r#"{"compact":"w","cuts":[],"values":["0"]}"#;
        let text = format!(
            r#"{{"k":1,"compact":"w","claimed_distortion":"2","images":[{{"point":[1],"function":{f}}},{{"point":[1],"function":{f}}}]}}"#
        );
        assert!(parse_map(&text).is_err());
    }

    #[test]
    fn sample_round_trip() {
        let text = r#"{"compact":"w^2","epsilon_prime":"1/10","entries":[{"vector":{"0":"1"},"function":{"compact":"w^2","cuts":["w"],"values":["1","0"]}}]}"#;
        let doc: SampleDoc = serde_json::from_str(text).unwrap();
        let s = doc.into_sample().unwrap();
        assert_eq!(serde_json::to_string(&SampleDoc::from(&s)).unwrap(), text);
    }
}
