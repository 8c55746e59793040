//! JSON documents for files read and written by the command-line tools.
//!
//! Every document carries `"formatVersion": 1`. Readers check the version
//! before anything else and reject unknown keys; writers emit keys in a fixed
//! order with a trailing newline, so equal inputs produce byte-identical
//! outputs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::canext::ClassSpec;
use crate::error::{Error, Result};
use crate::quantale::{QVal, Quantale, QuantaleKind};
use crate::relation::QRel;
use crate::space::{FinSpace, Mat, SpaceMap};

pub const FORMAT_VERSION: u32 = 1;

/// Parse a document after checking its `formatVersion`.
pub fn from_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("formatVersion") {
        Some(v) if v.as_u64() == Some(u64::from(FORMAT_VERSION)) => {}
        Some(v) => {
            return Err(Error::Schema(format!(
                "unsupported formatVersion {v}, expected {FORMAT_VERSION}"
            )))
        }
        None => return Err(Error::Schema("missing formatVersion".into())),
    }
    Ok(serde_json::from_value(value)?)
}

/// Serialize a document with stable key order and a trailing newline.
pub fn to_string<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// A standalone quantale description file.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct QuantaleDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
}

/// A space given either by an explicit hom matrix or as a discrete list.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum SpaceBody {
    #[serde(rename_all = "camelCase")]
    Explicit {
        points: Vec<String>,
        hom: Vec<Vec<QVal>>,
    },
    #[serde(rename_all = "camelCase")]
    Discrete { discrete_points: Vec<String> },
}

impl SpaceBody {
    pub fn build(&self, q: &Arc<Quantale>) -> Result<Arc<FinSpace>> {
        match self {
            SpaceBody::Explicit { points, hom } => FinSpace::new(
                q.clone(),
                points.clone(),
                Mat::from_rows(hom.clone())?,
            ),
            SpaceBody::Discrete { discrete_points } => {
                Ok(FinSpace::discrete(q.clone(), discrete_points.clone()))
            }
        }
    }

    pub fn of(space: &FinSpace) -> SpaceBody {
        SpaceBody::Explicit {
            points: space.points().to_vec(),
            hom: space.hom_mat().to_rows(),
        }
    }
}

/// A standalone space file.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SpaceDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub points: Vec<String>,
    pub hom: Vec<Vec<QVal>>,
}

impl SpaceDoc {
    pub fn build(&self) -> Result<Arc<FinSpace>> {
        let q = Arc::new(Quantale::new(self.quantale.clone())?);
        FinSpace::new(q, self.points.clone(), Mat::from_rows(self.hom.clone())?)
    }

    pub fn of(space: &FinSpace) -> SpaceDoc {
        SpaceDoc {
            format_version: FORMAT_VERSION,
            quantale: space.quantale().kind().clone(),
            points: space.points().to_vec(),
            hom: space.hom_mat().to_rows(),
        }
    }
}

/// A weighted relation between two spaces (a two-sided context when the
/// matrix is read as an incidence table).
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RelationDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub source: SpaceBody,
    pub target: SpaceBody,
    pub matrix: Vec<Vec<QVal>>,
}

impl RelationDoc {
    pub fn build(&self) -> Result<QRel> {
        let q = Arc::new(Quantale::new(self.quantale.clone())?);
        let source = self.source.build(&q)?;
        let target = self.target.build(&q)?;
        QRel::new(
            source.clone(),
            target,
            Mat::from_rows(self.matrix.clone())?,
        )
    }

    pub fn of(rel: &QRel) -> RelationDoc {
        RelationDoc {
            format_version: FORMAT_VERSION,
            quantale: rel.source().quantale().kind().clone(),
            source: SpaceBody::of(rel.source()),
            target: SpaceBody::of(rel.target()),
            matrix: rel.matrix().to_rows(),
        }
    }
}

/// One stable pair in a concept listing.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConceptEntry {
    pub extent: Vec<QVal>,
    pub intent: Vec<QVal>,
}

/// Output of the concept enumeration: all stable pairs of a context, sorted
/// by extent, plus the covering pairs of the order on them.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConceptsDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub source_points: Vec<String>,
    pub target_points: Vec<String>,
    pub concepts: Vec<ConceptEntry>,
    pub covering: Vec<(usize, usize)>,
}

/// Input for building a completion from weight classes.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CompletionConfigDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub space: SpaceBody,
    pub filters: ClassSpec,
    pub ideals: ClassSpec,
}

/// One labelled pass/fail outcome.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct OutcomeEntry {
    pub label: String,
    pub holds: bool,
}

/// Output of building a completion from weight classes.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CompletionDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub points: Vec<String>,
    pub filter_class: ClassSpec,
    pub ideal_class: ClassSpec,
    pub filters: Vec<Vec<QVal>>,
    pub ideals: Vec<Vec<QVal>>,
    pub concepts: Vec<ConceptEntry>,
    pub embedding: Vec<usize>,
    pub checks: Vec<OutcomeEntry>,
    pub filter_preservation: Vec<OutcomeEntry>,
    pub ideal_preservation: Vec<OutcomeEntry>,
}

/// A map of spaces given by point names.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct FunctorDoc {
    pub format_version: u32,
    pub assignment: Vec<(String, String)>,
}

impl FunctorDoc {
    pub fn build(&self, source: Arc<FinSpace>, target: Arc<FinSpace>) -> Result<SpaceMap> {
        SpaceMap::from_names(source, target, &self.assignment)
    }
}

/// Whether a class survives restriction along a map, and if not, which
/// member breaks it.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct LiftOutcome {
    pub closed: bool,
    pub violator: Option<String>,
}

/// Output of extending a map of spaces to the completions on both ends.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExtendReportDoc {
    pub format_version: u32,
    pub exchange: bool,
    pub extends_base: bool,
    pub filter_lift: LiftOutcome,
    pub ideal_lift: LiftOutcome,
    /// `None` when a lift is undefined, so there is nothing to check.
    pub virtual_adjoints: Option<bool>,
    pub adjunctions: Option<bool>,
    pub lift_functorial: Option<bool>,
}

/// Output of the automaton behaviour computation.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct AutomatonReportDoc {
    pub format_version: u32,
    pub states: Vec<String>,
    /// Reflexive-transitive closure of the input transitions.
    pub transitions: Vec<Vec<QVal>>,
    pub observability: Vec<QVal>,
    pub reachability: Vec<QVal>,
    pub oracle_checked: bool,
}

/// A weighted automaton over a word-set quantale: a raw transition matrix
/// (closed into a space by the tools), with initial and final weights.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct AutomatonDoc {
    pub format_version: u32,
    pub quantale: QuantaleKind,
    pub states: Vec<String>,
    pub transitions: Vec<Vec<QVal>>,
    pub initial: Vec<QVal>,
    #[serde(rename = "final")]
    pub final_states: Vec<QVal>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_is_checked_before_shape() {
        let err = from_str::<SpaceDoc>(r#"{"formatVersion": 2}"#).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
        let err = from_str::<SpaceDoc>(r#"{"points": []}"#).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "formatVersion": 1,
            "quantale": {"kind": "bool2"},
            "points": ["x"],
            "hom": [[true]],
            "extra": 0
        }"#;
        assert!(matches!(
            from_str::<SpaceDoc>(text).unwrap_err(),
            Error::Json(_)
        ));
    }

    #[test]
    fn space_documents_round_trip() {
        let text = r#"{
            "formatVersion": 1,
            "quantale": {"kind": "similarity", "N": 3},
            "points": ["u", "v"],
            "hom": [["inf", 2], [0, "inf"]]
        }"#;
        let doc: SpaceDoc = from_str(text).unwrap();
        let space = doc.build().unwrap();
        assert_eq!(space.hom(0, 1), &QVal::Nat(2));
        let again = to_string(&SpaceDoc::of(&space)).unwrap();
        let doc2: SpaceDoc = from_str(&again).unwrap();
        assert_eq!(to_string(&doc2).unwrap(), again);
    }

    #[test]
    fn relation_documents_accept_discrete_shorthand() {
        let text = r#"{
            "formatVersion": 1,
            "quantale": {"kind": "bool2"},
            "source": {"discretePoints": ["x1", "x2"]},
            "target": {"discretePoints": ["a"]},
            "matrix": [[true], [false]]
        }"#;
        let rel = from_str::<RelationDoc>(text).unwrap().build().unwrap();
        assert_eq!(rel.at(0, 0), &QVal::Bool(true));
        assert!(rel.source().is_discrete());
    }

    #[test]
    fn automaton_documents_parse_word_sets() {
        let text = r#"{
            "formatVersion": 1,
            "quantale": {"kind": "language", "alphabet": ["a", "b"], "maxLen": 2},
            "states": ["s", "t"],
            "transitions": [[[""], ["a"]], [[], [""]]],
            "initial": [[""], []],
            "final": [[], ["", "b"]]
        }"#;
        let doc: AutomatonDoc = from_str(text).unwrap();
        assert_eq!(doc.states.len(), 2);
        assert_eq!(
            doc.final_states[1],
            QVal::Words(crate::quantale::WordSet::from_strs(["", "b"]))
        );
    }
}
