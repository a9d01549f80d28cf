//! JSON documents for complexes, partitions, scenarios, models, functionals
//! and global distributions.
//!
//! Rationals travel as `"num/den"` strings so nothing passes through a
//! float. Faces are written sorted. A scenario document is a complex
//! document plus an optional `outcomes` map (missing entries mean 2), so any
//! scenario file also reads as a complex file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{SimplicialComplex, VertexPartition};
use crate::error::{Error, Result};
use crate::locality::{BellFunctional, GlobalDistribution};
use crate::model::{Assignment, ContextDistribution, EmpiricalModel};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

/// Outcome count assumed for measurements a scenario document leaves out.
pub const DEFAULT_OUTCOMES: usize = 2;

/// Conversion to and from the JSON document format.
pub trait Document: Sized {
    fn to_json(&self) -> Value;
    fn from_json(value: Value) -> Result<Self>;

    fn parse(text: &str) -> Result<Self> {
        Self::from_json(serde_json::from_str(text)?)
    }

    fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("documents serialize");
        s.push('\n');
        s
    }
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T> {
    Ok(serde_json::from_value(value)?)
}

fn encode<T: Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<String>>,
    maximal_faces: Vec<Vec<String>>,
}

impl ComplexDoc {
    fn of(c: &SimplicialComplex) -> Self {
        ComplexDoc {
            vertices: Some(c.vertices().to_vec()),
            maximal_faces: c.maximal_faces(),
        }
    }

    fn build(self) -> Result<SimplicialComplex> {
        let c = SimplicialComplex::from_maximal_faces(self.maximal_faces)?;
        if let Some(mut listed) = self.vertices {
            listed.sort();
            listed.dedup();
            if listed != c.vertices() {
                return Err(Error::Document(format!(
                    "`vertices` {:?} differ from the vertices of the faces {:?}",
                    listed,
                    c.vertices()
                )));
            }
        }
        Ok(c)
    }
}

impl Document for SimplicialComplex {
    fn to_json(&self) -> Value {
        encode(&ComplexDoc::of(self))
    }

    fn from_json(value: Value) -> Result<Self> {
        // scenario documents double as complex documents
        let mut value = value;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("outcomes");
        }
        decode::<ComplexDoc>(value)?.build()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockDoc {
    name: String,
    members: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionDoc {
    blocks: Vec<BlockDoc>,
}

impl Document for VertexPartition {
    fn to_json(&self) -> Value {
        encode(&PartitionDoc {
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    name: b.name.clone(),
                    members: b.members.iter().cloned().collect(),
                })
                .collect(),
        })
    }

    fn from_json(value: Value) -> Result<Self> {
        let doc: PartitionDoc = decode(value)?;
        VertexPartition::new(doc.blocks.into_iter().map(|b| (b.name, b.members)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<String>>,
    maximal_faces: Vec<Vec<String>>,
    #[serde(default)]
    outcomes: BTreeMap<String, usize>,
}

impl ScenarioDoc {
    fn of(s: &Scenario) -> Self {
        let c = ComplexDoc::of(s.complex());
        ScenarioDoc {
            vertices: c.vertices,
            maximal_faces: c.maximal_faces,
            outcomes: s.outcomes().clone(),
        }
    }

    fn build(self) -> Result<Scenario> {
        let complex = ComplexDoc {
            vertices: self.vertices,
            maximal_faces: self.maximal_faces,
        }
        .build()?;
        let mut outcomes = self.outcomes;
        for v in complex.vertices() {
            outcomes.entry(v.clone()).or_insert(DEFAULT_OUTCOMES);
        }
        Scenario::new(complex, outcomes)
    }
}

impl Document for Scenario {
    fn to_json(&self) -> Value {
        encode(&ScenarioDoc::of(self))
    }

    fn from_json(value: Value) -> Result<Self> {
        decode::<ScenarioDoc>(value)?.build()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    outcome: Assignment,
    p: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextDoc {
    face: Vec<String>,
    cells: Vec<CellDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    scenario: ScenarioDoc,
    contexts: Vec<ContextDoc>,
}

fn cell_docs<'a>(d: impl Iterator<Item = (&'a [usize], &'a Rational)>, face: &[String]) -> Vec<CellDoc> {
    d.map(|(o, p)| CellDoc {
        outcome: face.iter().cloned().zip(o.iter().copied()).collect(),
        p: rational::format(p),
    })
    .collect()
}

fn read_cells(face: &[String], cells: Vec<CellDoc>) -> Result<Vec<(Vec<usize>, Rational)>> {
    cells
        .into_iter()
        .map(|c| {
            if c.outcome.len() != face.len() || !face.iter().all(|v| c.outcome.contains_key(v)) {
                return Err(Error::Document(format!(
                    "cell outcome {:?} does not match face {:?}",
                    c.outcome, face
                )));
            }
            let tuple = face.iter().map(|v| c.outcome[v]).collect();
            Ok((tuple, rational::parse(&c.p)?))
        })
        .collect()
}

impl Document for EmpiricalModel {
    fn to_json(&self) -> Value {
        encode(&ModelDoc {
            scenario: ScenarioDoc::of(self.scenario()),
            contexts: self
                .contexts()
                .iter()
                .map(|c| ContextDoc {
                    face: c.face().to_vec(),
                    cells: cell_docs(c.cells(), c.face()),
                })
                .collect(),
        })
    }

    fn from_json(value: Value) -> Result<Self> {
        let doc: ModelDoc = decode(value)?;
        let scenario = doc.scenario.build()?;
        let contexts = doc
            .contexts
            .into_iter()
            .map(|c| {
                let cells = read_cells(&c.face, c.cells)?;
                ContextDistribution::new(c.face, cells)
            })
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(scenario, contexts)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    face: Option<Vec<String>>,
    outcome: Assignment,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalDoc {
    terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<String>,
}

impl Document for BellFunctional {
    fn to_json(&self) -> Value {
        encode(&FunctionalDoc {
            terms: self
                .terms()
                .iter()
                .map(|t| TermDoc {
                    face: Some(t.face()),
                    outcome: t.outcome.clone(),
                    coeff: rational::format(&t.coeff),
                })
                .collect(),
            bound: self.bound().map(rational::format),
        })
    }

    fn from_json(value: Value) -> Result<Self> {
        let doc: FunctionalDoc = decode(value)?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                if let Some(mut face) = t.face {
                    face.sort();
                    if !face.iter().eq(t.outcome.keys()) {
                        return Err(Error::Document(format!(
                            "term face {:?} does not match its outcome {:?}",
                            face, t.outcome
                        )));
                    }
                }
                Ok((t.outcome, rational::parse(&t.coeff)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let bound = doc.bound.as_deref().map(rational::parse).transpose()?;
        Ok(BellFunctional::new(terms, bound))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalDoc {
    vertices: Vec<String>,
    cells: Vec<CellDoc>,
}

impl Document for GlobalDistribution {
    fn to_json(&self) -> Value {
        encode(&GlobalDoc {
            vertices: self.vertices().to_vec(),
            cells: cell_docs(self.cells(), self.vertices()),
        })
    }

    fn from_json(value: Value) -> Result<Self> {
        let doc: GlobalDoc = decode(value)?;
        let cells = read_cells(&doc.vertices, doc.cells)?;
        GlobalDistribution::new(doc.vertices, cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::xor_chsh;
    use crate::model::{pr_box, svetlichny_box};
    use crate::rational::int;

    #[test]
    fn complex_document() {
        let c = SimplicialComplex::parse(r#"{"maximal_faces":[["b","a"],["c"]]}"#).unwrap();
        assert_eq!(c.maximal_faces(), vec![vec!["a", "b"], vec!["c"]]);
        assert_eq!(SimplicialComplex::parse(&c.to_pretty()).unwrap(), c);
        let bad = SimplicialComplex::parse(r#"{"vertices":["a","z"],"maximal_faces":[["a"]]}"#);
        assert!(matches!(bad, Err(Error::Document(_))));
        assert!(matches!(SimplicialComplex::parse("{"), Err(Error::Json(_))));
        let empty = SimplicialComplex::parse(r#"{"maximal_faces":[]}"#).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn scenario_defaults_to_binary() {
        let s = Scenario::parse(r#"{"maximal_faces":[["a","b"]],"outcomes":{"a":3}}"#).unwrap();
        assert_eq!(s.cardinality("a"), Some(3));
        assert_eq!(s.cardinality("b"), Some(2));
        assert_eq!(Scenario::parse(&s.to_pretty()).unwrap(), s);
        // and a scenario reads as a complex
        assert_eq!(SimplicialComplex::parse(&s.to_pretty()).unwrap(), *s.complex());
    }

    #[test]
    fn model_round_trip() {
        for m in [pr_box(), svetlichny_box()] {
            let text = m.to_pretty();
            assert!(text.contains("\"1/2\"") || text.contains("\"1/4\""));
            assert_eq!(EmpiricalModel::parse(&text).unwrap(), m);
        }
    }

    #[test]
    fn model_cells_must_match_face() {
        let text = r#"{"scenario":{"maximal_faces":[["a"]]},
            "contexts":[{"face":["a"],"cells":[{"outcome":{"b":0},"p":"1"}]}]}"#;
        assert!(matches!(EmpiricalModel::parse(text), Err(Error::Document(_))));
    }

    #[test]
    fn functional_round_trip() {
        let f = xor_chsh().with_bound(Some(int(3)));
        let text = f.to_pretty();
        assert!(text.contains("\"bound\": \"3/1\""));
        assert_eq!(BellFunctional::parse(&text).unwrap(), f);
        let bare = BellFunctional::parse(r#"{"terms":[{"outcome":{"x":1},"coeff":"-2/4"}]}"#).unwrap();
        assert_eq!(bare.terms()[0].coeff, crate::rational::ratio(-1, 2));
        assert_eq!(bare.bound(), None);
    }

    #[test]
    fn partition_round_trip() {
        let p = VertexPartition::new([("m1", ["b1", "c1"]), ("m2", ["b2", "c2"])]).unwrap();
        assert_eq!(VertexPartition::parse(&p.to_pretty()).unwrap(), p);
        let dup = r#"{"blocks":[{"name":"m","members":["a"]},{"name":"n","members":["a"]}]}"#;
        assert!(matches!(VertexPartition::parse(dup), Err(Error::InvalidPartition(_))));
    }
}
