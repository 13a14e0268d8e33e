//! JSON documents: models, measures, couplings, instances and solver results.
//!
//! Weights travel as strings (`"1/4"` or `"0.25"`) and are parsed exactly.
//! Written documents always use fraction strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measure::{Coupling, DiscreteMeasure};
use crate::rational::{format_rational, parse_probability, parse_rational};
use crate::spacetime::{CausalGraphModel, Edge, EdgeKind, EventId, MinkowskiModel, SpacetimeModel};
use crate::transport::{Certificate, LorentzWasserstein, Precedence};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelDocument {
    Minkowski {
        spatial_dim: usize,
        events: Vec<Vec<f64>>,
    },
    Graph {
        n: usize,
        edges: Vec<(usize, usize, String, EdgeKind)>,
    },
}

impl ModelDocument {
    pub fn from_model(model: &SpacetimeModel) -> Self {
        match model {
            SpacetimeModel::Minkowski(m) => ModelDocument::Minkowski {
                spatial_dim: m.spatial_dim(),
                events: m.events().to_vec(),
            },
            SpacetimeModel::Graph(g) => ModelDocument::Graph {
                n: g.len(),
                edges: g
                    .edges()
                    .iter()
                    .map(|e| (e.src.index(), e.dst.index(), format_rational(&e.weight), e.kind))
                    .collect(),
            },
        }
    }

    pub fn to_model(&self) -> Result<SpacetimeModel> {
        Ok(match self {
            ModelDocument::Minkowski {
                spatial_dim,
                events,
            } => MinkowskiModel::new(*spatial_dim, events.clone())?.into(),
            ModelDocument::Graph { n, edges } => {
                let edges = edges
                    .iter()
                    .map(|(src, dst, w, kind)| {
                        Ok(Edge {
                            src: EventId(*src),
                            dst: EventId(*dst),
                            weight: parse_rational(w)?,
                            kind: *kind,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                CausalGraphModel::new(*n, edges)?.into()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub atoms: Vec<(usize, String)>,
}

impl MeasureDocument {
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        MeasureDocument {
            atoms: mu.atoms().map(|(p, w)| (p.index(), format_rational(w))).collect(),
        }
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|(p, w)| Ok((EventId(*p), parse_probability(w)?)))
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(atoms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingDocument {
    pub entries: Vec<(usize, usize, String)>,
}

impl CouplingDocument {
    pub fn from_coupling(coupling: &Coupling) -> Self {
        CouplingDocument {
            entries: coupling
                .entries()
                .map(|((p, q), w)| (p.index(), q.index(), format_rational(w)))
                .collect(),
        }
    }

    pub fn to_coupling(&self) -> Result<Coupling> {
        let entries = self
            .entries
            .iter()
            .map(|(p, q, w)| Ok(((EventId(*p), EventId(*q)), parse_probability(w)?)))
            .collect::<Result<Vec<_>>>()?;
        Coupling::new(entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    #[serde(rename = "K")]
    pub generator: Vec<usize>,
    #[serde(rename = "F")]
    pub violating_set: Vec<usize>,
    #[serde(rename = "mu_F")]
    pub mu_mass: String,
    #[serde(rename = "nu_F")]
    pub nu_mass: String,
}

impl CertificateDocument {
    pub fn from_certificate(cert: &Certificate) -> Self {
        CertificateDocument {
            generator: cert.generator().iter().map(|p| p.index()).collect(),
            violating_set: cert.violating_set().iter().map(|p| p.index()).collect(),
            mu_mass: format_rational(cert.mu_mass()),
            nu_mass: format_rational(cert.nu_mass()),
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate> {
        Ok(Certificate::new(
            self.generator.iter().map(|&p| EventId(p)).collect(),
            self.violating_set.iter().map(|&p| EventId(p)).collect(),
            parse_rational(&self.mu_mass)?,
            parse_rational(&self.nu_mass)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct InstanceDocument {
    model: ModelDocument,
    #[serde(default)]
    measures: BTreeMap<String, MeasureDocument>,
}

/// A model with named measures on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub model: SpacetimeModel,
    pub measures: BTreeMap<String, DiscreteMeasure>,
}

impl Instance {
    /// Builds an instance, checking that every atom is an event of `model`.
    pub fn new(model: SpacetimeModel, measures: BTreeMap<String, DiscreteMeasure>) -> Result<Self> {
        for (label, m) in &measures {
            m.validate_in(&model)
                .map_err(|e| Error::Document(format!("measure {label:?}: {e}")))?;
        }
        Ok(Instance { model, measures })
    }

    pub fn measure(&self, label: &str) -> Result<&DiscreteMeasure> {
        self.measures.get(label).ok_or_else(|| {
            let known: Vec<&str> = self.measures.keys().map(String::as_str).collect();
            Error::Document(format!("no measure labelled {label:?} (have {known:?})"))
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        let model = doc.model.to_model()?;
        let measures = doc
            .measures
            .iter()
            .map(|(label, m)| {
                m.to_measure()
                    .map(|m| (label.clone(), m))
                    .map_err(|e| Error::Document(format!("measure {label:?}: {e}")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Instance::new(model, measures)
    }

    pub fn to_value(&self) -> Value {
        let doc = InstanceDocument {
            model: ModelDocument::from_model(&self.model),
            measures: self
                .measures
                .iter()
                .map(|(k, m)| (k.clone(), MeasureDocument::from_measure(m)))
                .collect(),
        };
        serde_json::to_value(doc).expect("documents serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("documents serialize")
    }
}

pub fn precedence_value(result: &Precedence) -> Value {
    match result {
        Precedence::Feasible(c) => json!({
            "status": "feasible",
            "coupling": CouplingDocument::from_coupling(c),
        }),
        Precedence::Infeasible(cert) => json!({
            "status": "infeasible",
            "certificate": CertificateDocument::from_certificate(cert),
        }),
    }
}

/// `{"lw": "inf" | decimal, "s": s, "optimal_coupling": ...}`; the distance
/// is printed with 12 significant digits.
pub fn distance_value(lw: &LorentzWasserstein) -> Value {
    json!({
        "lw": lw.value.to_string(),
        "s": lw.s,
        "optimal_coupling": lw.optimal_coupling.as_ref().map(CouplingDocument::from_coupling),
    })
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use proptest::prelude::*;

    use super::*;
    use crate::spacetime::ExtendedReal;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const GRAPH: &str = r#"{
        "model": {"type": "graph", "n": 3,
                  "edges": [[0, 1, "1/2", "timelike"], [1, 2, "0", "null"]]},
        "measures": {"mu": {"atoms": [[0, "0.25"], [1, "3/4"]]},
                     "nu": {"atoms": [[2, "1"]]}}
    }"#;

    #[test]
    fn parses_decimal_and_fraction_weights() {
        let inst = Instance::from_json(GRAPH).unwrap();
        assert_eq!(inst.measure("mu").unwrap().weight(EventId(0)), q(1, 4));
        assert_eq!(inst.model.lorentz_distance(EventId(0), EventId(2)).unwrap(), ExtendedReal::finite(0.5));
        assert!(matches!(inst.measure("rho"), Err(Error::Document(_))));
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_weight = GRAPH.replace("\"0.25\"", "\"0.5\"");
        assert!(Instance::from_json(&bad_weight).is_err());
        let bad_event = GRAPH.replace("[[2, \"1\"]]", "[[7, \"1\"]]");
        assert!(Instance::from_json(&bad_event).is_err());
        let bad_kind = GRAPH.replace("\"1/2\", \"timelike\"", "\"0\", \"timelike\"");
        assert!(Instance::from_json(&bad_kind).is_err());
        assert!(Instance::from_json("{").is_err());
    }

    #[test]
    fn minkowski_round_trip() {
        let text = r#"{"model": {"type": "minkowski", "spatial_dim": 2,
                        "events": [[0, 0, 0], [1.5, 0.1, -0.3]]},
                       "measures": {}}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn certificate_document_keys() {
        let cert = Certificate::new(vec![EventId(0)], vec![EventId(0), EventId(1)], q(1, 1), q(1, 2));
        let v = serde_json::to_value(CertificateDocument::from_certificate(&cert)).unwrap();
        assert_eq!(v, json!({"K": [0], "F": [0, 1], "mu_F": "1", "nu_F": "1/2"}));
        let back: CertificateDocument = serde_json::from_value(v).unwrap();
        assert_eq!(back.to_certificate().unwrap(), cert);
    }

    proptest! {
        #[test]
        fn instances_round_trip(
            n in 1usize..6,
            raw in prop::collection::vec((0usize..6, 0usize..6, 0i64..5, 1i64..5), 0..8),
            coords in prop::collection::vec(-1e6f64..1e6, 4),
            weights in prop::collection::vec(1u32..9, 1..6),
        ) {
            let edges = raw
                .into_iter()
                .filter(|&(a, b, _, _)| a < n && b < n)
                .map(|(a, b, w, d)| if w == 0 { Edge::null(a, b) } else { Edge::timelike(a, b, q(w, d)) })
                .collect();
            let graph: SpacetimeModel = CausalGraphModel::new(n, edges).unwrap().into();
            let total: u32 = weights.iter().take(n).sum();
            let mu = DiscreteMeasure::new(
                weights.iter().take(n).enumerate().map(|(i, &w)| (EventId(i), BigRational::new(w.into(), total.into()))),
            ).unwrap();
            let inst = Instance::new(graph, BTreeMap::from([("mu".to_string(), mu.clone())])).unwrap();
            prop_assert_eq!(&Instance::from_json(&inst.to_json()).unwrap(), &inst);

            let mink: SpacetimeModel = MinkowskiModel::new(1, vec![coords[..2].to_vec(), coords[2..].to_vec()]).unwrap().into();
            let inst = Instance::new(mink, BTreeMap::new()).unwrap();
            prop_assert_eq!(&Instance::from_json(&inst.to_json()).unwrap(), &inst);

            let c = crate::measure::diagonal(&mu);
            let doc = CouplingDocument::from_coupling(&c);
            let text = serde_json::to_string(&doc).unwrap();
            let back: CouplingDocument = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_coupling().unwrap(), c);
        }
    }
}
