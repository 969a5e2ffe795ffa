//! JSON document formats for instances, allocations, vector-sum inputs
//! and motif graphs.
//!
//! Big integers travel as decimal strings so arbitrary precision
//! survives the round trip; plain JSON integers are accepted on input
//! for convenience. Serialized maps are `BTreeMap`s, so output keys are
//! sorted and documents diff cleanly.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::VectorSumInstance;
use crate::instance::{Allocation, Instance, Setting};
use crate::motif::ColoredWeightedGraph;

/// A nonnegative big integer encoded as a decimal string or a JSON
/// integer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Uint {
    Text(String),
    Number(u64),
}

impl Uint {
    fn parse(&self, context: impl Fn() -> Error) -> Result<BigUint> {
        match self {
            Uint::Number(n) => Ok(BigUint::from(*n)),
            Uint::Text(s) => {
                let s = s.trim();
                if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(context());
                }
                s.parse().map_err(|_| context())
            }
        }
    }
}

fn uint_text(v: &BigUint) -> Uint {
    Uint::Text(v.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub agents: Vec<String>,
    /// `valuations[agent][vertex]`, decimal strings.
    pub valuations: BTreeMap<String, BTreeMap<String, Uint>>,
    pub p: usize,
    pub setting: Setting,
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let doc: InstanceJson = serde_json::from_str(text)?;
    let mut valuations = BTreeMap::new();
    for (agent, row) in &doc.valuations {
        let mut parsed = BTreeMap::new();
        for (vertex, raw) in row {
            let value = raw.parse(|| Error::BadValuation {
                agent: agent.clone(),
                vertex: vertex.clone(),
                text: match raw {
                    Uint::Text(s) => s.clone(),
                    Uint::Number(n) => n.to_string(),
                },
            })?;
            parsed.insert(vertex.clone(), value);
        }
        valuations.insert(agent.clone(), parsed);
    }
    Instance::new(
        doc.vertices,
        doc.edges,
        doc.agents,
        &valuations,
        doc.p,
        doc.setting,
    )
}

pub fn instance_to_json(inst: &Instance) -> String {
    let valuations: BTreeMap<String, BTreeMap<String, Uint>> = inst
        .agents()
        .iter()
        .enumerate()
        .map(|(a, agent)| {
            let row = inst
                .vertices()
                .iter()
                .enumerate()
                .map(|(v, vertex)| (vertex.clone(), uint_text(inst.valuation(a, v))))
                .collect();
            (agent.clone(), row)
        })
        .collect();
    let doc = InstanceJson {
        vertices: inst.vertices().to_vec(),
        edges: inst
            .edges()
            .iter()
            .map(|&(x, y)| (inst.vertex_id(x).to_string(), inst.vertex_id(y).to_string()))
            .collect(),
        agents: inst.agents().to_vec(),
        valuations,
        p: inst.p(),
        setting: inst.setting(),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllocationJson {
    /// Agent id to sorted vertex ids; agents may be absent (empty
    /// bundle).
    pub bundles: BTreeMap<String, Vec<String>>,
}

pub fn allocation_from_json(text: &str) -> Result<Allocation> {
    let doc: AllocationJson = serde_json::from_str(text)?;
    Ok(Allocation {
        bundles: doc
            .bundles
            .into_iter()
            .map(|(agent, vs)| (agent, vs.into_iter().collect()))
            .collect(),
    })
}

pub fn allocation_to_json(alloc: &Allocation) -> String {
    let doc = AllocationJson {
        bundles: alloc
            .bundles
            .iter()
            .map(|(agent, vs)| (agent.clone(), vs.iter().cloned().collect()))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("allocation serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorSumJson {
    pub vectors: Vec<Vec<Uint>>,
    pub target: Vec<Uint>,
    pub k: usize,
}

pub fn vector_sum_from_json(text: &str) -> Result<VectorSumInstance> {
    let doc: VectorSumJson = serde_json::from_str(text)?;
    let bad = |raw: &Uint| {
        Error::BadVectorSum(format!(
            "entry {} is not a nonnegative integer",
            match raw {
                Uint::Text(s) => s.clone(),
                Uint::Number(n) => n.to_string(),
            }
        ))
    };
    let vectors = doc
        .vectors
        .iter()
        .map(|v| v.iter().map(|x| x.parse(|| bad(x))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let target = doc
        .target
        .iter()
        .map(|x| x.parse(|| bad(x)))
        .collect::<Result<_>>()?;
    let vs = VectorSumInstance {
        vectors,
        target,
        k: doc.k,
    };
    vs.check()?;
    Ok(vs)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotifGraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub weights: BTreeMap<String, Uint>,
    pub classes: Vec<Vec<String>>,
}

/// Decodes a named motif graph; returns the index-based graph plus the
/// vertex-name table for rendering solutions.
pub fn motif_from_json(text: &str) -> Result<(ColoredWeightedGraph, Vec<String>)> {
    let doc: MotifGraphJson = serde_json::from_str(text)?;
    let index: BTreeMap<&str, usize> = doc
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    if index.len() != doc.vertices.len() {
        return Err(Error::BadPartition("duplicate vertex id".into()));
    }
    let resolve = |name: &str| -> Result<usize> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    };
    let edges = doc
        .edges
        .iter()
        .map(|(x, y)| Ok((resolve(x)?, resolve(y)?)))
        .collect::<Result<_>>()?;
    let mut weights = Vec::with_capacity(doc.vertices.len());
    for v in &doc.vertices {
        let raw = doc
            .weights
            .get(v)
            .ok_or_else(|| Error::BadPartition(format!("vertex `{}` has no weight", v)))?;
        weights.push(raw.parse(|| {
            Error::BadPartition(format!("weight of `{}` is not a nonnegative integer", v))
        })?);
    }
    let classes = doc
        .classes
        .iter()
        .map(|class| class.iter().map(|v| resolve(v)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let g = ColoredWeightedGraph {
        vertex_count: doc.vertices.len(),
        edges,
        weights,
        classes,
    };
    Ok((g, doc.vertices))
}

pub fn vector_sum_to_json(vs: &VectorSumInstance) -> String {
    let doc = VectorSumJson {
        vectors: vs
            .vectors
            .iter()
            .map(|v| v.iter().map(uint_text).collect())
            .collect(),
        target: vs.target.iter().map(uint_text).collect(),
        k: vs.k,
    };
    serde_json::to_string_pretty(&doc).expect("vector-sum serializes")
}
