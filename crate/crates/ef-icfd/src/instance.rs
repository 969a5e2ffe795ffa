//! Problem instances and allocations.
//!
//! An instance is an undirected item graph, a table of additive agent
//! valuations over its vertices, a budget `p` of vertices to allocate,
//! and a setting flag deciding whether empty bundles are permitted.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    /// Agents may receive empty bundles.
    Optional,
    /// Every agent must receive a nonempty bundle.
    Mandatory,
}

/// A validated instance. Immutable after construction; all solver and
/// verifier operations are pure functions over it.
#[derive(Debug, Clone)]
pub struct Instance {
    vertices: Vec<String>,
    agents: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    /// valuations[agent][vertex]
    valuations: Vec<Vec<BigUint>>,
    p: usize,
    setting: Setting,
    vertex_index: HashMap<String, usize>,
    agent_index: HashMap<String, usize>,
}

impl Instance {
    /// Checks and assembles an instance from raw decoded data.
    ///
    /// Rejects duplicate ids, edges to unknown vertices, self-loops,
    /// `p > m`, and missing valuation entries. Valuations must cover
    /// every (agent, vertex) pair; missing entries are an error, not a
    /// default.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
        agents: Vec<String>,
        valuations: &BTreeMap<String, BTreeMap<String, BigUint>>,
        p: usize,
        setting: Setting,
    ) -> Result<Self> {
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let mut agent_index = HashMap::new();
        for (i, a) in agents.iter().enumerate() {
            if agent_index.insert(a.clone(), i).is_some() {
                return Err(Error::DuplicateAgent(a.clone()));
            }
        }
        if p > vertices.len() {
            return Err(Error::BudgetTooLarge {
                p,
                m: vertices.len(),
            });
        }
        let mut edge_set = BTreeSet::new();
        for (x, y) in &edges {
            let xi = *vertex_index
                .get(x)
                .ok_or_else(|| Error::UnknownVertex(x.clone()))?;
            let yi = *vertex_index
                .get(y)
                .ok_or_else(|| Error::UnknownVertex(y.clone()))?;
            if xi == yi {
                return Err(Error::SelfLoop(x.clone(), y.clone()));
            }
            edge_set.insert((xi.min(yi), xi.max(yi)));
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        for &(x, y) in &edges {
            adj[x].push(y);
            adj[y].push(x);
        }
        let mut table = Vec::with_capacity(agents.len());
        for a in &agents {
            let row_in = valuations.get(a).ok_or_else(|| Error::MissingValuation {
                agent: a.clone(),
                vertex: vertices.first().cloned().unwrap_or_default(),
            })?;
            for v in row_in.keys() {
                if !vertex_index.contains_key(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
            }
            let mut row = Vec::with_capacity(vertices.len());
            for v in &vertices {
                let val = row_in.get(v).ok_or_else(|| Error::MissingValuation {
                    agent: a.clone(),
                    vertex: v.clone(),
                })?;
                row.push(val.clone());
            }
            table.push(row);
        }
        for a in valuations.keys() {
            if !agent_index.contains_key(a) {
                return Err(Error::UnknownAgent(a.clone()));
            }
        }
        Ok(Instance {
            vertices,
            agents,
            edges,
            adj,
            valuations: table,
            p,
            setting,
            vertex_index,
            agent_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn agent_id(&self, a: usize) -> &str {
        &self.agents[a]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn agent_index(&self, id: &str) -> Result<usize> {
        self.agent_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownAgent(id.to_string()))
    }

    pub fn valuation(&self, agent: usize, vertex: usize) -> &BigUint {
        &self.valuations[agent][vertex]
    }

    pub fn valuation_row(&self, agent: usize) -> &[BigUint] {
        &self.valuations[agent]
    }

    /// M: the largest valuation over all agents and vertices.
    pub fn max_valuation(&self) -> BigUint {
        self.valuations
            .iter()
            .flat_map(|row| row.iter())
            .max()
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Exact additive value of a bundle of vertex indices.
    pub fn bundle_value_indices(&self, agent: usize, bundle: &[usize]) -> BigUint {
        bundle
            .iter()
            .map(|&v| &self.valuations[agent][v])
            .sum::<BigUint>()
    }

    /// Whether the subgraph induced by `bundle` is connected. The empty
    /// bundle counts as connected.
    pub fn is_connected_subset(&self, bundle: &[usize]) -> bool {
        if bundle.len() <= 1 {
            return true;
        }
        let members: BTreeSet<usize> = bundle.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![*bundle.first().unwrap()];
        seen.insert(*bundle.first().unwrap());
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if members.contains(&u) && seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.len() == members.len()
    }

    /// Returns the same instance with a different agent list (used by the
    /// agent-count reduction rule). Valuation rows follow their agents.
    pub fn with_agents(&self, keep: &[usize]) -> Instance {
        let agents: Vec<String> = keep.iter().map(|&a| self.agents[a].clone()).collect();
        let valuations: Vec<Vec<BigUint>> =
            keep.iter().map(|&a| self.valuations[a].clone()).collect();
        let agent_index = agents
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Instance {
            vertices: self.vertices.clone(),
            agents,
            edges: self.edges.clone(),
            adj: self.adj.clone(),
            valuations,
            p: self.p,
            setting: self.setting,
            vertex_index: self.vertex_index.clone(),
            agent_index,
        }
    }

    /// Same instance with the other setting flag.
    pub fn with_setting(&self, setting: Setting) -> Instance {
        let mut inst = self.clone();
        inst.setting = setting;
        inst
    }
}

/// Exact additive value of a named bundle for a named agent.
pub fn bundle_value(inst: &Instance, agent: &str, bundle: &BTreeSet<String>) -> Result<BigUint> {
    let a = inst.agent_index(agent)?;
    let mut sum = BigUint::zero();
    for v in bundle {
        sum += inst.valuation(a, inst.vertex_index(v)?);
    }
    Ok(sum)
}

/// Per-agent vertex bundles. Agents absent from the map hold the empty
/// bundle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation {
    pub bundles: BTreeMap<String, BTreeSet<String>>,
}

impl Allocation {
    pub fn empty() -> Self {
        Allocation::default()
    }

    pub fn from_indices(inst: &Instance, bundles: &[Vec<usize>]) -> Self {
        let mut map = BTreeMap::new();
        for (a, bundle) in bundles.iter().enumerate() {
            if !bundle.is_empty() {
                map.insert(
                    inst.agent_id(a).to_string(),
                    bundle.iter().map(|&v| inst.vertex_id(v).to_string()).collect(),
                );
            }
        }
        Allocation { bundles: map }
    }

    /// Resolves bundles to vertex indices, one entry per instance agent.
    pub fn to_indices(&self, inst: &Instance) -> Result<Vec<Vec<usize>>> {
        let mut out = vec![Vec::new(); inst.agent_count()];
        for (agent, bundle) in &self.bundles {
            let a = inst.agent_index(agent)?;
            for v in bundle {
                out[a].push(inst.vertex_index(v)?);
            }
            out[a].sort_unstable();
        }
        Ok(out)
    }
}

/// Partition of the agents into maximal classes with identical valuation
/// rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentTypePartition {
    /// Classes of agent indices, each sorted; classes ordered by their
    /// smallest member.
    pub classes: Vec<Vec<usize>>,
}

impl AgentTypePartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Groups agents by identical valuation vectors.
pub fn agent_types(inst: &Instance) -> AgentTypePartition {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..inst.agent_count() {
        match classes
            .iter_mut()
            .find(|c| inst.valuation_row(c[0]) == inst.valuation_row(a))
        {
            Some(c) => c.push(a),
            None => classes.push(vec![a]),
        }
    }
    AgentTypePartition { classes }
}
