//! The associated graph of a shared graph state and its measurement calculus.
//!
//! A [`Graph`] is an undirected simple graph whose vertex set is partitioned
//! into orchestrator-held and client-held vertices. Measuring a qubit in a
//! Pauli basis acts on the associated graph through local complementation and
//! vertex deletion; [`Graph::transform_x`], [`Graph::transform_y`] and
//! [`Graph::transform_z`] implement those rules. All transforms are value
//! semantics: they return a new graph and leave the receiver untouched, so a
//! caller can keep the pre-measurement graph around (the correction-target
//! rules read neighborhoods from it).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Stable identifier of a graph vertex and of the qubit attached to it.
///
/// Ids are assigned by the caller and never reused within a run: deleting a
/// vertex retires its id rather than compacting the remaining ones, so traces
/// and reports stay readable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the orchestrator/client partition a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Orchestrator,
    Client,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is already in the graph")]
    DuplicateVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {b0} is not a neighbor of vertex {a}")]
    NotANeighbor { a: VertexId, b0: VertexId },
    #[error("vertex {0} has no neighbors")]
    EmptyNeighborhood(VertexId),
    #[error("a linear chain needs at least 2 clients, got {0}")]
    ChainTooShort(usize),
}

/// Undirected simple graph with an orchestrator/client vertex partition.
///
/// Adjacency is stored as per-vertex sorted sets, which keeps local
/// complementation an O(|N|^2) symmetric difference and makes every iteration
/// order deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
    orchestrator: BTreeSet<VertexId>,
    clients: BTreeSet<VertexId>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Linear chain `c1 - o1 - c2 - o2 - ... - o_{k-1} - c_k` on `2k-1`
    /// vertices indexed `0..2k-1` in that order. Clients sit on even indices,
    /// orchestrator vertices on odd ones.
    pub fn linear_chain(clients: usize) -> Result<Self, GraphError> {
        if clients < 2 {
            return Err(GraphError::ChainTooShort(clients));
        }
        let n = 2 * clients - 1;
        let mut g = Graph::new();
        for i in 0..n as u32 {
            let role = if i % 2 == 0 { Role::Client } else { Role::Orchestrator };
            g.add_vertex(VertexId(i), role).expect("fresh vertex");
        }
        for i in 0..(n - 1) as u32 {
            g.add_edge(VertexId(i), VertexId(i + 1)).expect("valid edge");
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId, role: Role) -> Result<(), GraphError> {
        if self.adjacency.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adjacency.insert(v, BTreeSet::new());
        match role {
            Role::Orchestrator => self.orchestrator.insert(v),
            Role::Client => self.clients.insert(v),
        };
        Ok(())
    }

    /// Inserts the undirected edge `{a, b}`. Re-inserting an existing edge is
    /// a no-op (set semantics).
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for v in [a, b] {
            if !self.adjacency.contains_key(&v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        self.adjacency.get_mut(&a).expect("checked").insert(b);
        self.adjacency.get_mut(&b).expect("checked").insert(a);
        Ok(())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn orchestrator_vertices(&self) -> &BTreeSet<VertexId> {
        &self.orchestrator
    }

    pub fn client_vertices(&self) -> &BTreeSet<VertexId> {
        &self.clients
    }

    pub fn role(&self, v: VertexId) -> Option<Role> {
        if self.orchestrator.contains(&v) {
            Some(Role::Orchestrator)
        } else if self.clients.contains(&v) {
            Some(Role::Client)
        } else {
            None
        }
    }

    /// Edges as `(a, b)` pairs with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (&a, nbrs) in &self.adjacency {
            for &b in nbrs.range(a..) {
                if b > a {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// The set of vertices adjacent to `a`.
    pub fn neighborhood(&self, a: VertexId) -> Result<&BTreeSet<VertexId>, GraphError> {
        self.adjacency.get(&a).ok_or(GraphError::UnknownVertex(a))
    }

    /// Local complementation τ_a: complements the edge set among the
    /// neighbors of `a`; everything else (including the partition) is kept.
    pub fn local_complement(&self, a: VertexId) -> Result<Graph, GraphError> {
        let nbrs: Vec<VertexId> = self.neighborhood(a)?.iter().copied().collect();
        let mut out = self.clone();
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if out.has_edge(u, w) {
                    out.adjacency.get_mut(&u).expect("neighbor").remove(&w);
                    out.adjacency.get_mut(&w).expect("neighbor").remove(&u);
                } else {
                    out.adjacency.get_mut(&u).expect("neighbor").insert(w);
                    out.adjacency.get_mut(&w).expect("neighbor").insert(u);
                }
            }
        }
        Ok(out)
    }

    /// Removes `a`, its incident edges, and its partition entry.
    pub fn delete_vertex(&self, a: VertexId) -> Result<Graph, GraphError> {
        if !self.contains(a) {
            return Err(GraphError::UnknownVertex(a));
        }
        let mut out = self.clone();
        let nbrs = out.adjacency.remove(&a).expect("checked");
        for b in nbrs {
            out.adjacency.get_mut(&b).expect("symmetric adjacency").remove(&a);
        }
        out.orchestrator.remove(&a);
        out.clients.remove(&a);
        Ok(out)
    }

    /// Graph left by a σ_z measurement of `a`: `G - a`.
    pub fn transform_z(&self, a: VertexId) -> Result<Graph, GraphError> {
        self.delete_vertex(a)
    }

    /// Graph left by a σ_y measurement of `a`: `τ_a(G) - a`.
    pub fn transform_y(&self, a: VertexId) -> Result<Graph, GraphError> {
        self.local_complement(a)?.delete_vertex(a)
    }

    /// Graph left by a σ_x measurement of `a` with support vertex `b0`:
    /// `τ_b0(τ_a(τ_b0(G)) - a)`. Requires `b0` to be a neighbor of `a`.
    pub fn transform_x(&self, a: VertexId, b0: VertexId) -> Result<Graph, GraphError> {
        let na = self.neighborhood(a)?;
        if na.is_empty() {
            return Err(GraphError::EmptyNeighborhood(a));
        }
        if !na.contains(&b0) {
            return Err(GraphError::NotANeighbor { a, b0 });
        }
        self.local_complement(b0)?
            .local_complement(a)?
            .delete_vertex(a)?
            .local_complement(b0)
    }

    /// Display name used in DOT output: `o<r>` / `c<r>` where `r` is the
    /// 1-based rank of the vertex within its partition side, by id order.
    pub fn display_name(&self, v: VertexId) -> Option<String> {
        if let Some(rank) = self.orchestrator.iter().position(|&u| u == v) {
            return Some(format!("o{}", rank + 1));
        }
        self.clients.iter().position(|&u| u == v).map(|rank| format!("c{}", rank + 1))
    }

    /// Graphviz rendering of the graph. Node and edge lines are ordered by
    /// vertex id; orchestrator vertices are boxes, clients are ellipses.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in self.vertices() {
            let name = self.display_name(v).expect("vertex has a side");
            let shape = match self.role(v).expect("vertex has a side") {
                Role::Orchestrator => "box",
                Role::Client => "ellipse",
            };
            out.push_str(&format!("  {name} [shape={shape}];\n"));
        }
        for (a, b) in self.edges() {
            let na = self.display_name(a).expect("vertex has a side");
            let nb = self.display_name(b).expect("vertex has a side");
            out.push_str(&format!("  {na} -- {nb};\n"));
        }
        out.push_str("}\n");
        out
    }
}

// Serialized as flat sorted lists so that scenario hashes and reports are
// stable across runs.
impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Graph", 4)?;
        s.serialize_field("vertices", &self.vertices().collect::<Vec<_>>())?;
        s.serialize_field("orchestrator_vertices", &self.orchestrator)?;
        s.serialize_field("client_vertices", &self.clients)?;
        s.serialize_field("edges", &self.edges())?;
        s.end()
    }
}
