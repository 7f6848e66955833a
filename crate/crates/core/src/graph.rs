//! Directed weighted graph with fixed node roles.
//!
//! Node ids are dense `0..N`. Ids 0 and 1 are the input placeholders, id 2 is
//! the output node and every id from 3 upwards is a hidden node. Edges are
//! stored in a dense `N x N` table, which keeps the (tiny) networks cache
//! friendly and makes every iteration order lexicographic in `(source, target)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::SimRng;

/// Number of input placeholder nodes.
pub const INPUT_COUNT: usize = 2;
/// The single output node.
pub const OUTPUT_NODE: NodeId = NodeId(2);
/// First hidden node id.
pub const FIRST_HIDDEN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Input,
    Hidden,
    Output,
}

/// How the diagonal of a local Laplacian is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreeMode {
    /// `D = D_in + D_out`, edge counts.
    Directed,
    /// `D_W = D_Win + D_Wout`, edge-weight sums. May be zero or negative.
    Weighted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    OutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("input node {0} cannot be the target of an edge")]
    InputTarget(NodeId),
    #[error("weight of edge {from} -> {to} is not finite")]
    NonFiniteWeight { from: NodeId, to: NodeId },
}

/// Directed weighted graph, at most one edge per ordered pair, no self-loops,
/// no edges into input nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGraph {
    node_count: usize,
    weights: Vec<Option<f64>>,
    edge_count: usize,
}

impl NetworkGraph {
    /// Graph with the two inputs, the output and `n_hidden` hidden nodes, and no edges.
    pub fn empty(n_hidden: usize) -> Self {
        let node_count = FIRST_HIDDEN + n_hidden;
        Self {
            node_count,
            weights: vec![None; node_count * node_count],
            edge_count: 0,
        }
    }

    /// Fully connected graph (every ordered pair except self-loops and edges
    /// into the inputs) with weights uniform on `[-1, 1]`.
    pub fn fully_connected(n_hidden: usize, seed: u64) -> Self {
        Self::fully_connected_with(n_hidden, &mut crate::seeded_rng(seed))
    }

    /// Same as [`NetworkGraph::fully_connected`] but draws from an existing
    /// generator. Weights are drawn in ascending `(source, target)` order.
    pub fn fully_connected_with(n_hidden: usize, rng: &mut SimRng) -> Self {
        let mut graph = Self::empty(n_hidden);
        let n = graph.node_count;
        for source in 0..n {
            for target in INPUT_COUNT..n {
                if source == target {
                    continue;
                }
                let weight = rng.random_range(-1.0..=1.0);
                graph.weights[source * n + target] = Some(weight);
                graph.edge_count += 1;
            }
        }
        graph
    }

    /// `N(N-1) - 2(N-1)`: the edge count of a freshly initialized graph on `node_count` nodes.
    pub fn full_edge_count(node_count: usize) -> usize {
        node_count * (node_count - 1) - INPUT_COUNT * (node_count - 1)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn hidden_count(&self) -> usize {
        self.node_count - FIRST_HIDDEN
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn role(&self, node: NodeId) -> Role {
        match node.0 {
            0 | 1 => Role::Input,
            2 => Role::Output,
            _ => Role::Hidden,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    /// Every node that executes behaviors (output and hidden nodes), ascending.
    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> {
        (INPUT_COUNT..self.node_count).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 < self.node_count
    }

    fn check(&self, node: NodeId) -> Result<(), GraphError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(GraphError::OutOfRange {
                node,
                node_count: self.node_count,
            })
        }
    }

    pub fn weight(&self, source: NodeId, target: NodeId) -> Option<f64> {
        if !self.contains(source) || !self.contains(target) {
            return None;
        }
        self.weights[source.0 * self.node_count + target.0]
    }

    pub fn has_edge(&self, source: NodeId, target: NodeId) -> bool {
        self.weight(source, target).is_some()
    }

    /// Inserts or overwrites the edge `source -> target`.
    pub fn set_edge(&mut self, source: NodeId, target: NodeId, weight: f64) -> Result<(), GraphError> {
        self.check(source)?;
        self.check(target)?;
        if source == target {
            return Err(GraphError::SelfLoop(source));
        }
        if self.role(target) == Role::Input {
            return Err(GraphError::InputTarget(target));
        }
        if !weight.is_finite() {
            return Err(GraphError::NonFiniteWeight { from: source, to: target });
        }
        let slot = &mut self.weights[source.0 * self.node_count + target.0];
        if slot.is_none() {
            self.edge_count += 1;
        }
        *slot = Some(weight);
        Ok(())
    }

    /// Changes the weight of an existing edge. Returns `false` if the edge is absent.
    pub fn update_weight(&mut self, source: NodeId, target: NodeId, weight: f64) -> bool {
        if !self.contains(source) || !self.contains(target) {
            return false;
        }
        match &mut self.weights[source.0 * self.node_count + target.0] {
            Some(w) => {
                *w = weight;
                true
            }
            None => false,
        }
    }

    /// Removes `source -> target`. Returns whether an edge was actually removed.
    pub fn remove_edge(&mut self, source: NodeId, target: NodeId) -> bool {
        if !self.contains(source) || !self.contains(target) {
            return false;
        }
        let removed = self.weights[source.0 * self.node_count + target.0].take().is_some();
        if removed {
            self.edge_count -= 1;
        }
        removed
    }

    /// All edges in ascending `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.node_count;
        self.weights.iter().enumerate().filter_map(move |(idx, w)| {
            w.map(|weight| Edge {
                source: NodeId(idx / n),
                target: NodeId(idx % n),
                weight,
            })
        })
    }

    /// `(source, weight)` for every edge into `node`, ascending by source.
    pub fn in_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let n = self.node_count;
        let t = node.0;
        (0..n).filter_map(move |s| self.weights[s * n + t].map(|w| (NodeId(s), w)))
    }

    /// `(target, weight)` for every edge out of `node`, ascending by target.
    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let n = self.node_count;
        let row = &self.weights[node.0 * n..(node.0 + 1) * n];
        row.iter()
            .enumerate()
            .filter_map(|(t, w)| w.map(|w| (NodeId(t), w)))
    }

    /// Focal node plus all in- and out-neighbors, with the full induced subgraph.
    pub fn neighborhood(&self, focal: NodeId) -> Neighborhood {
        assert!(self.contains(focal), "node {focal} out of range");
        let n = self.node_count;
        let members: Vec<NodeId> = (0..n)
            .filter(|&i| {
                i == focal.0
                    || self.weights[i * n + focal.0].is_some()
                    || self.weights[focal.0 * n + i].is_some()
            })
            .map(NodeId)
            .collect();
        let mut edges = Vec::new();
        for &s in &members {
            for &t in &members {
                if let Some(weight) = self.weights[s.0 * n + t.0] {
                    edges.push(Edge {
                        source: s,
                        target: t,
                        weight,
                    });
                }
            }
        }
        Neighborhood {
            focal,
            members,
            edges,
        }
    }

    /// True when some input node has a directed path to the output node.
    pub fn output_reachable(&self) -> bool {
        let n = self.node_count;
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..INPUT_COUNT).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(s) = stack.pop() {
            if s == OUTPUT_NODE.0 {
                return true;
            }
            for (t, visited) in seen.iter_mut().enumerate() {
                if !*visited && self.weights[s * n + t].is_some() {
                    *visited = true;
                    stack.push(t);
                }
            }
        }
        false
    }
}

/// A node's local view: the focal node, its in/out neighbors (ascending ids)
/// and every edge of the graph with both endpoints among them.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    focal: NodeId,
    members: Vec<NodeId>,
    edges: Vec<Edge>,
}

impl Neighborhood {
    /// Builds a neighborhood directly. Members are sorted and deduplicated;
    /// edges with an endpoint outside the member set are dropped.
    pub fn from_parts(focal: NodeId, members: impl IntoIterator<Item = NodeId>, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut members: Vec<NodeId> = members.into_iter().chain(core::iter::once(focal)).collect();
        members.sort_unstable();
        members.dedup();
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .filter(|e| {
                e.source != e.target
                    && members.binary_search(&e.source).is_ok()
                    && members.binary_search(&e.target).is_ok()
            })
            .collect();
        edges.sort_by_key(|e| (e.source, e.target));
        edges.dedup_by_key(|e| (e.source, e.target));
        Self {
            focal,
            members,
            edges,
        }
    }

    pub fn focal(&self) -> NodeId {
        self.focal
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn induced_edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Row/column index of `node` in local matrices.
    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.members.binary_search(&node).ok()
    }

    /// Diagonal of the local degree matrix, indexed like [`Neighborhood::members`].
    /// Only induced edges contribute.
    pub fn degree_matrix(&self, mode: DegreeMode) -> Vec<f64> {
        let mut diag = vec![0.0; self.members.len()];
        for e in &self.edges {
            let contribution = match mode {
                DegreeMode::Directed => 1.0,
                DegreeMode::Weighted => e.weight,
            };
            // both endpoints are members by construction
            let s = self.position(e.source).unwrap();
            let t = self.position(e.target).unwrap();
            diag[s] += contribution;
            diag[t] += contribution;
        }
        diag
    }
}
