//! Append-only undirected simple graph with O(1) degree-proportional sampling.
//!
//! Every inserted edge pushes both endpoints onto an endpoint bag, so a uniform
//! draw from the bag selects node `j` with probability `d(j) / 2e`. Edges
//! flagged as homophily edges are mirrored into a second bag that realizes
//! sampling proportional to the homophily degree. Nothing is ever removed.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, assigned consecutively in creation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of [`DynamicGraph::add_edge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeInsert {
    Added,
    SelfLoop,
    Duplicate,
}

impl EdgeInsert {
    #[inline]
    pub fn is_added(self) -> bool {
        self == EdgeInsert::Added
    }
}

#[inline]
fn edge_key(u: NodeId, v: NodeId) -> u64 {
    let (lo, hi) = if u.0 < v.0 { (u.0, v.0) } else { (v.0, u.0) };
    (u64::from(lo) << 32) | u64::from(hi)
}

#[derive(Clone, Debug, Default)]
pub struct DynamicGraph {
    degree: Vec<u32>,
    homophily_degree: Vec<u32>,
    neighbors: Vec<Vec<NodeId>>,
    edges: FxHashSet<u64>,
    endpoint_bag: Vec<NodeId>,
    homophily_bag: Vec<NodeId>,
    nonzero: usize,
    max_degree: u32,
    skip_adjacency: bool,
}

impl DynamicGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph that does not keep neighbor lists; [`neighbors`](Self::neighbors)
    /// panics on it. Saves one allocation per node for replay and the
    /// rate-based simulators, which never walk adjacency.
    pub fn without_adjacency() -> Self {
        Self { skip_adjacency: true, ..Self::default() }
    }

    pub fn with_capacity(nodes: usize, edges: usize) -> Self {
        let mut edge_set = FxHashSet::default();
        edge_set.reserve(edges);
        Self {
            degree: Vec::with_capacity(nodes),
            homophily_degree: Vec::with_capacity(nodes),
            neighbors: Vec::with_capacity(nodes),
            edges: edge_set,
            endpoint_bag: Vec::with_capacity(2 * edges),
            homophily_bag: Vec::new(),
            nonzero: 0,
            max_degree: 0,
            skip_adjacency: false,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.endpoint_bag.len() / 2
    }

    #[inline]
    pub fn homophily_edge_count(&self) -> usize {
        self.homophily_bag.len() / 2
    }

    /// Number of nodes with degree at least one.
    #[inline]
    pub fn nonzero_count(&self) -> usize {
        self.nonzero
    }

    #[inline]
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    #[inline]
    pub fn contains(&self, u: NodeId) -> bool {
        u.index() < self.degree.len()
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> u32 {
        self.degree[u.index()]
    }

    #[inline]
    pub fn homophily_degree(&self, u: NodeId) -> u32 {
        self.homophily_degree[u.index()]
    }

    /// Per-node degrees indexed by `NodeId::index`.
    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        assert!(!self.skip_adjacency, "neighbors() on a graph built without adjacency");
        &self.neighbors[u.index()]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&edge_key(u, v))
    }

    pub fn add_node(&mut self) -> NodeId {
        let id = u32::try_from(self.degree.len()).expect("node count exceeds u32 range");
        self.degree.push(0);
        self.homophily_degree.push(0);
        if !self.skip_adjacency {
            self.neighbors.push(Vec::new());
        }
        NodeId(id)
    }

    /// Inserts the undirected edge `{u, v}`. Self-loops and parallel edges are
    /// rejected and leave the graph untouched.
    ///
    /// Panics if either endpoint does not exist.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, homophily: bool) -> EdgeInsert {
        assert!(
            self.contains(u) && self.contains(v),
            "add_edge({u}, {v}) on graph with {} nodes",
            self.node_count()
        );
        if u == v {
            return EdgeInsert::SelfLoop;
        }
        if !self.edges.insert(edge_key(u, v)) {
            return EdgeInsert::Duplicate;
        }
        for w in [u, v] {
            let d = &mut self.degree[w.index()];
            if *d == 0 {
                self.nonzero += 1;
            }
            *d += 1;
            self.max_degree = self.max_degree.max(*d);
            self.endpoint_bag.push(w);
        }
        if !self.skip_adjacency {
            self.neighbors[u.index()].push(v);
            self.neighbors[v.index()].push(u);
        }
        if homophily {
            self.homophily_degree[u.index()] += 1;
            self.homophily_degree[v.index()] += 1;
            self.homophily_bag.push(u);
            self.homophily_bag.push(v);
        }
        EdgeInsert::Added
    }

    /// Draws node `j` with probability `d(j) / 2e`.
    pub fn preferential_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NodeId> {
        if self.endpoint_bag.is_empty() {
            return Err(Error::NoSamplingMass("graph has no edges"));
        }
        Ok(self.endpoint_bag[rng.random_range(0..self.endpoint_bag.len())])
    }

    /// Draws node `i` with probability `d_h(i) / 2e_h`.
    pub fn homophily_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NodeId> {
        if self.homophily_bag.is_empty() {
            return Err(Error::NoSamplingMass("graph has no homophily edges"));
        }
        Ok(self.homophily_bag[rng.random_range(0..self.homophily_bag.len())])
    }

    /// Uniform draw over all nodes, isolated ones included.
    pub fn uniform_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NodeId> {
        if self.degree.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(NodeId(rng.random_range(0..self.degree.len()) as u32))
    }

    /// Histogram of degree -> node count over nodes with nonzero degree.
    pub fn degree_histogram(&self) -> BTreeMap<u32, u64> {
        let mut hist = BTreeMap::new();
        for &d in self.degree.iter().filter(|&&d| d > 0) {
            *hist.entry(d).or_insert(0) += 1;
        }
        hist
    }

    pub fn take_snapshot(&self) -> Result<Snapshot> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let e = self.edge_count();
        Ok(Snapshot {
            n: n as u64,
            e: e as u64,
            avg_degree: 2.0 * e as f64 / n as f64,
            nz_fraction: self.nonzero as f64 / n as f64,
            degree_histogram: self.degree_histogram(),
        })
    }

    /// Checks the bookkeeping invariants; used by tests after mutations.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let degree_sum: u64 = self.degree.iter().map(|&d| u64::from(d)).sum();
        if degree_sum != 2 * self.edge_count() as u64 {
            return Err(format!("degree sum {degree_sum} != 2e = {}", 2 * self.edge_count()));
        }
        if self.edges.len() != self.edge_count() {
            return Err("edge set and endpoint bag disagree".into());
        }
        let h_sum: u64 = self.homophily_degree.iter().map(|&d| u64::from(d)).sum();
        if h_sum != self.homophily_bag.len() as u64 {
            return Err("homophily degree sum != |homophily bag|".into());
        }
        if let Some(i) = (0..self.node_count()).find(|&i| self.homophily_degree[i] > self.degree[i]) {
            return Err(format!("node {i}: homophily degree exceeds degree"));
        }
        let nz = self.degree.iter().filter(|&&d| d > 0).count();
        if nz != self.nonzero {
            return Err(format!("nz counter {} != recount {nz}", self.nonzero));
        }
        Ok(())
    }
}

/// Read-only summary of the graph at one point of its growth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: u64,
    pub e: u64,
    pub avg_degree: f64,
    pub nz_fraction: f64,
    /// degree -> node count, nonzero degrees only
    pub degree_histogram: BTreeMap<u32, u64>,
}

impl Snapshot {
    /// Expands the histogram into a sorted list of nonzero degrees.
    pub fn degrees(&self) -> Vec<u32> {
        self.degree_histogram
            .iter()
            .flat_map(|(&d, &c)| std::iter::repeat_n(d, c as usize))
            .collect()
    }

    pub fn nonzero_count(&self) -> u64 {
        self.degree_histogram.values().sum()
    }
}
