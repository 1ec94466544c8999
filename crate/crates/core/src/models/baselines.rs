//! Constant-exponent growth baselines. Timestamps are event indices and each
//! event is tagged by construction: a node's first edge is `I` (or `R` when
//! both endpoints are new), later edges are `H`, an edgeless node is `Z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId};
use crate::stream::{EdgeEvent, EventLog, EventType};

/// Draw budget for rejection-sampled edges and triangle-closing paths.
const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BaselineParams {
    BarabasiAlbert { m: usize },
    Dorogovtsev { c_rate: usize },
    Vazquez { u: f64 },
    Copying { q_copy: f64 },
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineParams::BarabasiAlbert { m } if m < 1 => Err(Error::invalid("m must be at least 1")),
            BaselineParams::Dorogovtsev { c_rate } if c_rate < 1 => Err(Error::invalid("c_rate must be at least 1")),
            BaselineParams::Vazquez { u } if !(0.0..=1.0).contains(&u) => {
                Err(Error::invalid("u must lie in [0, 1]"))
            }
            BaselineParams::Copying { q_copy } if !(0.0..=1.0).contains(&q_copy) => {
                Err(Error::invalid("q_copy must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineParams::BarabasiAlbert { .. } => "barabasi_albert",
            BaselineParams::Dorogovtsev { .. } => "dorogovtsev",
            BaselineParams::Vazquez { .. } => "vazquez",
            BaselineParams::Copying { .. } => "copying",
        }
    }

    /// Runs the generator; `size` is a node target except for the Vázquez
    /// model, where it counts steps.
    pub fn simulate(&self, size: usize, seed: u64) -> Result<EventLog> {
        match *self {
            BaselineParams::BarabasiAlbert { m } => simulate_barabasi_albert(m, size, seed),
            BaselineParams::Dorogovtsev { c_rate } => simulate_dorogovtsev(c_rate, size, seed),
            BaselineParams::Vazquez { u } => simulate_vazquez(u, size, seed),
            BaselineParams::Copying { q_copy } => simulate_vertex_copying(q_copy, size, seed),
        }
    }
}

/// Graph plus event log with construction-time tagging.
struct Recorder {
    graph: DynamicGraph,
    announced: Vec<bool>,
    events: Vec<EdgeEvent>,
    rng: ChaCha8Rng,
    rejected: u64,
}

impl Recorder {
    fn new(seed: u64) -> Self {
        Self {
            graph: DynamicGraph::new(),
            announced: Vec::new(),
            events: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            rejected: 0,
        }
    }

    fn stamp(&self) -> f64 {
        self.events.len() as f64
    }

    fn add_node(&mut self) -> NodeId {
        self.announced.push(false);
        self.graph.add_node()
    }

    /// Inserts `{u, v}` and logs it; returns false for self-loops and duplicates.
    fn edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if !self.graph.add_edge(u, v, false).is_added() {
            return false;
        }
        let tag = match (self.announced[u.index()], self.announced[v.index()]) {
            (false, false) => EventType::R,
            (true, true) => EventType::H,
            _ => EventType::I,
        };
        self.announced[u.index()] = true;
        self.announced[v.index()] = true;
        let ev = EdgeEvent::edge(self.stamp(), u64::from(u.0), u64::from(v.0)).tagged(tag);
        self.events.push(ev);
        true
    }

    /// Logs a `Z` event for a node that ended its step without edges.
    fn settle(&mut self, u: NodeId) {
        if !self.announced[u.index()] {
            self.announced[u.index()] = true;
            let ev = EdgeEvent::node(self.stamp(), u64::from(u.0)).tagged(EventType::Z);
            self.events.push(ev);
        }
    }

    fn clique(&mut self, size: usize) {
        let nodes: Vec<NodeId> = (0..size).map(|_| self.add_node()).collect();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[..i] {
                self.edge(v, u);
            }
        }
        for u in nodes {
            self.settle(u);
        }
    }

    /// `count` distinct degree-proportional targets among existing nodes.
    fn preferential_targets(&mut self, count: usize) -> Result<Vec<NodeId>> {
        let mut targets = Vec::with_capacity(count);
        while targets.len() < count {
            let t = self.graph.preferential_sample(&mut self.rng)?;
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        Ok(targets)
    }

    fn finish(self, model: &str, params: &[(&str, String)], size_key: &str, size: usize, seed: u64) -> EventLog {
        let mut log = EventLog { events: self.events, ..Default::default() };
        let h = &mut log.header;
        h.set("model", model);
        for (k, v) in params {
            h.set(*k, v);
        }
        h.set(size_key, size);
        h.set("seed", seed);
        h.set("rejected_draws", self.rejected);
        log
    }
}

/// Each new node attaches `m` edges to distinct degree-proportional targets,
/// starting from an `(m+1)`-clique.
pub fn simulate_barabasi_albert(m: usize, target_n: usize, seed: u64) -> Result<EventLog> {
    BaselineParams::BarabasiAlbert { m }.validate()?;
    if target_n <= m + 1 {
        return Err(Error::invalid(format!("target_n must exceed m + 1 = {}", m + 1)));
    }
    let mut rec = Recorder::new(seed);
    rec.clique(m + 1);
    while rec.graph.node_count() < target_n {
        let targets = rec.preferential_targets(m)?;
        let v = rec.add_node();
        for t in targets {
            rec.edge(v, t);
        }
    }
    Ok(rec.finish("barabasi_albert", &[("m", m.to_string())], "target_n", target_n, seed))
}

/// Per step: one node with `c_rate` preferential edges, then `c_rate` edges
/// between pairs of independent degree-proportional draws. Self-pairs and
/// duplicates are redrawn up to a fixed budget, then dropped and counted.
pub fn simulate_dorogovtsev(c_rate: usize, target_n: usize, seed: u64) -> Result<EventLog> {
    BaselineParams::Dorogovtsev { c_rate }.validate()?;
    if target_n <= c_rate + 1 {
        return Err(Error::invalid(format!("target_n must exceed c_rate + 1 = {}", c_rate + 1)));
    }
    let mut rec = Recorder::new(seed);
    rec.clique(c_rate + 1);
    while rec.graph.node_count() < target_n {
        let targets = rec.preferential_targets(c_rate)?;
        let v = rec.add_node();
        for t in targets {
            rec.edge(v, t);
        }
        for _ in 0..c_rate {
            let mut placed = false;
            for _ in 0..MAX_ATTEMPTS {
                let a = rec.graph.preferential_sample(&mut rec.rng)?;
                let b = rec.graph.preferential_sample(&mut rec.rng)?;
                if rec.edge(a, b) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                rec.rejected += 1;
            }
        }
    }
    Ok(rec.finish("dorogovtsev", &[("c_rate", c_rate.to_string())], "target_n", target_n, seed))
}

/// Uniform length-2 path `v - w - x` with `{v, x}` absent, if one is found
/// within the draw budget. The middle node is drawn with probability
/// proportional to `d(w)(d(w) - 1)` by degree-proportional proposal and
/// acceptance `(d(w) - 1) / (d_max - 1)`.
fn open_path<R: Rng>(graph: &DynamicGraph, rng: &mut R) -> Option<(NodeId, NodeId)> {
    let dmax = graph.max_degree();
    if dmax < 2 {
        return None;
    }
    for _ in 0..MAX_ATTEMPTS {
        let w = graph.preferential_sample(rng).ok()?;
        let dw = graph.degree(w);
        if rng.random::<f64>() * f64::from(dmax - 1) >= f64::from(dw - 1) {
            continue;
        }
        let nbrs = graph.neighbors(w);
        let i = rng.random_range(0..nbrs.len());
        let mut j = rng.random_range(0..nbrs.len() - 1);
        if j >= i {
            j += 1;
        }
        let (v, x) = (nbrs[i], nbrs[j]);
        if !graph.has_edge(v, x) {
            return Some((v, x));
        }
    }
    None
}

/// Per step: with probability `1 - u` a new node joins a uniform existing
/// node; with probability `u` a uniform open length-2 path is closed into a
/// triangle, falling back to node addition when no open path is found.
pub fn simulate_vazquez(u: f64, target_steps: usize, seed: u64) -> Result<EventLog> {
    BaselineParams::Vazquez { u }.validate()?;
    let mut rec = Recorder::new(seed);
    let a = rec.add_node();
    let b = rec.add_node();
    rec.edge(a, b);
    let mut fallbacks = 0u64;
    for _ in 0..target_steps {
        if rec.rng.random::<f64>() < u {
            if let Some((v, x)) = open_path(&rec.graph, &mut rec.rng) {
                rec.edge(v, x);
                continue;
            }
            fallbacks += 1;
        }
        let target = rec.graph.uniform_sample(&mut rec.rng)?;
        let v = rec.add_node();
        rec.edge(v, target);
    }
    rec.rejected = fallbacks;
    Ok(rec.finish("vazquez", &[("u", u.to_string())], "target_steps", target_steps, seed))
}

/// Per step: a new node picks a uniform ambassador and, for each link the
/// ambassador created on arrival, copies it with probability `q_copy` or
/// otherwise links to a uniform existing node. The seed is a triangle whose
/// nodes each own links to the other two, so every node creates two links.
pub fn simulate_vertex_copying(q_copy: f64, target_n: usize, seed: u64) -> Result<EventLog> {
    BaselineParams::Copying { q_copy }.validate()?;
    if target_n <= 3 {
        return Err(Error::invalid("target_n must exceed 3"));
    }
    let mut rec = Recorder::new(seed);
    rec.clique(3);
    let mut out_links: Vec<Vec<NodeId>> = (0..3u32)
        .map(|i| (0..3u32).filter(|&j| j != i).map(NodeId).collect())
        .collect();
    while rec.graph.node_count() < target_n {
        let ambassador = rec.graph.uniform_sample(&mut rec.rng)?;
        let template = out_links[ambassador.index()].clone();
        let mut copied = Vec::with_capacity(template.len());
        let mut fresh = 0usize;
        for &t in &template {
            if rec.rng.random::<f64>() < q_copy {
                copied.push(t);
            } else {
                fresh += 1;
            }
        }
        let old_count = rec.graph.node_count();
        let v = rec.add_node();
        let mut links = Vec::with_capacity(template.len());
        for t in copied {
            if rec.edge(v, t) {
                links.push(t);
            }
        }
        for _ in 0..fresh {
            let mut placed = false;
            for _ in 0..MAX_ATTEMPTS {
                let t = NodeId(rec.rng.random_range(0..old_count) as u32);
                if rec.edge(v, t) {
                    links.push(t);
                    placed = true;
                    break;
                }
            }
            if !placed {
                rec.rejected += 1;
            }
        }
        rec.settle(v);
        out_links.push(links);
    }
    Ok(rec.finish("copying", &[("q_copy", q_copy.to_string())], "target_n", target_n, seed))
}
