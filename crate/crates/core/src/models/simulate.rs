//! Continuous-time race simulation of Model I and Model II.
//!
//! Channels fire at instantaneous rates `r n` (R: two new nodes joined by a
//! random edge), `p n` (I: new node attached to a uniform existing node),
//! `q n` (Z: new isolated node) and `2 s e_h` (H: homophily edge). The next
//! channel is chosen proportionally to its rate after an exponential wait
//! with the total rate.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{ModelIIParams, ModelIParams};
use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, NodeId};
use crate::scalar::Scalar;
use crate::stream::{EdgeEvent, EventLog, EventType};

/// Target redraws allowed for one homophily edge before the event is skipped.
pub const HOMOPHILY_RETRIES: usize = 100;

#[derive(Clone, Copy, Debug)]
struct Rates {
    p: f64,
    q: f64,
    r: f64,
    s: f64,
}

/// Step-by-step Model II simulator; Model I is the case `p = q = 0`.
#[derive(Debug)]
pub struct GrowthSimulator {
    rates: Rates,
    graph: DynamicGraph,
    rng: ChaCha8Rng,
    time: f64,
    pending: VecDeque<EdgeEvent>,
    skipped_homophily: u64,
    initial_events: usize,
}

fn node_id(u: NodeId) -> u64 {
    u64::from(u.0)
}

/// How the `N0` initial nodes are wired before the `H0` homophily edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialWiring {
    /// All initial nodes isolated.
    Isolated,
    /// Initial nodes split across the node channels in proportion to their
    /// rates: `round(N0 r / D)` random pairs, then isolated nodes, then
    /// `round(N0 p / D)` nodes attached to a uniform earlier node. Matches
    /// the mean-field start `e_r(0) = r N0 / D`, so Model I starts at
    /// average degree one from random edges alone.
    #[default]
    MeanField,
}

impl GrowthSimulator {
    /// Wires the `N0` initial nodes and places `H0` homophily edges between
    /// uniformly chosen distinct unlinked pairs, all at time zero.
    pub fn new<T: Scalar>(params: &ModelIIParams<T>, seed: u64) -> Result<Self> {
        Self::with_wiring(params, seed, InitialWiring::default())
    }

    pub fn with_wiring<T: Scalar>(params: &ModelIIParams<T>, seed: u64, wiring: InitialWiring) -> Result<Self> {
        params.validate()?;
        let rates = Rates { p: params.p.as_f64(), q: params.q.as_f64(), r: params.r.as_f64(), s: params.s.as_f64() };
        let n0 = params.n0;
        let (pairs, attached) = match wiring {
            InitialWiring::Isolated => (0, 0),
            InitialWiring::MeanField => {
                let d = rates.p + rates.q + 2.0 * rates.r;
                let pairs = ((n0 as f64 * rates.r / d).round() as usize).min(n0 / 2);
                // attached nodes need an earlier node to join
                let room = n0 - 2 * pairs - usize::from(pairs == 0);
                let attached = ((n0 as f64 * rates.p / d).round() as usize).min(room);
                (pairs, attached)
            }
        };
        let free_pairs = n0 * (n0 - 1) / 2 - pairs - attached;
        if params.h0 > free_pairs {
            return Err(Error::invalid(format!(
                "H0 = {} exceeds the {free_pairs} unlinked pairs left by the initial wiring",
                params.h0
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut graph = DynamicGraph::without_adjacency();
        let mut pending = VecDeque::with_capacity(n0 + params.h0);
        for _ in 0..pairs {
            let u = graph.add_node();
            let v = graph.add_node();
            graph.add_edge(u, v, false);
            pending.push_back(EdgeEvent::edge(0.0, node_id(u), node_id(v)).tagged(EventType::R));
        }
        while graph.node_count() < n0 - attached {
            let u = graph.add_node();
            pending.push_back(EdgeEvent::node(0.0, node_id(u)).tagged(EventType::Z));
        }
        for _ in 0..attached {
            let target = graph.uniform_sample(&mut rng)?;
            let u = graph.add_node();
            graph.add_edge(u, target, false);
            pending.push_back(EdgeEvent::edge(0.0, node_id(u), node_id(target)).tagged(EventType::I));
        }
        let mut placed = 0;
        while placed < params.h0 {
            let u = graph.uniform_sample(&mut rng)?;
            let v = graph.uniform_sample(&mut rng)?;
            if graph.add_edge(u, v, true).is_added() {
                pending.push_back(EdgeEvent::edge(0.0, node_id(u), node_id(v)).tagged(EventType::H));
                placed += 1;
            }
        }
        let initial_events = pending.len();
        Ok(Self { rates, graph, rng, time: 0.0, pending, skipped_homophily: 0, initial_events })
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Homophily events dropped after exhausting their target redraws.
    pub fn skipped_homophily(&self) -> u64 {
        self.skipped_homophily
    }

    pub fn initial_events(&self) -> usize {
        self.initial_events
    }

    /// Next emitted event. Initialization events come first; skipped
    /// homophily events advance the clock but emit nothing.
    pub fn next_event(&mut self) -> Result<EdgeEvent> {
        if let Some(ev) = self.pending.pop_front() {
            return Ok(ev);
        }
        loop {
            if let Some(ev) = self.fire()? {
                return Ok(ev);
            }
        }
    }

    fn fire(&mut self) -> Result<Option<EdgeEvent>> {
        let Rates { p, q, r, s } = self.rates;
        let n = self.graph.node_count() as f64;
        let lambda_r = r * n;
        let lambda_i = p * n;
        let lambda_z = q * n;
        let lambda_h = 2.0 * s * self.graph.homophily_edge_count() as f64;
        let total = lambda_r + lambda_i + lambda_z + lambda_h;
        if !(total > 0.0) {
            return Err(Error::Degenerate("all event rates vanished"));
        }
        let wait = Exp::new(total).map_err(|_| Error::Degenerate("invalid total rate"))?;
        self.time += wait.sample(&mut self.rng);
        let t = self.time;
        let pick = self.rng.random::<f64>() * total;
        let ev = if pick < lambda_r {
            let u = self.graph.add_node();
            let v = self.graph.add_node();
            self.graph.add_edge(u, v, false);
            EdgeEvent::edge(t, node_id(u), node_id(v)).tagged(EventType::R)
        } else if pick < lambda_r + lambda_i {
            let target = self.graph.uniform_sample(&mut self.rng)?;
            let u = self.graph.add_node();
            self.graph.add_edge(u, target, false);
            EdgeEvent::edge(t, node_id(u), node_id(target)).tagged(EventType::I)
        } else if pick < lambda_r + lambda_i + lambda_z || lambda_h == 0.0 {
            let u = self.graph.add_node();
            EdgeEvent::node(t, node_id(u)).tagged(EventType::Z)
        } else {
            let source = self.graph.homophily_sample(&mut self.rng)?;
            let mut placed = None;
            for _ in 0..HOMOPHILY_RETRIES {
                let target = self.graph.preferential_sample(&mut self.rng)?;
                if self.graph.add_edge(source, target, true).is_added() {
                    placed = Some(target);
                    break;
                }
            }
            match placed {
                Some(target) => EdgeEvent::edge(t, node_id(source), node_id(target)).tagged(EventType::H),
                None => {
                    self.skipped_homophily += 1;
                    return Ok(None);
                }
            }
        };
        Ok(Some(ev))
    }

    /// Feeds events to `sink` until the graph holds at least `target_n` nodes.
    pub fn run_until<F: FnMut(&EdgeEvent)>(&mut self, target_n: usize, mut sink: F) -> Result<()> {
        while !self.pending.is_empty() || self.graph.node_count() < target_n {
            let ev = self.next_event()?;
            sink(&ev);
        }
        Ok(())
    }
}

fn simulate<T: Scalar>(
    model: &str,
    params: &ModelIIParams<T>,
    target_n: usize,
    seed: u64,
    wiring: InitialWiring,
) -> Result<EventLog> {
    if target_n <= params.n0 {
        return Err(Error::invalid(format!("target_n = {target_n} must exceed N0 = {}", params.n0)));
    }
    let mut sim = GrowthSimulator::with_wiring(params, seed, wiring)?;
    let mut log = EventLog::default();
    sim.run_until(target_n, |ev| log.events.push(*ev))?;
    let h = &mut log.header;
    h.set("model", model);
    if model == "model2" {
        h.set("p", params.p);
        h.set("q", params.q);
    }
    h.set("r", params.r);
    h.set("s", params.s);
    h.set("N0", params.n0);
    h.set("H0", params.h0);
    h.set("target_n", target_n);
    h.set("seed", seed);
    h.set("init", wiring.name());
    h.set("initial_events", sim.initial_events());
    h.set("skipped_homophily", sim.skipped_homophily());
    Ok(log)
}

pub fn simulate_model_i<T: Scalar>(params: &ModelIParams<T>, target_n: usize, seed: u64) -> Result<EventLog> {
    simulate_model_i_with(params, target_n, seed, InitialWiring::default())
}

pub fn simulate_model_i_with<T: Scalar>(
    params: &ModelIParams<T>,
    target_n: usize,
    seed: u64,
    wiring: InitialWiring,
) -> Result<EventLog> {
    params.validate()?;
    simulate("model1", &ModelIIParams::from(*params), target_n, seed, wiring)
}

pub fn simulate_model_ii<T: Scalar>(params: &ModelIIParams<T>, target_n: usize, seed: u64) -> Result<EventLog> {
    simulate("model2", params, target_n, seed, InitialWiring::default())
}

pub fn simulate_model_ii_with<T: Scalar>(
    params: &ModelIIParams<T>,
    target_n: usize,
    seed: u64,
    wiring: InitialWiring,
) -> Result<EventLog> {
    simulate("model2", params, target_n, seed, wiring)
}

impl InitialWiring {
    pub fn name(self) -> &'static str {
        match self {
            InitialWiring::Isolated => "isolated",
            InitialWiring::MeanField => "mean-field",
        }
    }
}

impl std::str::FromStr for InitialWiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isolated" => Ok(InitialWiring::Isolated),
            "mean-field" => Ok(InitialWiring::MeanField),
            other => Err(Error::invalid(format!("unknown initial wiring {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::EventKind;

    fn model_i() -> ModelIParams<f64> {
        ModelIParams { r: 0.05, s: 0.075, n0: 20, h0: 2 }
    }

    #[test]
    fn isolated_initialization_block() {
        let log = simulate_model_i_with(&model_i(), 100, 1, InitialWiring::Isolated).unwrap();
        let init = &log.events[..22];
        assert!(init.iter().all(|e| e.timestamp == 0.0));
        assert!(init[..20].iter().all(|e| e.tag == Some(EventType::Z) && !e.is_edge()));
        assert!(init[20..].iter().all(|e| e.tag == Some(EventType::H) && e.is_edge()));
        assert!(log.events[22..].iter().all(|e| e.timestamp > 0.0));
        assert_eq!(log.header.get("initial_events"), Some("22"));
    }

    #[test]
    fn mean_field_initialization_block() {
        let log = simulate_model_i(&model_i(), 100, 1).unwrap();
        let init = &log.events[..12];
        assert!(init.iter().all(|e| e.timestamp == 0.0));
        for (k, ev) in init[..10].iter().enumerate() {
            assert_eq!(ev.tag, Some(EventType::R));
            assert_eq!(ev.kind, EventKind::Edge(2 * k as u64, 2 * k as u64 + 1));
        }
        assert!(init[10..].iter().all(|e| e.tag == Some(EventType::H)));
        assert!(log.events[12..].iter().all(|e| e.timestamp > 0.0));

        let occupy = ModelIIParams { p: 0.002, q: 0.022, r: 0.038, s: 0.0645, n0: 14, h0: 2 };
        let sim = GrowthSimulator::new(&occupy, 0).unwrap();
        // 14 * 0.38 = 5.32 pairs, 14 * 0.02 = 0.28 attached, 4 isolated
        assert_eq!(sim.graph().edge_count(), 5 + 2);
        assert!(sim.graph().nonzero_count() >= 10);
        assert_eq!(sim.initial_events(), 5 + 4 + 2);
    }

    #[test]
    fn rejects_unplaceable_homophily_start() {
        let tight = ModelIParams { r: 0.05, s: 0.075, n0: 2, h0: 1 };
        assert!(simulate_model_i(&tight, 10, 0).is_err());
        assert!(simulate_model_i_with(&tight, 10, 0, InitialWiring::Isolated).is_ok());
    }

    #[test]
    fn model_i_emits_only_r_and_h_after_start() {
        let log = simulate_model_i(&model_i(), 2000, 3).unwrap();
        let mut nodes = 20u64;
        for ev in &log.events[12..] {
            match (ev.tag, ev.kind) {
                (Some(EventType::R), EventKind::Edge(u, v)) => {
                    assert_eq!((u, v), (nodes, nodes + 1));
                    nodes += 2;
                }
                (Some(EventType::H), EventKind::Edge(u, v)) => assert!(u < nodes && v < nodes && u != v),
                other => panic!("unexpected event {other:?}"),
            }
        }
        assert!((2000..=2001).contains(&nodes));
        assert!(log.events.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = simulate_model_i(&model_i(), 3000, 42).unwrap();
        let b = simulate_model_i(&model_i(), 3000, 42).unwrap();
        let c = simulate_model_i(&model_i(), 3000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn rejects_small_target() {
        assert!(simulate_model_i(&model_i(), 20, 0).is_err());
        let bad = ModelIParams { r: 0.0, ..model_i() };
        assert!(simulate_model_i(&bad, 100, 0).is_err());
    }

    #[test]
    fn model_ii_channels() {
        let params = ModelIIParams { p: 0.002, q: 0.022, r: 0.038, s: 0.0645, n0: 14, h0: 2 };
        let mut sim = GrowthSimulator::new(&params, 5).unwrap();
        let mut seen = [0usize; 4];
        sim.run_until(5000, |ev| seen[ev.tag.unwrap() as usize] += 1).unwrap();
        assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
        sim.graph().check_invariants().unwrap();
    }
}
