//! Replays an event stream into a [`DynamicGraph`], classifying every event
//! and taking snapshots the first time the node count reaches each scheduled
//! size.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, EdgeInsert, NodeId, Snapshot};
use crate::stream::event::{EdgeEvent, EventKind, EventType};

/// Ids below this bound are mapped through a flat table instead of the hash map.
const DENSE_ID_LIMIT: u64 = 1 << 22;
const ABSENT: u32 = u32::MAX;

/// Graph keyed by external node ids. An id "exists" once any event mentioned it.
#[derive(Clone, Debug)]
pub struct StreamGraph {
    graph: DynamicGraph,
    dense: Vec<u32>,
    sparse: FxHashMap<u64, NodeId>,
}

impl Default for StreamGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamGraph {
    pub fn new() -> Self {
        Self { graph: DynamicGraph::without_adjacency(), dense: Vec::new(), sparse: FxHashMap::default() }
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    fn lookup(&self, external: u64) -> Option<NodeId> {
        if external < DENSE_ID_LIMIT {
            match self.dense.get(external as usize) {
                Some(&id) if id != ABSENT => Some(NodeId(id)),
                _ => None,
            }
        } else {
            self.sparse.get(&external).copied()
        }
    }

    pub fn contains(&self, external: u64) -> bool {
        self.lookup(external).is_some()
    }

    fn intern(&mut self, external: u64) -> NodeId {
        if let Some(id) = self.lookup(external) {
            return id;
        }
        let id = self.graph.add_node();
        if external < DENSE_ID_LIMIT {
            let slot = external as usize;
            if slot >= self.dense.len() {
                self.dense.resize(slot + 1, ABSENT);
            }
            self.dense[slot] = id.0;
        } else {
            self.sparse.insert(external, id);
        }
        id
    }

    /// Applies the event; returns what happened to the edge, if any.
    pub fn apply(&mut self, event: &EdgeEvent) -> Option<EdgeInsert> {
        match event.kind {
            EventKind::Node(u) => {
                self.intern(u);
                None
            }
            EventKind::Edge(u, v) if u == v => {
                self.intern(u);
                Some(EdgeInsert::SelfLoop)
            }
            EventKind::Edge(u, v) => {
                let a = self.intern(u);
                let b = self.intern(v);
                Some(self.graph.add_edge(a, b, false))
            }
        }
    }
}

/// Classifies an event against the set of ids seen so far: node-only and
/// self-loop events are `Z`; an edge with both endpoints new is `R`, one new
/// `I`, none new `H`.
pub fn classify_event(graph: &StreamGraph, event: &EdgeEvent) -> EventType {
    match event.kind {
        EventKind::Node(_) => EventType::Z,
        EventKind::Edge(u, v) if u == v => EventType::Z,
        EventKind::Edge(u, v) => match (graph.contains(u), graph.contains(v)) {
            (false, false) => EventType::R,
            (true, true) => EventType::H,
            _ => EventType::I,
        },
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTypeCounts {
    pub z: u64,
    pub r: u64,
    pub i: u64,
    /// H-classified edge events, duplicates included.
    pub h: u64,
    /// Edge events that repeated an existing edge and were not applied.
    pub duplicates: u64,
    /// Self-loop events, counted within `z`.
    pub self_loops: u64,
    pub window: (u64, u64),
}

impl EventTypeCounts {
    pub fn record(&mut self, ty: EventType) {
        match ty {
            EventType::Z => self.z += 1,
            EventType::R => self.r += 1,
            EventType::I => self.i += 1,
            EventType::H => self.h += 1,
        }
    }

    pub fn get(&self, ty: EventType) -> u64 {
        match ty {
            EventType::Z => self.z,
            EventType::R => self.r,
            EventType::I => self.i,
            EventType::H => self.h,
        }
    }

    pub fn total(&self) -> u64 {
        self.z + self.r + self.i + self.h
    }

    pub fn edge_events(&self) -> u64 {
        self.r + self.i + self.h
    }

    pub fn applied_h(&self) -> u64 {
        self.h - self.duplicates
    }

    /// Share among edges that entered the graph (duplicates excluded); `Z` is 0.
    pub fn applied_edge_ratio(&self, ty: EventType) -> Option<f64> {
        let denom = self.r + self.i + self.applied_h();
        let num = match ty {
            EventType::Z => 0,
            EventType::H => self.applied_h(),
            other => self.get(other),
        };
        (denom > 0).then(|| num as f64 / denom as f64)
    }

    /// Share among all edge events, duplicates included; `Z` is 0.
    pub fn raw_edge_ratio(&self, ty: EventType) -> Option<f64> {
        let denom = self.edge_events();
        let num = if ty == EventType::Z { 0 } else { self.get(ty) };
        (denom > 0).then(|| num as f64 / denom as f64)
    }

    /// Share among all events of any type.
    pub fn event_ratio(&self, ty: EventType) -> Option<f64> {
        let denom = self.total();
        (denom > 0).then(|| self.get(ty) as f64 / denom as f64)
    }

    fn add(&mut self, other: &EventTypeCounts) {
        self.z += other.z;
        self.r += other.r;
        self.i += other.i;
        self.h += other.h;
        self.duplicates += other.duplicates;
        self.self_loops += other.self_loops;
    }
}

/// Node counts at which snapshots are taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnapshotSchedule {
    /// `2^i` for `i >= from`.
    PowersOfTwo { from: u32 },
    /// Explicit, strictly increasing sizes.
    Explicit(Vec<u64>),
}

impl Default for SnapshotSchedule {
    fn default() -> Self {
        SnapshotSchedule::PowersOfTwo { from: 5 }
    }
}

impl SnapshotSchedule {
    fn target(&self, k: usize) -> Option<u64> {
        match self {
            SnapshotSchedule::PowersOfTwo { from } => {
                let exp = *from as usize + k;
                (exp < 63).then(|| 1u64 << exp)
            }
            SnapshotSchedule::Explicit(v) => v.get(k).copied(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Scheduled size that triggered the snapshot.
    pub target_n: u64,
    /// Timestamp of the triggering event.
    pub timestamp: f64,
    pub snapshot: Snapshot,
    /// Events since the previous snapshot.
    pub window: EventTypeCounts,
    /// Events since the start of the stream.
    pub cumulative: EventTypeCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySeries {
    pub points: Vec<TrajectoryPoint>,
    /// State after the last event, whether or not it hit the schedule.
    pub final_snapshot: Snapshot,
    pub final_timestamp: f64,
    pub totals: EventTypeCounts,
    /// Events whose generator tag disagreed with the classifier.
    pub tag_mismatches: u64,
    pub tagged_events: u64,
}

/// Incremental replay: feed events one at a time, then [`finish`](Self::finish).
#[derive(Clone, Debug)]
pub struct Replayer {
    graph: StreamGraph,
    schedule: SnapshotSchedule,
    next: usize,
    window: EventTypeCounts,
    totals: EventTypeCounts,
    points: Vec<TrajectoryPoint>,
    last_timestamp: f64,
    tag_mismatches: u64,
    tagged_events: u64,
}

impl Replayer {
    pub fn new(schedule: SnapshotSchedule) -> Self {
        Self {
            graph: StreamGraph::new(),
            schedule,
            next: 0,
            window: EventTypeCounts::default(),
            totals: EventTypeCounts::default(),
            points: Vec::new(),
            last_timestamp: 0.0,
            tag_mismatches: 0,
            tagged_events: 0,
        }
    }

    pub fn graph(&self) -> &StreamGraph {
        &self.graph
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    /// Classifies and applies one event; returns its class.
    pub fn push(&mut self, event: &EdgeEvent) -> EventType {
        let ty = classify_event(&self.graph, event);
        if let Some(tag) = event.tag {
            self.tagged_events += 1;
            if tag != ty {
                self.tag_mismatches += 1;
            }
        }
        self.window.record(ty);
        match self.graph.apply(event) {
            Some(EdgeInsert::Duplicate) => self.window.duplicates += 1,
            Some(EdgeInsert::SelfLoop) => self.window.self_loops += 1,
            _ => {}
        }
        self.last_timestamp = event.timestamp;

        let n = self.graph.graph().node_count() as u64;
        while let Some(target) = self.schedule.target(self.next) {
            if n < target {
                break;
            }
            self.snapshot(target);
            self.next += 1;
        }
        ty
    }

    fn snapshot(&mut self, target: u64) {
        let snapshot = self.graph.graph().take_snapshot().expect("nonempty after an event");
        let mut window = std::mem::take(&mut self.window);
        window.window = (self.points.last().map_or(0, |p| p.snapshot.n), snapshot.n);
        self.totals.add(&window);
        let mut cumulative = self.totals;
        cumulative.window = (0, snapshot.n);
        self.points.push(TrajectoryPoint {
            target_n: target,
            timestamp: self.last_timestamp,
            snapshot,
            window,
            cumulative,
        });
    }

    pub fn finish(mut self) -> Result<TrajectorySeries> {
        let final_snapshot = self.graph.graph().take_snapshot().map_err(|_| Error::InsufficientData { needed: 1, got: 0 })?;
        let pending = std::mem::take(&mut self.window);
        self.totals.add(&pending);
        self.totals.window = (0, final_snapshot.n);
        Ok(TrajectorySeries {
            points: self.points,
            final_snapshot,
            final_timestamp: self.last_timestamp,
            totals: self.totals,
            tag_mismatches: self.tag_mismatches,
            tagged_events: self.tagged_events,
        })
    }
}

pub fn replay(events: &[EdgeEvent], schedule: SnapshotSchedule) -> Result<TrajectorySeries> {
    if events.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut r = Replayer::new(schedule);
    for ev in events {
        r.push(ev);
    }
    r.finish()
}

/// `(n, NZ(n))` at every snapshot.
pub fn nz_series(trajectory: &TrajectorySeries) -> Vec<(u64, f64)> {
    trajectory.points.iter().map(|p| (p.snapshot.n, p.snapshot.nz_fraction)).collect()
}
