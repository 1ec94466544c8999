use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stream::event::EdgeEvent;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShuffleScope {
    /// Permute every event, node-only events included.
    #[default]
    All,
    /// Permute edge events among the positions edges occupy; node-only events stay put.
    EdgesOnly,
}

/// Uniformly permutes the events and reassigns the original timestamps, in
/// sorted order, to the new positions. Generator tags are dropped since they
/// describe the original order.
pub fn shuffle_events(events: &[EdgeEvent], seed: u64, scope: ShuffleScope) -> Vec<EdgeEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<EdgeEvent> = events.to_vec();
    match scope {
        ShuffleScope::All => out.shuffle(&mut rng),
        ShuffleScope::EdgesOnly => {
            let slots: Vec<usize> = (0..out.len()).filter(|&i| out[i].is_edge()).collect();
            let mut edges: Vec<EdgeEvent> = slots.iter().map(|&i| out[i]).collect();
            edges.shuffle(&mut rng);
            for (slot, ev) in slots.into_iter().zip(edges) {
                out[slot] = ev;
            }
        }
    }
    let mut times: Vec<f64> = events.iter().map(|e| e.timestamp).collect();
    times.sort_by(f64::total_cmp);
    for (ev, t) in out.iter_mut().zip(times) {
        ev.timestamp = t;
        ev.tag = None;
    }
    out
}
