use netgrowth::experiments::{mean_trajectory, run_seeds, seeds, simulate_run};
use netgrowth::models::{
    predicted_avg_degree_model_i, predicted_nz_fraction, simulate_model_i, simulate_model_ii_with, InitialWiring,
    ModelIIParams, ModelIParams,
};
use netgrowth::stream::replay::{replay, SnapshotSchedule};
use netgrowth::stream::{EventKind, EventType};

const OCCUPY: ModelIIParams<f64> = ModelIIParams { p: 0.002, q: 0.022, r: 0.038, s: 0.0645, n0: 14, h0: 2 };

#[test]
fn event_counts_account_for_nodes_and_edges() {
    for wiring in [InitialWiring::MeanField, InitialWiring::Isolated] {
        let params = ModelIIParams { p: 0.01, ..OCCUPY };
        let log = simulate_model_ii_with(&params, 20_000, 4, wiring).unwrap();
        let series = replay(&log.events, SnapshotSchedule::default()).unwrap();
        let t = &series.totals;
        let fin = &series.final_snapshot;
        assert_eq!(series.tag_mismatches, 0);
        assert_eq!(series.tagged_events, log.len() as u64);
        assert_eq!(t.duplicates, 0);
        assert_eq!(fin.n, t.get(EventType::Z) + 2 * t.get(EventType::R) + t.get(EventType::I));
        assert_eq!(fin.e, t.get(EventType::R) + t.get(EventType::I) + t.get(EventType::H));
        assert!(fin.n >= 20_000 && fin.n <= 20_001);
        let init: usize = log.header.get("initial_events").unwrap().parse().unwrap();
        assert!(log.events[..init].iter().all(|e| e.timestamp == 0.0));
        assert!(log.events[init..].iter().all(|e| e.timestamp > 0.0));
        assert!(log.events.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }
}

#[test]
fn initial_block_matches_wiring() {
    let log = simulate_model_ii_with(&OCCUPY, 100, 1, InitialWiring::Isolated).unwrap();
    let tags: Vec<_> = log.events[..16].iter().map(|e| e.tag.unwrap()).collect();
    assert!(tags[..14].iter().all(|&t| t == EventType::Z));
    assert_eq!(&tags[14..], &[EventType::H, EventType::H]);

    let log = simulate_model_ii_with(&OCCUPY, 100, 1, InitialWiring::MeanField).unwrap();
    let edges = log.events[..11].iter().filter(|e| matches!(e.kind, EventKind::Edge(..))).count();
    assert_eq!(edges, 7);
}

#[test]
fn runs_are_reproducible_per_seed() {
    let params = ModelIParams { r: 0.05, s: 0.075, n0: 20, h0: 2 };
    let a = simulate_model_i(&params, 5000, 42).unwrap();
    let b = simulate_model_i(&params, 5000, 42).unwrap();
    let c = simulate_model_i(&params, 5000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.events, c.events);
}

#[test]
fn model_i_average_degree_follows_closed_form() {
    for s in [0.075, 0.0875] {
        let params = ModelIParams { r: 0.05, s, n0: 200, h0: 2 };
        let runs = run_seeds(&seeds(1, 10), |seed| {
            simulate_run(&params.into(), 1 << 14, seed, SnapshotSchedule::Explicit(vec![1 << 14]), None)
        })
        .unwrap();
        let mean = mean_trajectory(&runs);
        let simulated = mean.last().unwrap().avg_degree;
        let predicted = predicted_avg_degree_model_i(&params, f64::from(1 << 14));
        let rel = simulated / predicted - 1.0;
        assert!(rel.abs() < 0.1, "s={s}: simulated {simulated} vs {predicted}");
    }
}

#[test]
fn nonzero_fraction_approaches_closed_form() {
    let runs = run_seeds(&seeds(1, 10), |seed| {
        simulate_run(&OCCUPY, 1 << 15, seed, SnapshotSchedule::Explicit(vec![1 << 15]), None)
    })
    .unwrap();
    let nz = mean_trajectory(&runs).last().unwrap().nz;
    assert!((nz - predicted_nz_fraction(&OCCUPY)).abs() < 0.03, "NZ {nz}");
}

#[test]
fn model_i_has_no_isolated_or_influence_events_after_start() {
    let params = ModelIParams { r: 0.05, s: 0.1, n0: 30, h0: 3 };
    let log = simulate_model_i(&params, 3000, 8).unwrap();
    let init: usize = log.header.get("initial_events").unwrap().parse().unwrap();
    assert!(log.events[init..].iter().all(|e| matches!(e.tag, Some(EventType::R) | Some(EventType::H))));
}

/// Expectations at a fixed time are exact for the linear race:
/// `E n(t) = N0 e^{Dt}` and `E e_h(t) = H0 e^{2st}`.
#[test]
fn fixed_time_means_match_exact_expectations() {
    let horizon = 30.0;
    let counts = run_seeds(&seeds(1, 2000), |seed| {
        let log = netgrowth::models::simulate_model_ii(&OCCUPY, 5_000, seed)?;
        assert!(log.events.last().unwrap().timestamp > horizon);
        let mut nodes = 0u64;
        let mut homophily = 0u64;
        for ev in log.events.iter().take_while(|e| e.timestamp <= horizon) {
            match ev.tag.unwrap() {
                EventType::Z | EventType::I => nodes += 1,
                EventType::R => nodes += 2,
                EventType::H => homophily += 1,
            }
        }
        Ok((nodes as f64, homophily as f64))
    })
    .unwrap();
    let runs = counts.len() as f64;
    let mean_n = counts.iter().map(|c| c.0).sum::<f64>() / runs;
    let mean_h = counts.iter().map(|c| c.1).sum::<f64>() / runs;
    let expected_n = 14.0 * (0.1 * horizon).exp();
    let expected_h = 2.0 * (2.0 * 0.0645 * horizon).exp();
    assert!((mean_n / expected_n - 1.0).abs() < 0.04, "n {mean_n} vs {expected_n}");
    assert!((mean_h / expected_h - 1.0).abs() < 0.06, "e_h {mean_h} vs {expected_h}");
}
