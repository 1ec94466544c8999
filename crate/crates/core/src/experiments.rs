//! Multi-seed simulation recipes: the Model I sweep over the homophily rate
//! (average-degree exponent and degree-exponent trajectories) and Model II
//! tracking runs for fitted parameter sets.
//!
//! Seeds run in parallel; results are always merged in seed order so reports
//! do not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{fit_avg_degree_curve, AvgDegreeCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::models::{
    model_ii_curve_params, predicted_edge_fractions_model_ii, predicted_nz_fraction, GrowthSimulator, ModelIIParams,
};
use crate::powerlaw::{fit_degree_histogram, FitOptions};
use crate::stream::{EventType, EventTypeCounts, Replayer, SnapshotSchedule};

pub const DEFAULT_BASE_SEED: u64 = 1;

/// `count` consecutive seeds starting at `base`.
pub fn seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base + i).collect()
}

/// Runs `job` once per seed on the rayon pool and returns results in seed order.
pub fn run_seeds<T, F>(seeds: &[u64], job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    seeds.par_iter().map(|&seed| job(seed)).collect()
}

/// One snapshot of one run, reduced to what the recipes aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPoint {
    pub target_n: u64,
    pub n: u64,
    pub e: u64,
    pub avg_degree: f64,
    pub nz: f64,
    pub timestamp: f64,
    pub alpha_opt: Option<f64>,
    pub window: EventTypeCounts,
    pub cumulative: EventTypeCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub points: Vec<RunPoint>,
    pub skipped_homophily: u64,
    pub tag_mismatches: u64,
}

/// Simulates Model II (Model I when `p = q = 0`) to `target_n` nodes,
/// replaying events as they are generated, and fits the degree exponent at
/// every snapshot when `fit` is given.
pub fn simulate_run(
    params: &ModelIIParams<f64>,
    target_n: usize,
    seed: u64,
    schedule: SnapshotSchedule,
    fit: Option<&FitOptions<f64>>,
) -> Result<RunSummary> {
    let mut sim = GrowthSimulator::new(params, seed)?;
    let mut replayer = Replayer::new(schedule);
    sim.run_until(target_n, |ev| {
        replayer.push(ev);
    })?;
    let series = replayer.finish()?;
    let points = series
        .points
        .iter()
        .map(|p| RunPoint {
            target_n: p.target_n,
            n: p.snapshot.n,
            e: p.snapshot.e,
            avg_degree: p.snapshot.avg_degree,
            nz: p.snapshot.nz_fraction,
            timestamp: p.timestamp,
            alpha_opt: fit.and_then(|o| fit_degree_histogram(&p.snapshot.degree_histogram, o).ok()).map(|f| f.opt.alpha_hat),
            window: p.window,
            cumulative: p.cumulative,
        })
        .collect();
    Ok(RunSummary { seed, points, skipped_homophily: sim.skipped_homophily(), tag_mismatches: series.tag_mismatches })
}

/// Seed-averaged snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanPoint {
    pub target_n: u64,
    pub n: f64,
    pub avg_degree: f64,
    pub avg_degree_sd: f64,
    pub nz: f64,
    pub timestamp: f64,
    pub runs: usize,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Snapshots shared by every run, in schedule order.
fn aligned(runs: &[RunSummary]) -> Vec<Vec<&RunPoint>> {
    let depth = runs.iter().map(|r| r.points.len()).min().unwrap_or(0);
    (0..depth).map(|k| runs.iter().map(|r| &r.points[k]).collect()).collect()
}

pub fn mean_trajectory(runs: &[RunSummary]) -> Vec<MeanPoint> {
    aligned(runs)
        .into_iter()
        .map(|pts| {
            let col = |f: fn(&RunPoint) -> f64| pts.iter().map(|p| f(p)).collect::<Vec<_>>();
            let (avg_degree, avg_degree_sd) = mean_sd(&col(|p| p.avg_degree));
            MeanPoint {
                target_n: pts[0].target_n,
                n: mean_sd(&col(|p| p.n as f64)).0,
                avg_degree,
                avg_degree_sd,
                nz: mean_sd(&col(|p| p.nz)).0,
                timestamp: mean_sd(&col(|p| p.timestamp)).0,
                runs: pts.len(),
            }
        })
        .collect()
}

pub fn curve_points(mean: &[MeanPoint], min_n: u64) -> Vec<CurvePoint<f64>> {
    mean.iter().filter(|p| p.target_n >= min_n).map(|p| CurvePoint::new(p.n, p.avg_degree)).collect()
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Seed statistics of `alpha_opt` at one snapshot size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub target_n: u64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub fitted_runs: usize,
}

pub fn alpha_profile(runs: &[RunSummary]) -> Vec<AlphaPoint> {
    aligned(runs)
        .into_iter()
        .filter_map(|pts| {
            let alphas: Vec<f64> = pts.iter().filter_map(|p| p.alpha_opt).collect();
            let median = median(&alphas)?;
            Some(AlphaPoint {
                target_n: pts[0].target_n,
                median,
                min: alphas.iter().copied().fold(f64::INFINITY, f64::min),
                max: alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                fitted_runs: alphas.len(),
            })
        })
        .collect()
}

/// Simulated cumulative edge shares against the mean-field prediction at
/// each run's own snapshot time, averaged over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionPoint {
    pub target_n: u64,
    pub timestamp: f64,
    pub random: f64,
    pub predicted_random: f64,
    pub homophily: f64,
    pub predicted_homophily: f64,
    /// Shares among edges added within the snapshot window.
    pub window_random: f64,
    pub window_homophily: f64,
}

fn edge_shares(c: &EventTypeCounts) -> Option<(f64, f64)> {
    let r = c.get(EventType::R) as f64;
    let i = c.get(EventType::I) as f64;
    let h = c.applied_h() as f64;
    let total = r + i + h;
    (total > 0.0).then(|| (r / total, h / total))
}

pub fn edge_fraction_profile(params: &ModelIIParams<f64>, runs: &[RunSummary]) -> Vec<FractionPoint> {
    aligned(runs)
        .into_iter()
        .filter_map(|pts| {
            let mut acc = [0.0f64; 7];
            for p in &pts {
                let (r, h) = edge_shares(&p.cumulative)?;
                let (wr, wh) = edge_shares(&p.window)?;
                let pred = predicted_edge_fractions_model_ii(params, p.timestamp);
                for (slot, v) in acc.iter_mut().zip([p.timestamp, r, pred.random, h, pred.homophily, wr, wh]) {
                    *slot += v;
                }
            }
            let k = pts.len() as f64;
            let [timestamp, random, predicted_random, homophily, predicted_homophily, window_random, window_homophily] =
                acc.map(|v| v / k);
            Some(FractionPoint {
                target_n: pts[0].target_n,
                timestamp,
                random,
                predicted_random,
                homophily,
                predicted_homophily,
                window_random,
                window_homophily,
            })
        })
        .collect()
}

/// Model I runs over a grid of homophily rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelISweepConfig {
    pub r: f64,
    pub s_values: Vec<f64>,
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "H0")]
    pub h0: usize,
    pub seeds: Vec<u64>,
    pub target_n: usize,
    /// Smallest snapshot size used when fitting the average-degree curve.
    pub fit_min_n: u64,
    /// Fit the degree exponent at every snapshot.
    pub fit_exponents: bool,
}

impl Default for ModelISweepConfig {
    fn default() -> Self {
        Self {
            r: 0.05,
            s_values: vec![0.0625, 0.075, 0.0875, 0.1],
            n0: 200,
            h0: 2,
            seeds: seeds(DEFAULT_BASE_SEED, 40),
            target_n: 1 << 16,
            fit_min_n: 1 << 9,
            fit_exponents: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelISweepRow {
    pub s: f64,
    pub calculated_b: f64,
    pub estimated: AvgDegreeCurve<f64>,
    pub mean: Vec<MeanPoint>,
    pub alpha: Vec<AlphaPoint>,
    pub skipped_homophily: u64,
}

pub fn model_i_sweep(cfg: &ModelISweepConfig) -> Result<Vec<ModelISweepRow>> {
    if cfg.seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let fit = FitOptions::default();
    cfg.s_values
        .iter()
        .map(|&s| {
            let params = ModelIIParams { p: 0.0, q: 0.0, r: cfg.r, s, n0: cfg.n0, h0: cfg.h0 };
            params.validate()?;
            let runs = run_seeds(&cfg.seeds, |seed| {
                simulate_run(&params, cfg.target_n, seed, SnapshotSchedule::default(), cfg.fit_exponents.then_some(&fit))
            })?;
            let mean = mean_trajectory(&runs);
            let estimated = fit_avg_degree_curve(&curve_points(&mean, cfg.fit_min_n))?;
            Ok(ModelISweepRow {
                s,
                calculated_b: s / cfg.r - 1.0,
                estimated,
                alpha: alpha_profile(&runs),
                mean,
                skipped_homophily: runs.iter().map(|r| r.skipped_homophily).sum(),
            })
        })
        .collect()
}

/// Model II runs for one parameter set, compared with a reference curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingConfig {
    pub params: ModelIIParams<f64>,
    /// Curve the simulated mean average degree is compared against.
    pub reference: AvgDegreeCurve<f64>,
    pub seeds: Vec<u64>,
    pub target_n: usize,
    /// Smallest snapshot size included in the comparison and the refit.
    pub check_min_n: u64,
    pub fit_exponents: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingPoint {
    pub target_n: u64,
    pub n: f64,
    pub simulated: f64,
    pub reference: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    pub predicted: AvgDegreeCurve<f64>,
    pub reference: AvgDegreeCurve<f64>,
    pub refit: AvgDegreeCurve<f64>,
    pub tracking: Vec<TrackingPoint>,
    pub mean: Vec<MeanPoint>,
    pub alpha: Vec<AlphaPoint>,
    pub fractions: Vec<FractionPoint>,
    /// Seed mean of NZ after the last event of each run.
    pub final_nz: f64,
    pub predicted_nz: f64,
    pub skipped_homophily: u64,
    pub tag_mismatches: u64,
}

pub fn model_ii_tracking(cfg: &TrackingConfig) -> Result<TrackingReport> {
    if cfg.seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let params = cfg.params;
    params.validate()?;
    let fit = FitOptions::default();
    let runs = run_seeds(&cfg.seeds, |seed| {
        simulate_run(&params, cfg.target_n, seed, SnapshotSchedule::default(), cfg.fit_exponents.then_some(&fit))
    })?;
    let mean = mean_trajectory(&runs);
    let refit = fit_avg_degree_curve(&curve_points(&mean, cfg.check_min_n))?;
    let tracking = mean
        .iter()
        .filter(|p| p.target_n >= cfg.check_min_n)
        .map(|p| {
            let reference = cfg.reference.evaluate(p.n);
            TrackingPoint {
                target_n: p.target_n,
                n: p.n,
                simulated: p.avg_degree,
                reference,
                relative_error: (p.avg_degree - reference) / reference,
            }
        })
        .collect();
    let finals: Vec<f64> = runs.iter().filter_map(|r| r.points.last().map(|p| p.nz)).collect();
    Ok(TrackingReport {
        predicted: model_ii_curve_params(&params),
        reference: cfg.reference,
        refit,
        tracking,
        alpha: alpha_profile(&runs),
        fractions: edge_fraction_profile(&params, &runs),
        mean,
        final_nz: mean_sd(&finals).0,
        predicted_nz: predicted_nz_fraction(&params),
        skipped_homophily: runs.iter().map(|r| r.skipped_homophily).sum(),
        tag_mismatches: runs.iter().map(|r| r.tag_mismatches).sum(),
    })
}

/// Fitted parameter sets for the two real networks and their measured curves.
pub fn occupy_tracking() -> TrackingConfig {
    TrackingConfig {
        params: ModelIIParams { p: 0.002, q: 0.022, r: 0.038, s: 0.0645, n0: 14, h0: 2 },
        reference: AvgDegreeCurve::from_params(0.8, 0.29, 0.132),
        seeds: seeds(DEFAULT_BASE_SEED, 20),
        target_n: 1 << 17,
        check_min_n: 1 << 10,
        fit_exponents: true,
    }
}

pub fn facebook_tracking() -> TrackingConfig {
    TrackingConfig {
        params: ModelIIParams { p: 0.0089, q: 0.0, r: 0.04, s: 0.0857, n0: 85, h0: 2 },
        reference: AvgDegreeCurve::from_params(1.1, 0.93, 0.00075),
        seeds: seeds(DEFAULT_BASE_SEED, 10),
        target_n: 1 << 16,
        check_min_n: 1 << 10,
        fit_exponents: true,
    }
}
