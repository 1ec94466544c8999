//! Snapshot-level analysis of a replayed stream and its CSV renderings.

use std::io::Write;

use crate::error::Result;
use crate::powerlaw::{self, BinnedDistribution, ExponentFitReport, FitOptions};
use crate::stream::event::{EdgeEvent, EventType};
use crate::stream::replay::{replay, EventTypeCounts, SnapshotSchedule, TrajectorySeries};

pub const TRAJECTORY_HEADER: &str =
    "n,e,avg_degree,nz,alpha_all,alpha_opt,x_opt,alpha_set_min,alpha_set_max,ratio_R,ratio_I,ratio_H,ratio_Z";
pub const DISTRIBUTION_HEADER: &str = "snapshot_n,bin_low,bin_high,density";
pub const RATIO_HEADER: &str = "n_low,n_high,z,r,i,h,duplicates,ratio_R,ratio_I,ratio_H,raw_ratio_R,raw_ratio_I,raw_ratio_H,event_ratio_Z,event_ratio_R,event_ratio_I,event_ratio_H";

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub schedule: SnapshotSchedule,
    pub fit: FitOptions<f64>,
    pub bin_base: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            schedule: SnapshotSchedule::default(),
            fit: FitOptions::default(),
            bin_base: powerlaw::DEFAULT_BIN_BASE,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SnapshotAnalysis {
    /// `None` when the snapshot has too few nonzero degrees to fit.
    pub fit: Option<ExponentFitReport<f64>>,
    pub distribution: Option<BinnedDistribution<f64>>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub series: TrajectorySeries,
    /// Parallel to `series.points`.
    pub snapshots: Vec<SnapshotAnalysis>,
}

pub fn analyze(events: &[EdgeEvent], opts: &AnalysisOptions) -> Result<Analysis> {
    let series = replay(events, opts.schedule.clone())?;
    Ok(analyze_series(series, opts))
}

pub fn analyze_series(series: TrajectorySeries, opts: &AnalysisOptions) -> Analysis {
    let snapshots = series
        .points
        .iter()
        .map(|p| {
            let hist = &p.snapshot.degree_histogram;
            let fit = powerlaw::fit_degree_histogram(hist, &opts.fit).ok();
            let degrees: Vec<f64> = p.snapshot.degrees().into_iter().map(f64::from).collect();
            let distribution = powerlaw::log_binned_distribution(&degrees, opts.bin_base).ok();
            SnapshotAnalysis { fit, distribution }
        })
        .collect();
    Analysis { series, snapshots }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_trajectory_csv<W: Write>(out: &mut W, analysis: &Analysis) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (p, a) in analysis.series.points.iter().zip(&analysis.snapshots) {
        let s = &p.snapshot;
        let fit = a.fit.as_ref();
        let range = fit.map(|f| f.alpha_set_range());
        let w = &p.window;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.n,
            s.e,
            s.avg_degree,
            s.nz_fraction,
            opt(fit.and_then(|f| f.alpha_all.map(|t| t.alpha_hat))),
            opt(fit.map(|f| f.opt.alpha_hat)),
            opt(fit.map(|f| f.opt.xmin)),
            opt(range.map(|r| r.0)),
            opt(range.map(|r| r.1)),
            opt(w.applied_edge_ratio(EventType::R)),
            opt(w.applied_edge_ratio(EventType::I)),
            opt(w.applied_edge_ratio(EventType::H)),
            opt(w.event_ratio(EventType::Z)),
        )?;
    }
    Ok(())
}

pub fn write_distribution_csv<W: Write>(out: &mut W, analysis: &Analysis) -> std::io::Result<()> {
    writeln!(out, "{DISTRIBUTION_HEADER}")?;
    for (p, a) in analysis.series.points.iter().zip(&analysis.snapshots) {
        if let Some(d) = &a.distribution {
            for bin in &d.bins {
                writeln!(out, "{},{},{},{}", p.snapshot.n, bin.lower, bin.upper, bin.density)?;
            }
        }
    }
    Ok(())
}

fn ratio_row<W: Write>(out: &mut W, c: &EventTypeCounts) -> std::io::Result<()> {
    use EventType::*;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        c.window.0,
        c.window.1,
        c.z,
        c.r,
        c.i,
        c.h,
        c.duplicates,
        opt(c.applied_edge_ratio(R)),
        opt(c.applied_edge_ratio(I)),
        opt(c.applied_edge_ratio(H)),
        opt(c.raw_edge_ratio(R)),
        opt(c.raw_edge_ratio(I)),
        opt(c.raw_edge_ratio(H)),
        opt(c.event_ratio(Z)),
        opt(c.event_ratio(R)),
        opt(c.event_ratio(I)),
        opt(c.event_ratio(H)),
    )
}

/// Per-window event-type counts and ratios, then one totals row.
pub fn write_ratio_csv<W: Write>(out: &mut W, series: &TrajectorySeries) -> std::io::Result<()> {
    writeln!(out, "{RATIO_HEADER}")?;
    for p in &series.points {
        ratio_row(out, &p.window)?;
    }
    ratio_row(out, &series.totals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_stream() -> Vec<EdgeEvent> {
        let mut evs = Vec::new();
        for j in 1..=200u64 {
            evs.push(EdgeEvent::edge(j as f64, 0, j));
            evs.push(EdgeEvent::edge(j as f64 + 0.5, 1000 + j, 2000 + j));
        }
        evs
    }

    #[test]
    fn trajectory_csv_shape() {
        let a = analyze(&star_stream(), &AnalysisOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), a.series.points.len());
        assert!(rows.iter().all(|r| r.len() == 13));
        let ns: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn distribution_and_ratio_csv() {
        let a = analyze(&star_stream(), &AnalysisOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_distribution_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(DISTRIBUTION_HEADER));
        assert!(text.lines().count() > 1);

        let mut buf = Vec::new();
        write_ratio_csv(&mut buf, &a.series).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        let fields: Vec<&str> = last.split(',').collect();
        assert_eq!(fields[2..7], ["0", "201", "199", "0", "0"]);
    }
}
