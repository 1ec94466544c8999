//! Power-law exponent estimation and the exponent/average-degree identities.
//!
//! The estimator is the continuous maximum-likelihood approximation applied to
//! the tail `{x_i >= x}`; the threshold is chosen by minimizing the
//! Kolmogorov-Smirnov distance between the empirical tail and the fitted model
//! CDF `P(y) = 1 - (y / x)^(1 - alpha)`. All candidate estimates whose KS
//! statistic lies within a fixed window of the optimum are kept as a set,
//! since the minimizer itself is often unstable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest tail the exponent search will fit.
pub const DEFAULT_MIN_TAIL: usize = 10;
/// Width of the KS window defining the estimate set.
pub const DEFAULT_KS_WINDOW: f64 = 0.05;
pub const DEFAULT_BIN_BASE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate<T> {
    pub xmin: T,
    pub alpha_hat: T,
    pub tail_count: usize,
    pub ks: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFitReport<T> {
    /// Estimate with the threshold fixed at 1 (absent if that tail is degenerate).
    pub alpha_all: Option<TailEstimate<T>>,
    /// Minimum-KS estimate.
    pub opt: TailEstimate<T>,
    /// Candidates whose KS statistic is within the window of `opt.ks`.
    pub alpha_set: Vec<TailEstimate<T>>,
    pub candidates: Vec<TailEstimate<T>>,
}

impl<T: Scalar> ExponentFitReport<T> {
    /// `(min, max)` of the exponents in the estimate set.
    pub fn alpha_set_range(&self) -> (T, T) {
        self.alpha_set.iter().fold((self.opt.alpha_hat, self.opt.alpha_hat), |(lo, hi), t| {
            (lo.min(t.alpha_hat), hi.max(t.alpha_hat))
        })
    }
}

/// Which thresholds the exponent search evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateGrid {
    /// Every distinct observed value (the natural choice for integer degrees).
    AllDistinct,
    /// At most `k` thresholds, spaced geometrically in tail size. Meant for
    /// continuous samples where every value is distinct and the exhaustive
    /// search is quadratic.
    LogSpacedTail(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions<T> {
    pub min_tail: usize,
    pub ks_window: T,
    pub grid: CandidateGrid,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            min_tail: DEFAULT_MIN_TAIL,
            ks_window: T::lit(DEFAULT_KS_WINDOW),
            grid: CandidateGrid::AllDistinct,
        }
    }
}

/// Sorted distinct positive values with multiplicities.
struct Distinct<T> {
    values: Vec<T>,
    counts: Vec<u64>,
    /// `suffix[j]` = number of samples with value >= `values[j]`
    suffix: Vec<u64>,
}

impl<T: Scalar> Distinct<T> {
    fn from_values(values: &[T]) -> Self {
        let mut sorted: Vec<T> = values.iter().copied().filter(|x| x.is_finite() && *x > T::zero()).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let mut pairs: Vec<(T, u64)> = Vec::new();
        for x in sorted {
            match pairs.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => pairs.push((x, 1)),
            }
        }
        Self::from_pairs(pairs)
    }

    fn from_pairs(pairs: Vec<(T, u64)>) -> Self {
        let (values, counts): (Vec<T>, Vec<u64>) = pairs.into_iter().unzip();
        let mut suffix = vec![0u64; values.len()];
        let mut acc = 0;
        for j in (0..values.len()).rev() {
            acc += counts[j];
            suffix[j] = acc;
        }
        Self { values, counts, suffix }
    }

    fn total(&self) -> u64 {
        self.suffix.first().copied().unwrap_or(0)
    }

    /// Index of the first value >= `x`.
    fn lower_bound(&self, x: T) -> usize {
        self.values.partition_point(|v| *v < x)
    }

    /// MLE over entries `j..` against threshold `x`.
    fn alpha_from(&self, j: usize, x: T) -> Result<T> {
        let m = self.suffix.get(j).copied().unwrap_or(0);
        if m == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let log_sum: T = (j..self.values.len())
            .map(|k| T::from_u64(self.counts[k]).unwrap() * (self.values[k] / x).ln())
            .sum();
        if !(log_sum > T::zero()) {
            return Err(Error::Degenerate("all tail values equal the threshold"));
        }
        Ok(T::one() + T::from_u64(m).unwrap() / log_sum)
    }

    /// Max over tail values `y` of |S(y) - P(y)|, S the empirical tail CDF.
    fn ks_from(&self, j: usize, x: T, alpha: T) -> T {
        let m = T::from_u64(self.suffix[j]).unwrap();
        let expo = T::one() - alpha;
        let mut cum = 0u64;
        let mut worst = T::zero();
        for k in j..self.values.len() {
            cum += self.counts[k];
            let empirical = T::from_u64(cum).unwrap() / m;
            let model = T::one() - (self.values[k] / x).powf(expo);
            worst = worst.max((empirical - model).abs());
        }
        worst
    }

    fn estimate(&self, j: usize, x: T) -> Result<TailEstimate<T>> {
        let alpha_hat = self.alpha_from(j, x)?;
        Ok(TailEstimate {
            xmin: x,
            alpha_hat,
            tail_count: self.suffix[j] as usize,
            ks: self.ks_from(j, x, alpha_hat),
        })
    }

    fn candidate_indices(&self, min_tail: usize, grid: CandidateGrid) -> Vec<usize> {
        let eligible = self.suffix.partition_point(|&s| s >= min_tail as u64);
        match grid {
            CandidateGrid::AllDistinct => (0..eligible).collect(),
            CandidateGrid::LogSpacedTail(k) if k >= 2 && eligible > k => {
                let top = self.total() as f64;
                let bottom = self.suffix[eligible - 1].max(1) as f64;
                let ratio = (bottom / top).powf(1.0 / (k - 1) as f64);
                let mut picks = Vec::with_capacity(k);
                let mut target = top;
                for _ in 0..k {
                    // first index whose tail is no larger than the target size
                    let idx = self.suffix.partition_point(|&s| s as f64 > target + 0.5).min(eligible - 1);
                    if picks.last() != Some(&idx) {
                        picks.push(idx);
                    }
                    target *= ratio;
                }
                picks
            }
            CandidateGrid::LogSpacedTail(_) => (0..eligible).collect(),
        }
    }
}

/// Continuous MLE of the exponent over `{x_i >= xmin}`:
/// `1 + m / sum ln(x_i / xmin)`.
pub fn mle_alpha<T: Scalar>(values: &[T], xmin: T) -> Result<T> {
    if !(xmin > T::zero()) {
        return Err(Error::invalid("xmin must be positive"));
    }
    let tail = Distinct::from_values(values);
    tail.alpha_from(tail.lower_bound(xmin), xmin)
}

/// KS distance between the empirical tail above `xmin` and the power law with
/// exponent `alpha`.
pub fn ks_statistic<T: Scalar>(values: &[T], xmin: T, alpha: T) -> Result<T> {
    if !(alpha > T::one()) {
        return Err(Error::invalid("alpha must exceed 1"));
    }
    if !(xmin > T::zero()) {
        return Err(Error::invalid("xmin must be positive"));
    }
    let tail = Distinct::from_values(values);
    let j = tail.lower_bound(xmin);
    if j >= tail.values.len() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok(tail.ks_from(j, xmin, alpha))
}

pub fn fit_exponent<T: Scalar>(values: &[T]) -> Result<ExponentFitReport<T>> {
    fit_exponent_with(values, &FitOptions::default())
}

pub fn fit_exponent_with<T: Scalar>(values: &[T], opts: &FitOptions<T>) -> Result<ExponentFitReport<T>> {
    fit_distinct(&Distinct::from_values(values), opts)
}

/// Fits directly from a degree histogram (degree -> node count); zero degrees
/// are ignored.
pub fn fit_degree_histogram(hist: &BTreeMap<u32, u64>, opts: &FitOptions<f64>) -> Result<ExponentFitReport<f64>> {
    let pairs = hist
        .iter()
        .filter(|(&d, &c)| d > 0 && c > 0)
        .map(|(&d, &c)| (f64::from(d), c))
        .collect();
    fit_distinct(&Distinct::from_pairs(pairs), opts)
}

fn fit_distinct<T: Scalar>(tail: &Distinct<T>, opts: &FitOptions<T>) -> Result<ExponentFitReport<T>> {
    let total = tail.total() as usize;
    if total < opts.min_tail {
        return Err(Error::InsufficientData { needed: opts.min_tail, got: total });
    }
    let candidates: Vec<TailEstimate<T>> = tail
        .candidate_indices(opts.min_tail, opts.grid)
        .into_iter()
        .filter_map(|j| tail.estimate(j, tail.values[j]).ok())
        .collect();

    // strict comparison keeps the smallest threshold on ties
    let opt = *candidates
        .iter()
        .fold(None::<&TailEstimate<T>>, |best, c| match best {
            Some(b) if !(c.ks < b.ks) => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::Degenerate("no threshold leaves a non-degenerate tail"))?;

    let alpha_set = candidates
        .iter()
        .filter(|c| (c.ks - opt.ks).abs() < opts.ks_window)
        .copied()
        .collect();

    let one = T::one();
    let alpha_all = tail.estimate(tail.lower_bound(one), one).ok();

    Ok(ExponentFitReport { alpha_all, opt, alpha_set, candidates })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin<T> {
    pub lower: T,
    pub upper: T,
    pub density: T,
}

impl<T: Scalar> Bin<T> {
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn center(&self) -> T {
        (self.lower * self.upper).sqrt()
    }
}

/// Exponentially binned density; only nonempty bins are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnedDistribution<T> {
    pub bins: Vec<Bin<T>>,
}

/// Bins positive values into `[base^j, base^(j+1))` with densities
/// `count / (width * total)`.
pub fn log_binned_distribution<T: Scalar>(values: &[T], base: T) -> Result<BinnedDistribution<T>> {
    if !(base > T::one()) {
        return Err(Error::invalid("bin base must exceed 1"));
    }
    let tail = Distinct::from_values(values);
    if tail.values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let total = T::from_u64(tail.total()).unwrap();
    let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
    for (&v, &c) in tail.values.iter().zip(&tail.counts) {
        *counts.entry(bin_index(v, base)).or_insert(0) += c;
    }
    let bins = counts
        .into_iter()
        .map(|(j, c)| {
            let lower = base.powi(j);
            let upper = base.powi(j + 1);
            Bin { lower, upper, density: T::from_u64(c).unwrap() / ((upper - lower) * total) }
        })
        .collect();
    Ok(BinnedDistribution { bins })
}

fn bin_index<T: Scalar>(x: T, base: T) -> i32 {
    let mut j = (x.ln() / base.ln()).floor().to_i32().unwrap_or(0);
    while base.powi(j + 1) <= x {
        j += 1;
    }
    while base.powi(j) > x {
        j -= 1;
    }
    j
}

/// Average degree implied by a power law with exponent `alpha` over the
/// nonzero-degree fraction: `nz * (alpha - 1) / (alpha - 2)`.
pub fn avg_degree_from_alpha<T: Scalar>(alpha: T, nz_fraction: T) -> Result<T> {
    check_nz(nz_fraction)?;
    let two = T::lit(2.0);
    if !(alpha > two) {
        return Err(Error::invalid("alpha must exceed 2 for a finite mean degree"));
    }
    Ok(nz_fraction * (T::one() + T::one() / (alpha - two)))
}

/// Inverse of [`avg_degree_from_alpha`]: `delta = alpha - 2 = 1 / (d/nz - 1)`.
pub fn delta_from_avg_degree<T: Scalar>(avg_degree: T, nz_fraction: T) -> Result<T> {
    check_nz(nz_fraction)?;
    let excess = avg_degree / nz_fraction - T::one();
    if !(excess > T::zero()) {
        return Err(Error::invalid("average degree must exceed the nonzero fraction"));
    }
    Ok(T::one() / excess)
}

fn check_nz<T: Scalar>(nz: T) -> Result<()> {
    if nz > T::zero() && nz <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid("nonzero fraction must lie in (0, 1]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mle_hand_value() {
        let alpha = mle_alpha(&[100.0_f64, 272.0], 100.0).unwrap();
        assert_abs_diff_eq!(alpha, 1.0 + 2.0 / 2.72_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(alpha, 2.999, epsilon = 1e-3);
    }

    #[test]
    fn mle_rejects_degenerate_tails() {
        assert!(matches!(mle_alpha(&[5.0_f64; 20], 5.0), Err(Error::Degenerate(_))));
        assert!(matches!(mle_alpha(&[1.0_f64, 2.0], 3.0), Err(Error::InsufficientData { .. })));
        assert!(mle_alpha(&[1.0_f64, 2.0], 0.0).is_err());
    }

    #[test]
    fn ks_two_point_tail() {
        // S = (1/2, 1), P = (0, 1 - 1/2) at the two points
        for xmin in [1.0_f64, 3.0, 17.5] {
            let ks = ks_statistic(&[xmin, 2.0 * xmin], xmin, 2.0).unwrap();
            assert_abs_diff_eq!(ks, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn ks_at_quantile_midpoints() {
        let m = 200;
        let alpha = 2.5_f64;
        let xs: Vec<f64> = (0..m)
            .map(|k| {
                let u = (k as f64 + 0.5) / m as f64;
                (1.0 - u).powf(-1.0 / (alpha - 1.0))
            })
            .collect();
        let ks = ks_statistic(&xs, 1.0, alpha).unwrap();
        assert!(ks < 1.0 / m as f64 + 1e-9, "ks = {ks}");
        assert!(ks_statistic(&xs, 1e9, alpha).is_err());
        assert!(ks_statistic(&xs, 1.0, 1.0).is_err());
    }

    #[test]
    fn fit_rejects_constant_and_tiny_inputs() {
        assert!(fit_exponent(&[3.0_f64; 50]).is_err());
        assert!(matches!(fit_exponent(&[1.0_f64, 2.0, 3.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn opt_is_ks_minimum_and_set_matches_window() {
        let values: Vec<f64> = (1..=400).map(|i| (i as f64).sqrt().floor() + (i % 7) as f64).collect();
        let r = fit_exponent(&values).unwrap();
        assert!(r.candidates.iter().all(|c| r.opt.ks <= c.ks));
        let expected: Vec<_> = r.candidates.iter().filter(|c| (c.ks - r.opt.ks).abs() < 0.05).collect();
        assert_eq!(expected.len(), r.alpha_set.len());
        assert!(r.alpha_set.contains(&r.opt));
        let (lo, hi) = r.alpha_set_range();
        assert!(lo <= r.opt.alpha_hat && r.opt.alpha_hat <= hi);
    }

    #[test]
    fn histogram_fit_matches_value_fit() {
        let degrees: Vec<u32> = (1..=300u32).map(|i| 1 + 600 / (i + 3)).collect();
        let mut hist = BTreeMap::new();
        for &d in &degrees {
            *hist.entry(d).or_insert(0u64) += 1;
        }
        let as_f64: Vec<f64> = degrees.iter().map(|&d| f64::from(d)).collect();
        let a = fit_exponent(&as_f64).unwrap();
        let b = fit_degree_histogram(&hist, &FitOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binning_hand_counts() {
        let b = log_binned_distribution(&[1.0_f64, 1.0, 2.0, 3.0], 2.0).unwrap();
        assert_eq!(b.bins.len(), 2);
        assert_eq!((b.bins[0].lower, b.bins[0].upper), (1.0, 2.0));
        assert_abs_diff_eq!(b.bins[0].density, 2.0 / 4.0);
        assert_eq!((b.bins[1].lower, b.bins[1].upper), (2.0, 4.0));
        assert_abs_diff_eq!(b.bins[1].density, 2.0 / (2.0 * 4.0));

        let single = log_binned_distribution(&[5.0_f64; 9], 2.0).unwrap();
        assert_eq!(single.bins.len(), 1);
        assert_abs_diff_eq!(single.bins[0].density, 1.0 / single.bins[0].width());

        assert!(log_binned_distribution::<f64>(&[], 2.0).is_err());
        assert!(log_binned_distribution(&[1.0_f64], 1.0).is_err());
    }

    #[test]
    fn exact_powers_land_in_their_own_bin() {
        for j in -3..20 {
            let x = 2.0_f64.powi(j);
            assert_eq!(bin_index(x, 2.0), j);
        }
        assert_eq!(bin_index(1000.0_f64, 10.0), 3);
    }

    #[test]
    fn degree_identities() {
        assert_abs_diff_eq!(avg_degree_from_alpha(3.0_f64, 1.0).unwrap(), 2.0);
        assert_abs_diff_eq!(avg_degree_from_alpha(2.5_f64, 0.5).unwrap(), 1.5);
        assert!(avg_degree_from_alpha(2.0_f64, 1.0).is_err());
        assert!(avg_degree_from_alpha(3.0_f64, 0.0).is_err());
        assert_abs_diff_eq!(delta_from_avg_degree(2.0_f64, 1.0).unwrap(), 1.0);
        assert!(delta_from_avg_degree(1.0_f64, 1.0).is_err());
        for alpha in [2.1_f64, 2.5, 3.0, 4.0] {
            let d = avg_degree_from_alpha(alpha, 0.7).unwrap();
            assert_abs_diff_eq!(delta_from_avg_degree(d, 0.7).unwrap(), alpha - 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = mle_alpha(&[100.0_f32, 272.0], 100.0).unwrap();
        assert!((a - 2.9987).abs() < 1e-3);
        assert!((avg_degree_from_alpha(3.0_f32, 1.0).unwrap() - 2.0).abs() < 1e-6);
    }
}
