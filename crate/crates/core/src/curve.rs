//! Least-squares fit of the average-degree growth law `d(n) = a + c * n^b`.
//!
//! The optimizer works in `(a, b, ln c)`, which keeps `c` positive, and is a
//! damped Gauss-Newton (Levenberg-Marquardt) iteration on the three
//! parameters. Several starting points are tried and the lowest converged
//! objective wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;
pub const DEFAULT_GRADIENT_TOLERANCE: f64 = 1e-10;
/// `ln c` reported for a flat series.
pub const LN_C_FLOOR: f64 = -30.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub n: T,
    pub avg_degree: T,
}

impl<T: Scalar> CurvePoint<T> {
    pub fn new(n: T, avg_degree: T) -> Self {
        Self { n, avg_degree }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvgDegreeCurve<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub rmse: T,
    /// Set when the data carry no information about `b` (flat series).
    pub b_unconstrained: bool,
    pub iterations: usize,
}

impl<T: Scalar> AvgDegreeCurve<T> {
    pub fn from_params(a: T, b: T, c: T) -> Self {
        Self { a, b, c, rmse: T::zero(), b_unconstrained: false, iterations: 0 }
    }

    pub fn ln_c(&self) -> T {
        self.c.ln()
    }

    pub fn evaluate(&self, n: T) -> T {
        evaluate_curve(self, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CurveForm {
    /// `a + c n^b`
    #[default]
    Offset,
    /// `c n^b` with `a` pinned at zero, for comparison with plain densification.
    PurePower,
}

#[derive(Clone, Copy, Debug)]
pub struct CurveFitOptions<T> {
    pub form: CurveForm,
    pub max_iterations: usize,
    pub gradient_tolerance: T,
}

impl<T: Scalar> Default for CurveFitOptions<T> {
    fn default() -> Self {
        Self {
            form: CurveForm::Offset,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            gradient_tolerance: T::lit(DEFAULT_GRADIENT_TOLERANCE),
        }
    }
}

pub fn evaluate_curve<T: Scalar>(curve: &AvgDegreeCurve<T>, n: T) -> T {
    curve.a + curve.c * n.powf(curve.b)
}

pub fn rmse<T: Scalar>(points: &[CurvePoint<T>], curve: &AvgDegreeCurve<T>) -> Result<T> {
    if points.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let sse: T = points
        .iter()
        .map(|p| {
            let r = p.avg_degree - evaluate_curve(curve, p.n);
            r * r
        })
        .sum();
    Ok((sse / T::from_count(points.len())).sqrt())
}

/// Parameter vector `(a, b, ln c)`.
pub type Theta<T> = [T; 3];

#[inline]
fn power_term<T: Scalar>(theta: &Theta<T>, ln_n: T) -> T {
    (theta[1] * ln_n + theta[2]).exp()
}

/// `0.5 * sum (y_i - a - exp(b ln n_i + ln c))^2`.
pub fn objective<T: Scalar>(points: &[CurvePoint<T>], theta: &Theta<T>) -> T {
    let half = T::lit(0.5);
    points
        .iter()
        .map(|p| {
            let r = p.avg_degree - theta[0] - power_term(theta, p.n.ln());
            half * r * r
        })
        .sum()
}

/// Analytic gradient of [`objective`] in `(a, b, ln c)`.
pub fn objective_gradient<T: Scalar>(points: &[CurvePoint<T>], theta: &Theta<T>) -> Theta<T> {
    let mut g = [T::zero(); 3];
    for p in points {
        let ln_n = p.n.ln();
        let term = power_term(theta, ln_n);
        let r = p.avg_degree - theta[0] - term;
        g[0] = g[0] - r;
        g[1] = g[1] - r * term * ln_n;
        g[2] = g[2] - r * term;
    }
    g
}

pub fn fit_avg_degree_curve<T: Scalar>(points: &[CurvePoint<T>]) -> Result<AvgDegreeCurve<T>> {
    fit_avg_degree_curve_with(points, &CurveFitOptions::default())
}

pub fn fit_avg_degree_curve_with<T: Scalar>(
    points: &[CurvePoint<T>],
    opts: &CurveFitOptions<T>,
) -> Result<AvgDegreeCurve<T>> {
    validate_points(points)?;

    let (lo, hi, mean) = points.iter().fold(
        (T::infinity(), T::neg_infinity(), T::zero()),
        |(lo, hi, sum), p| (lo.min(p.avg_degree), hi.max(p.avg_degree), sum + p.avg_degree),
    );
    let mean = mean / T::from_count(points.len());
    let range = hi - lo;
    if range <= T::lit(1e-12) * mean.abs().max(T::one()) {
        let a = if opts.form == CurveForm::Offset { mean } else { T::zero() };
        let c = T::lit(LN_C_FLOOR).exp();
        let mut curve = AvgDegreeCurve { a, b: T::zero(), c, rmse: T::zero(), b_unconstrained: true, iterations: 0 };
        if opts.form == CurveForm::PurePower {
            curve.c = mean;
            curve.b_unconstrained = false;
        }
        curve.rmse = rmse(points, &curve)?;
        return Ok(curve);
    }

    let starts: Vec<T> = match opts.form {
        CurveForm::Offset => vec![lo, lo - T::lit(0.5) * range, T::zero(), lo * T::lit(0.5)],
        CurveForm::PurePower => vec![T::zero()],
    };

    let mut best: Option<(T, Theta<T>, usize)> = None;
    let mut last_err = None;
    for a0 in starts {
        let theta0 = initial_guess(points, a0, range);
        match levenberg_marquardt(points, theta0, opts) {
            Ok((theta, iterations)) => {
                let f = objective(points, &theta);
                if best.as_ref().is_none_or(|(bf, _, _)| f < *bf) {
                    best = Some((f, theta, iterations));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (_, theta, iterations) = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or(Error::NoConvergence { iterations: opts.max_iterations })),
    };

    let mut curve = AvgDegreeCurve {
        a: theta[0],
        b: theta[1],
        c: theta[2].exp(),
        rmse: T::zero(),
        b_unconstrained: false,
        iterations,
    };
    let n_max = points.iter().map(|p| p.n).fold(T::zero(), T::max);
    if curve.c * n_max.powf(curve.b) <= T::lit(1e-9) * range {
        curve.b_unconstrained = true;
    }
    curve.rmse = rmse(points, &curve)?;
    Ok(curve)
}

fn validate_points<T: Scalar>(points: &[CurvePoint<T>]) -> Result<()> {
    let mut ns: Vec<T> = points.iter().map(|p| p.n).collect();
    if ns.iter().any(|&n| !(n >= T::one())) || points.iter().any(|p| !p.avg_degree.is_finite()) {
        return Err(Error::invalid("curve points need n >= 1 and finite average degree"));
    }
    ns.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ns.dedup();
    if ns.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: ns.len() });
    }
    if ns[ns.len() - 1] / ns[0] < T::lit(100.0) {
        return Err(Error::invalid("curve points must span at least two decades of n"));
    }
    Ok(())
}

/// Regression of `ln(y - a0 + eps)` on `ln n` for `(b, ln c)`.
fn initial_guess<T: Scalar>(points: &[CurvePoint<T>], a0: T, range: T) -> Theta<T> {
    let eps = T::lit(1e-3) * range;
    let m = T::from_count(points.len());
    let (mut sx, mut sy, mut sxx, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero());
    for p in points {
        let x = p.n.ln();
        let y = (p.avg_degree - a0 + eps).max(eps).ln();
        sx = sx + x;
        sy = sy + y;
        sxx = sxx + x * x;
        sxy = sxy + x * y;
    }
    let denom = m * sxx - sx * sx;
    let b = (m * sxy - sx * sy) / denom;
    let ln_c = (sy - b * sx) / m;
    [a0, b, ln_c]
}

fn levenberg_marquardt<T: Scalar>(
    points: &[CurvePoint<T>],
    mut theta: Theta<T>,
    opts: &CurveFitOptions<T>,
) -> Result<(Theta<T>, usize)> {
    let free_a = opts.form == CurveForm::Offset;
    if !free_a {
        theta[0] = T::zero();
    }
    let ten = T::lit(10.0);
    let mut lambda = T::lit(1e-3);
    let mut f = objective(points, &theta);

    for iter in 0..opts.max_iterations {
        let (jtj, jtr) = normal_equations(points, &theta, free_a);
        let grad_inf = jtr.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if grad_inf < opts.gradient_tolerance {
            return Ok((theta, iter));
        }
        loop {
            let mut damped = jtj;
            for k in 0..3 {
                damped[k][k] = damped[k][k] + lambda * jtj[k][k].max(T::lit(1e-12));
            }
            let step = solve3(damped, jtr);
            let candidate = [theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]];
            let fc = objective(points, &candidate);
            if fc.is_finite() && fc <= f {
                let tiny = step
                    .iter()
                    .zip(&theta)
                    .all(|(s, t)| s.abs() <= T::epsilon() * ten * (t.abs() + T::one()));
                theta = candidate;
                f = fc;
                lambda = (lambda / ten).max(T::lit(1e-15));
                if tiny {
                    return Ok((theta, iter + 1));
                }
                break;
            }
            lambda = lambda * ten;
            if lambda > T::lit(1e16) {
                // no descent possible at working precision
                return Ok((theta, iter + 1));
            }
        }
    }
    let grad = objective_gradient(points, &theta);
    let grad_inf = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
    if grad_inf < opts.gradient_tolerance {
        Ok((theta, opts.max_iterations))
    } else {
        Err(Error::NoConvergence { iterations: opts.max_iterations })
    }
}

/// `J^T J` and `J^T r` for the model Jacobian `J = d f / d theta`.
fn normal_equations<T: Scalar>(points: &[CurvePoint<T>], theta: &Theta<T>, free_a: bool) -> ([[T; 3]; 3], [T; 3]) {
    let mut jtj = [[T::zero(); 3]; 3];
    let mut jtr = [T::zero(); 3];
    for p in points {
        let ln_n = p.n.ln();
        let term = power_term(theta, ln_n);
        let r = p.avg_degree - theta[0] - term;
        let row = [if free_a { T::one() } else { T::zero() }, term * ln_n, term];
        for i in 0..3 {
            jtr[i] = jtr[i] + row[i] * r;
            for j in 0..3 {
                jtj[i][j] = jtj[i][j] + row[i] * row[j];
            }
        }
    }
    if !free_a {
        jtj[0][0] = T::one();
    }
    (jtj, jtr)
}

/// Gaussian elimination with partial pivoting.
fn solve3<T: Scalar>(mut m: [[T; 3]; 3], mut rhs: [T; 3]) -> [T; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let d = m[col][col];
        if d == T::zero() {
            continue;
        }
        for row in col + 1..3 {
            let factor = m[row][col] / d;
            let pivot_row = m[col];
            for (cell, &p) in m[row].iter_mut().zip(&pivot_row).skip(col) {
                *cell = *cell - factor * p;
            }
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = if m[row][row] == T::zero() { T::zero() } else { acc / m[row][row] };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(a: f64, b: f64, c: f64) -> Vec<CurvePoint<f64>> {
        (5..=18).map(|i| {
            let n = 2f64.powi(i);
            CurvePoint::new(n, a + c * n.powf(b))
        }).collect()
    }

    #[test]
    fn evaluates_formula() {
        let oc = AvgDegreeCurve::from_params(0.8, 0.29, 0.132);
        assert_abs_diff_eq!(evaluate_curve(&oc, 1.0), 0.932, epsilon = 1e-12);
        let flat = AvgDegreeCurve::from_params(1.7, 0.4, 0.0);
        assert_eq!(flat.evaluate(12345.0), 1.7);
    }

    #[test]
    fn rmse_hand_values() {
        let curve = AvgDegreeCurve::from_params(1.0, 0.5, 0.1);
        let pts: Vec<_> = [4.0, 100.0].iter().map(|&n| CurvePoint::new(n, curve.evaluate(n))).collect();
        assert_eq!(rmse(&pts, &curve).unwrap(), 0.0);
        let off = [CurvePoint::new(16.0, curve.evaluate(16.0) + 0.1)];
        assert_abs_diff_eq!(rmse(&off, &curve).unwrap(), 0.1, epsilon = 1e-12);
        assert!(rmse::<f64>(&[], &curve).is_err());
    }

    #[test]
    fn recovers_noiseless_occupy_curve() {
        let fit = fit_avg_degree_curve(&sample(0.8, 0.29, 0.132)).unwrap();
        assert_abs_diff_eq!(fit.a, 0.8, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.b, 0.29, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.c, 0.132, epsilon = 1e-6);
        assert!(fit.rmse < 1e-8);
        assert!(!fit.b_unconstrained);
    }

    #[test]
    fn flat_series_flags_b() {
        let pts: Vec<_> = (0..6).map(|i| CurvePoint::new(10f64.powi(i), 1.5)).collect();
        let fit = fit_avg_degree_curve(&pts).unwrap();
        assert_abs_diff_eq!(fit.a, 1.5, epsilon = 1e-12);
        assert!(fit.b_unconstrained);
        assert!(fit.c > 0.0 && fit.c < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let few = &sample(1.0, 0.5, 0.1)[..3];
        assert!(matches!(fit_avg_degree_curve(few), Err(Error::InsufficientData { .. })));
        let narrow: Vec<_> = (0..6).map(|i| CurvePoint::new(10.0 + i as f64, 1.0 + i as f64)).collect();
        assert!(fit_avg_degree_curve(&narrow).is_err());
        let dup: Vec<_> = (0..6).map(|i| CurvePoint::new(if i < 3 { 10.0 } else { 1e4 }, 1.0 + i as f64)).collect();
        assert!(fit_avg_degree_curve(&dup).is_err());
    }

    #[test]
    fn pure_power_variant_pins_offset() {
        let pts = sample(0.0, 0.4, 0.3);
        let opts = CurveFitOptions { form: CurveForm::PurePower, ..Default::default() };
        let fit = fit_avg_degree_curve_with(&pts, &opts).unwrap();
        assert_eq!(fit.a, 0.0);
        assert_abs_diff_eq!(fit.b, 0.4, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.c, 0.3, epsilon = 1e-8);
    }

    #[test]
    fn single_precision_fit() {
        let pts: Vec<CurvePoint<f32>> = sample(1.1, 0.41, 0.02)
            .into_iter()
            .map(|p| CurvePoint::new(p.n as f32, p.avg_degree as f32))
            .collect();
        let opts = CurveFitOptions { gradient_tolerance: 1e-4, ..Default::default() };
        let fit = fit_avg_degree_curve_with(&pts, &opts).unwrap();
        assert!((fit.b - 0.41).abs() < 1e-2, "{fit:?}");
    }
}
