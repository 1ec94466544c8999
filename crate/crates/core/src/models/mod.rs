//! Growth models: the random/homophily processes (Model I and its extension
//! with influenced and root nodes, Model II), their closed-form mean-field
//! trajectories, and the constant-exponent baseline generators.

mod baselines;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::curve::AvgDegreeCurve;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use baselines::{
    simulate_barabasi_albert, simulate_dorogovtsev, simulate_vazquez, simulate_vertex_copying, BaselineParams,
};
pub use simulate::{
    simulate_model_i, simulate_model_i_with, simulate_model_ii, simulate_model_ii_with, GrowthSimulator, InitialWiring,
    HOMOPHILY_RETRIES,
};

/// Random edges at rate `r` per node, homophily edges at rate `s` per unit
/// homophily degree, starting from `N0` nodes and `H0` homophily edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelIParams<T> {
    pub r: T,
    pub s: T,
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "H0")]
    pub h0: usize,
}

/// Model I plus influenced nodes (rate `p` per node, one edge to a uniform
/// existing node) and root nodes (rate `q` per node, no edge).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelIIParams<T> {
    pub p: T,
    pub q: T,
    pub r: T,
    pub s: T,
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "H0")]
    pub h0: usize,
}

fn check_start(n0: usize, h0: usize) -> Result<()> {
    if n0 < 2 {
        return Err(Error::invalid("N0 must be at least 2"));
    }
    if h0 < 1 {
        return Err(Error::invalid("H0 must be at least 1"));
    }
    if h0 > n0 * (n0 - 1) / 2 {
        return Err(Error::invalid("H0 exceeds the number of node pairs among N0 nodes"));
    }
    Ok(())
}

impl<T: Scalar> ModelIParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > T::zero()) || !(self.s > T::zero()) || !self.r.is_finite() || !self.s.is_finite() {
            return Err(Error::invalid("r and s must be positive and finite"));
        }
        check_start(self.n0, self.h0)
    }

    /// Growth exponent `s/r - 1` of the average degree.
    pub fn growth_exponent(&self) -> T {
        self.s / self.r - T::one()
    }
}

impl<T: Scalar> ModelIIParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= T::zero()) || !(self.q >= T::zero()) {
            return Err(Error::invalid("p and q must be nonnegative"));
        }
        ModelIParams { r: self.r, s: self.s, n0: self.n0, h0: self.h0 }.validate()?;
        if !self.p.is_finite() || !self.q.is_finite() {
            return Err(Error::invalid("p and q must be finite"));
        }
        Ok(())
    }

    /// Total per-node growth rate `p + q + 2r`.
    pub fn node_rate(&self) -> T {
        self.p + self.q + T::lit(2.0) * self.r
    }
}

impl<T: Scalar> From<ModelIParams<T>> for ModelIIParams<T> {
    fn from(m: ModelIParams<T>) -> Self {
        Self { p: T::zero(), q: T::zero(), r: m.r, s: m.s, n0: m.n0, h0: m.h0 }
    }
}

/// Mean-field average degree of Model I at size `n`:
/// `1 + 2 H0 / N0^(s/r) * n^(s/r - 1)`.
pub fn predicted_avg_degree_model_i<T: Scalar>(params: &ModelIParams<T>, n: T) -> T {
    let ratio = params.s / params.r;
    let h0 = T::from_count(params.h0);
    let n0 = T::from_count(params.n0);
    T::one() + T::lit(2.0) * h0 / n0.powf(ratio) * n.powf(ratio - T::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFractions<T> {
    pub random: T,
    pub influence: T,
    pub homophily: T,
}

/// Shares of random and homophily edges at time `t` in Model I, from
/// `e_r(t) = N0/2 e^(2rt)` and `e_h(t) = H0 e^(2st)`:
/// the random share is `1 / (1 + 2H0/N0 e^(2(s-r)t))`.
pub fn predicted_edge_fractions<T: Scalar>(params: &ModelIParams<T>, t: T) -> EdgeFractions<T> {
    predicted_edge_fractions_model_ii(&ModelIIParams::from(*params), t)
}

/// Model II edge shares at time `t` from the mean-field edge counts
/// `e_r = r/D N0 e^(Dt)`, `e_i = p/D N0 e^(Dt)`, `e_h = H0 e^(2st)`.
pub fn predicted_edge_fractions_model_ii<T: Scalar>(params: &ModelIIParams<T>, t: T) -> EdgeFractions<T> {
    let d = params.node_rate();
    let n0 = T::from_count(params.n0);
    let h0 = T::from_count(params.h0);
    let two = T::lit(2.0);
    // everything divided by the node-driven scale N0 e^(Dt) / D
    let random = params.r;
    let influence = params.p;
    let homophily = h0 * d / n0 * ((two * params.s - d) * t).exp();
    let total = random + influence + homophily;
    EdgeFractions { random: random / total, influence: influence / total, homophily: homophily / total }
}

/// `(a, b, c)` of the Model II average-degree law `a + c n^b`:
/// `a = 2(r+p)/D`, `b = 2s/D - 1`, `c = 2 H0 / N0^(2s/D)`, `D = p + q + 2r`.
pub fn model_ii_curve_params<T: Scalar>(params: &ModelIIParams<T>) -> AvgDegreeCurve<T> {
    let d = params.node_rate();
    let two = T::lit(2.0);
    let a = two * (params.r + params.p) / d;
    let b = two * params.s / d - T::one();
    let c = two * T::from_count(params.h0) / T::from_count(params.n0).powf(two * params.s / d);
    AvgDegreeCurve::from_params(a, b, c)
}

pub fn predicted_avg_degree_model_ii<T: Scalar>(params: &ModelIIParams<T>, n: T) -> T {
    model_ii_curve_params(params).evaluate(n)
}

/// Mean-field time at which Model II reaches `n` nodes.
pub fn time_at_size<T: Scalar>(params: &ModelIIParams<T>, n: T) -> T {
    (n / T::from_count(params.n0)).ln() / params.node_rate()
}

/// Long-run fraction of nonzero-degree nodes, `1 - q / (p + q + 2r)`.
pub fn predicted_nz_fraction<T: Scalar>(params: &ModelIIParams<T>) -> T {
    T::one() - params.q / params.node_rate()
}

/// The three free choices needed to invert `(a, b, c)` into Model II rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionConventions<T> {
    /// `D = p + q + 2r`
    pub total_rate: T,
    pub h0: usize,
    pub r: T,
}

impl<T: Scalar> Default for InversionConventions<T> {
    fn default() -> Self {
        Self { total_rate: T::lit(0.1), h0: 2, r: T::lit(0.05) }
    }
}

/// Model II parameters reproducing the curve `a + c n^b` under the given
/// conventions.
pub fn invert_model_ii<T: Scalar>(a: T, b: T, c: T, conv: &InversionConventions<T>) -> Result<ModelIIParams<T>> {
    let two = T::lit(2.0);
    let d = conv.total_rate;
    if !(a > T::zero() && a < two) {
        return Err(Error::invalid("a must lie in (0, 2)"));
    }
    if !(b > T::zero()) || !(c > T::zero()) {
        return Err(Error::invalid("b and c must be positive"));
    }
    if !(d > T::zero()) {
        return Err(Error::invalid("total rate D must be positive"));
    }
    if !(conv.r > T::zero() && conv.r <= a * d / two) {
        return Err(Error::invalid("r must lie in (0, a*D/2]"));
    }
    if conv.h0 < 1 {
        return Err(Error::invalid("H0 must be at least 1"));
    }
    let s = (b + T::one()) * d / two;
    let n0 = (two * T::from_count(conv.h0) / c).powf(T::one() / (b + T::one())).round();
    let n0 = n0.to_usize().ok_or_else(|| Error::invalid("N0 out of range"))?;
    let p = a * d / two - conv.r;
    let q = d - p - two * conv.r;
    // tolerate rounding noise of the order of the inputs' precision
    let slack = T::lit(1e-12) * d;
    if p < -slack || q < -slack {
        return Err(Error::invalid(format!(
            "conventions give negative rates (p = {p}, q = {q})"
        )));
    }
    if n0 < 2 {
        return Err(Error::invalid(format!("N0 = {n0} is below 2")));
    }
    let params = ModelIIParams { p: p.max(T::zero()), q: q.max(T::zero()), r: conv.r, s, n0, h0: conv.h0 };
    params.validate()?;
    Ok(params)
}
