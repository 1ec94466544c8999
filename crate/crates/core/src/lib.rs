//! Growing-network toolkit: rate-based generators whose average degree grows
//! as `a + c n^b`, constant-exponent baselines, power-law exponent estimation
//! with KS-selected `xmin`, average-degree curve fitting, and replay of
//! timestamped edge streams with Z/R/I/H event classification.
//!
//! Numeric routines are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the `f64` instantiations used by the simulators
//! and the command-line tool.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod models;
pub mod powerlaw;
pub mod scalar;
pub mod stream;

pub use curve::{fit_avg_degree_curve, fit_avg_degree_curve_with, AvgDegreeCurve, CurveFitOptions, CurveForm, CurvePoint};
pub use error::{Error, Result};
pub use graph::{DynamicGraph, EdgeInsert, NodeId, Snapshot};
pub use models::{
    invert_model_ii, model_ii_curve_params, predicted_avg_degree_model_i, predicted_avg_degree_model_ii,
    predicted_edge_fractions, predicted_edge_fractions_model_ii, simulate_barabasi_albert, simulate_dorogovtsev,
    simulate_model_i, simulate_model_ii, simulate_vazquez, simulate_vertex_copying, BaselineParams, EdgeFractions,
    InversionConventions, ModelIIParams, ModelIParams,
};
pub use powerlaw::{
    fit_exponent, fit_exponent_with, ks_statistic, log_binned_distribution, mle_alpha, CandidateGrid,
    ExponentFitReport, FitOptions, TailEstimate,
};
pub use scalar::Scalar;

pub type ModelIParams64 = ModelIParams<f64>;
pub type ModelIIParams64 = ModelIIParams<f64>;
pub type AvgDegreeCurve64 = AvgDegreeCurve<f64>;
pub type CurvePoint64 = CurvePoint<f64>;
pub type ExponentFitReport64 = ExponentFitReport<f64>;
pub type TailEstimate64 = TailEstimate<f64>;
pub type FitOptions64 = FitOptions<f64>;

pub type ModelIParams32 = ModelIParams<f32>;
pub type ModelIIParams32 = ModelIIParams<f32>;
pub type AvgDegreeCurve32 = AvgDegreeCurve<f32>;
pub type ExponentFitReport32 = ExponentFitReport<f32>;
