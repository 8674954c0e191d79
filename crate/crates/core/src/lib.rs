//! Point estimates, individual confidence intervals and simultaneous
//! confidence intervals for performance measures of binary classification
//! rules, with an optional blurring correction of the variance estimate.
//!
//! The pipeline is: [`moments`] turns a 0/1 test table into moment triples,
//! [`measure`] maps triples to measures and gradients, [`covariance`] builds
//! the delta-method covariance, [`quantile`] solves for the equicoordinate
//! normal quantile, and [`interval`] assembles the intervals. [`sim`] checks
//! coverage by replication.

// `!(x > 0.0)` is used on purpose so NaN takes the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covariance;
pub mod error;
pub mod interval;
pub mod matrix;
pub mod measure;
pub mod moments;
pub mod quantile;
pub mod sim;

pub use covariance::{
    blurring_matrix, correct, correlation, covariance_matrix, influence, CorrelationMatrix,
    CovarianceEstimate, InfluenceVector,
};
pub use error::{Error, Result};
pub use interval::{
    analyze, individual_ci, joint_cis, Choice, IntervalReport, IntervalSpec, Mode, ReportMeta,
    TargetInterval,
};
pub use matrix::Matrix;
pub use measure::{builtin_measures, Catalog, GradientTriple, MeasureSpec, MomentTriple};
pub use moments::{compute_moments, validate, BinaryDataset, EvaluationTarget, RawTable};
pub use quantile::{
    inv_norm_cdf, max_abs_quantile, norm_cdf, sidak_quantile, QuantileRequest, QuantileResult,
};
pub use sim::{
    rare_positive_stress, run_coverage, true_params, ChoiceCoverage, CoverageResult, DataProcess,
    GaussianMixture, NamedRule, RuleSpec, SetCoverage, SimConfig, TrueParams, TruthMethod,
    WidthAudit,
};
