//! Trustworthiness auditing of synthetic tabular data.
//!
//! The crate evaluates synthetic datasets against the real data they were
//! derived from along five trust dimensions (fidelity, privacy, utility,
//! fairness, robustness), normalizes every metric through a pooled empirical
//! CDF, aggregates the normalized scores into per-dimension indices with an
//! independent (geometric-mean) copula, and combines the dimension indices
//! into a profile-weighted trustworthiness index used for ranking datasets
//! and selecting generator checkpoints.
//!
//! Numerical kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! orchestration layer works in [`Real`].

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod data;
pub mod downstream;
pub mod embedding;
pub mod error;
pub mod fidelity;
pub mod neighbors;
pub mod privacy;
pub mod report;
mod scalar;
pub mod seed;
pub mod synthgen;

pub use error::{AuditError, Result};
pub use scalar::Scalar;

/// Scalar type used by the orchestration layer and file formats.
pub type Real = f64;
/// Row-major `N × d` matrix of points (one row per sample).
pub type Matrix = ndarray::Array2<Real>;
/// Dense vector in [`Real`].
pub type Vector = ndarray::Array1<Real>;

pub use aggregation::{MetricRecord, Polarity, TrustDimension, TrustProfile};
pub use data::{DatasetSchema, TabularDataset};
pub use report::{run_audit, AuditConfig, AuditReport};
