//! Adaptive full-duplex / half-duplex jamming receiver for a secure D2D link
//! against Poisson-distributed eavesdroppers.
//!
//! The crate covers the closed-form and numerical secrecy outage analysis
//! ([`analytics`]), the off-line throughput optimization ([`optimizer`]), the
//! per-slot on-line decision rule ([`online`]) and a Monte Carlo simulator
//! that validates both ([`sim`]). Numeric code is generic over [`Scalar`]
//! (`f32`/`f64`); the aliases below fix the common double-precision choice.

// `!(x > 0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cli;
pub mod config;
pub mod error;
pub mod online;
pub mod optimizer;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod sim;
pub mod units;

pub use analytics::{ComparisonMetrics, LinkState};
pub use config::{Config, SweepSpec};
pub use error::{Error, Result};
pub use online::{decide, Action};
pub use optimizer::{optimize, optimize_with, GridConfig};
pub use params::{DerivedConstants, FdParams, HdParams, SwitchedSolution, SystemParams};
pub use scalar::Scalar;
pub use sim::{empirical_sop, run_online, sample_eve_field, SimReport};
pub use units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm};

/// Double-precision aliases.
pub type SystemParamsF64 = SystemParams<f64>;
pub type FdParamsF64 = FdParams<f64>;
pub type HdParamsF64 = HdParams<f64>;
pub type SwitchedSolutionF64 = SwitchedSolution<f64>;

/// Single-precision aliases.
pub type SystemParamsF32 = SystemParams<f32>;
pub type FdParamsF32 = FdParams<f32>;
pub type HdParamsF32 = HdParams<f32>;
pub type SwitchedSolutionF32 = SwitchedSolution<f32>;
