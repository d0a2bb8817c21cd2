//! Prompt bundle trading simulator.
//!
//! A platform repeatedly picks `K` of `N` prompt categories whose quality is
//! unknown (a combinatorial multi-armed bandit), packs `M` products from each
//! into bundles, and prices the bundles through a three-stage leader/follower
//! game between the consumer, the platform and the selling categories.
//!
//! Module map:
//!
//! - [`market`]: domain types and the three participants' profit functions.
//! - [`catalog`]: synthetic product pools and keyed bundle draws.
//! - [`bandit`]: quality estimator and the five selection policies.
//! - [`stackelberg`]: closed-form backward-induction equilibrium and a
//!   numeric argmax oracle.
//! - [`engine`]: the online loop, run records and delta metrics.
//! - [`experiments`]: T/N/K sweeps and frozen-iteration sensitivity sweeps.

// `!(x > 0.0)` is the idiom for domain checks that must also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod catalog;
pub mod engine;
mod error;
pub mod experiments;
pub mod format;
pub mod market;
pub mod rng;
pub mod stackelberg;

pub use bandit::{PolicyConfig, QualityEstimator, Selection};
pub use catalog::{ClassBound, PoolSpec, PromptPool};
pub use engine::{run, IterationRecord, RunConfig, RunRecord};
pub use error::{Error, Infeasibility, Result};
pub use experiments::{SweepAxis, SweepSpec};
pub use market::{
    CategoryId, CategoryParams, ConsumerParams, MarketParams, PlatformParams, ProfitReport,
    QualityObservation, Strategy,
};
pub use stackelberg::{Equilibrium, GameInstance, StageAggregates};
