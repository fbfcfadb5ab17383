//! Linear stochastic bandits with heavy-tailed payoffs: optimistic policies
//! built on robust estimators (median of means over group least squares,
//! and truncated weighted least squares), baseline reconstructions, simulated
//! environments and a seeded experiment harness.

pub mod algo;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod seeding;
pub mod validate;

pub use algo::{AlgoConfig, AlgoKind, ConfidenceEllipsoid, Policy, TruncationConvention};
pub use env::{BanditInstance, InstanceSpec, LowerBoundInstance, NoiseModel};
pub use error::{Error, Result};
pub use harness::{AggregateCurve, RunRecord, aggregate, run_experiment, run_single};
