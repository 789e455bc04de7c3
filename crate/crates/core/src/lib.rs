//! Team formation by maximizing `lambda * coverage - cost`.
//!
//! Experts hold skills and charge a cost; a task is a set of skills. The
//! crate provides the objective and its incremental evaluator, uniform and
//! partition matroids, offline greedy solvers (eager, lazy and prefix
//! variants) with baselines, online and streaming solvers, an exhaustive
//! oracle for small instances, and an experiment harness.

pub mod error;
pub mod fixtures;
pub mod harness;
pub mod matroid;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod registry;
pub mod solvers;
pub mod streaming;

pub use error::{Error, Result};
pub use matroid::{Matroid, MatroidTracker, PartitionMatroid, UniformMatroid};
pub use model::{Expert, ExpertId, Instance, InstanceData, SkillId, Solution, Telemetry};
pub use objective::{ObjectiveState, ScaleFactor};
pub use oracle::{brute_force, cardinality_profile, Constraint, OracleResult};
pub use registry::{run_solver, Budget, RunParams, SolverKind};
pub use streaming::ArrivalOrder;
