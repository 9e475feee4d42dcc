//! Edge user allocation with dynamic QoS levels.
//!
//! App users are assigned to edge servers that cover them, each at one of a
//! few discrete QoS levels (resource bundles). A user's satisfaction follows
//! a logistic QoE curve of the mean demand it is granted; the goal is to
//! maximize total QoE without exceeding any server's capacity in any
//! resource dimension. Users left unallocated fall back to the cloud and
//! contribute nothing.
//!
//! The crate provides:
//! * [`model`]: resource vectors, the QoE curve, scenarios, scoring and feasibility.
//! * [`geometry`]: planar and great-circle distances, coverage sets.
//! * [`solvers`]: an exact branch-and-bound solver, a brute-force oracle,
//!   the greedy heuristic, and the random and bin-packing baselines.
//! * [`data`]: dataset CSVs, scenario generation, scenario/allocation files.
//! * [`harness`]: parameter sweeps, aggregation, CSV and SVG output.
//!
//! Core types are generic over a [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file formats and the CLI use.

pub mod cli;
pub mod data;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod scalar;
pub mod solvers;

pub use error::{DataError, GeometryError, HarnessError, ModelError, SolverError};
pub use geometry::{DistanceMetric, Point};
pub use model::{Allocation, Assignment, ServerId, UserId, Verdict, Violation};
pub use scalar::Scalar;

pub type ResourceVector = model::ResourceVector<f64>;
pub type QoeParams = model::QoeParams<f64>;
pub type QosCatalog = model::QosCatalog<f64>;
pub type QosLevel = model::QosLevel<f64>;
pub type User = model::User<f64>;
pub type EdgeServer = model::EdgeServer<f64>;
pub type Scenario = model::Scenario<f64>;
pub type SolverReport = model::SolverReport<f64>;
pub type ExactSolverConfig = solvers::ExactSolverConfig;
