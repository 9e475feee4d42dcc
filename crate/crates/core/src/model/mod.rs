//! Domain types, the QoE model, scoring and feasibility checking.

mod allocation;
mod qoe;
mod resource;
mod scenario;

pub use allocation::{check_feasible, check_rows, qoe_of_user, score, Allocation, Assignment, SolverReport, Verdict, Violation};
pub use qoe::{qoe_of_demand, QoeParams, QosCatalog, QosLevel};
pub use resource::ResourceVector;
pub use scenario::{EdgeServer, Scenario, ServerId, User, UserId};
