use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{Scenario, ServerId, UserId};
use crate::scalar::Scalar;

/// Where one user is served.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assignment {
    /// Served by the vendor's cloud; contributes zero QoE.
    Unallocated,
    /// Served by `server` at the 1-based QoS `level`.
    Assigned { server: ServerId, level: usize },
}

impl Assignment {
    pub fn is_assigned(&self) -> bool {
        matches!(self, Self::Assigned { .. })
    }
}

/// One assignment per scenario user, in the scenario's user order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    assignments: Vec<Assignment>,
}

impl Allocation {
    pub fn unallocated(n_users: usize) -> Self {
        Self { assignments: vec![Assignment::Unallocated; n_users] }
    }

    pub fn from_assignments(assignments: Vec<Assignment>) -> Self {
        Self { assignments }
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn get(&self, user_idx: usize) -> Assignment {
        self.assignments[user_idx]
    }

    pub fn set(&mut self, user_idx: usize, a: Assignment) {
        self.assignments[user_idx] = a;
    }

    pub fn allocated_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_assigned()).count()
    }

    /// `(user id, assignment)` rows in scenario order.
    pub fn rows<T: Scalar>(&self, sc: &Scenario<T>) -> Result<Vec<(UserId, Assignment)>, ModelError> {
        ensure_covers(self, sc)?;
        Ok(sc.users().iter().zip(&self.assignments).map(|(u, a)| (u.id, *a)).collect())
    }

    /// Builds an allocation from id-keyed rows. Users absent from `rows` are
    /// unallocated; if a user appears more than once the last row wins (use
    /// [`check_rows`] to detect that).
    pub fn from_rows<T: Scalar>(rows: &[(UserId, Assignment)], sc: &Scenario<T>) -> Result<Self, ModelError> {
        let mut alloc = Self::unallocated(sc.users().len());
        for (id, a) in rows {
            let i = sc.user_idx(*id).ok_or(ModelError::UnknownUser(id.0))?;
            alloc.assignments[i] = *a;
        }
        Ok(alloc)
    }
}

fn ensure_covers<T: Scalar>(a: &Allocation, sc: &Scenario<T>) -> Result<(), ModelError> {
    if a.len() != sc.users().len() {
        return Err(ModelError::AllocationSize { expected: sc.users().len(), got: a.len() });
    }
    Ok(())
}

/// QoE obtained by one user: the level's QoE, or zero when unallocated.
///
/// An assignment naming a level outside the catalog also yields zero; such
/// allocations are rejected by [`check_feasible`].
pub fn qoe_of_user<T: Scalar>(a: &Allocation, user: UserId, sc: &Scenario<T>) -> Result<T, ModelError> {
    ensure_covers(a, sc)?;
    let i = sc.user_idx(user).ok_or(ModelError::UnknownUser(user.0))?;
    Ok(assignment_qoe(a.get(i), sc))
}

fn assignment_qoe<T: Scalar>(a: Assignment, sc: &Scenario<T>) -> T {
    match a {
        Assignment::Unallocated => T::zero(),
        Assignment::Assigned { level, .. } => sc.catalog().level(level).map_or(T::zero(), |l| l.qoe),
    }
}

/// Total QoE over all users, summed in ascending user-id order so the result
/// does not depend on how users are listed.
pub fn score<T: Scalar>(a: &Allocation, sc: &Scenario<T>) -> Result<T, ModelError> {
    ensure_covers(a, sc)?;
    let mut by_id: Vec<(UserId, Assignment)> = sc.users().iter().map(|u| u.id).zip(a.assignments.iter().copied()).collect();
    by_id.sort_unstable_by_key(|(id, _)| *id);
    Ok(by_id.into_iter().map(|(_, x)| assignment_qoe(x, sc)).sum())
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// User assigned to a server that does not cover it (or does not exist).
    Proximity { user: UserId, server: ServerId },
    /// Summed demand on `server` exceeds its capacity in `dimension`.
    Capacity { server: ServerId, dimension: usize, load: f64, capacity: f64 },
    /// User listed more than once.
    DoubleAssignment { user: UserId, count: usize },
    /// Level index outside `1..=q`.
    InvalidLevel { user: UserId, level: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Proximity { user, server } => write!(f, "proximity: user {user} is not covered by server {server}"),
            Self::Capacity { server, dimension, load, capacity } => {
                write!(f, "resource: server {server} dimension {dimension} load {load} exceeds capacity {capacity}")
            }
            Self::DoubleAssignment { user, count } => write!(f, "double-assignment: user {user} appears {count} times"),
            Self::InvalidLevel { user, level } => write!(f, "level: user {user} has invalid level {level}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks proximity, per-dimension capacity and one-server-one-level.
pub fn check_feasible<T: Scalar>(a: &Allocation, sc: &Scenario<T>) -> Result<Verdict, ModelError> {
    check_rows(&a.rows(sc)?, sc)
}

/// Feasibility of id-keyed rows, the form allocation files take.
///
/// Unknown user ids are an error; every other problem is reported as a
/// [`Violation`]. Users missing from `rows` count as unallocated.
pub fn check_rows<T: Scalar>(rows: &[(UserId, Assignment)], sc: &Scenario<T>) -> Result<Verdict, ModelError> {
    let dim = sc.dim();
    let mut seen = vec![0usize; sc.users().len()];
    let mut load = vec![T::zero(); sc.servers().len() * dim];
    let mut violations = Vec::new();

    for (id, a) in rows {
        let i = sc.user_idx(*id).ok_or(ModelError::UnknownUser(id.0))?;
        seen[i] += 1;
        if seen[i] == 2 {
            let count = rows.iter().filter(|(u, _)| u == id).count();
            violations.push(Violation::DoubleAssignment { user: *id, count });
        }
        let Assignment::Assigned { server, level } = *a else { continue };
        let Some(lv) = sc.catalog().level(level) else {
            violations.push(Violation::InvalidLevel { user: *id, level });
            continue;
        };
        let Some(j) = sc.server_idx(server).filter(|j| sc.candidates(i).contains(j)) else {
            violations.push(Violation::Proximity { user: *id, server });
            continue;
        };
        for (k, w) in lv.demand.components().iter().enumerate() {
            load[j * dim + k] = load[j * dim + k] + *w;
        }
    }

    for (j, s) in sc.servers().iter().enumerate() {
        for (k, cap) in s.capacity.components().iter().enumerate() {
            let l = load[j * dim + k];
            if l > *cap + T::tolerance() {
                violations.push(Violation::Capacity { server: s.id, dimension: k, load: l.as_f64(), capacity: cap.as_f64() });
            }
        }
    }
    Ok(Verdict { violations })
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct SolverReport<T> {
    pub solver: &'static str,
    pub allocation: Allocation,
    pub total_qoe: T,
    pub allocated_count: usize,
    pub wall_time: Duration,
    /// Proven optimal (only the exact solver and the oracle ever set this).
    pub optimal: bool,
    /// Search nodes visited; zero for constructive heuristics.
    pub nodes_explored: u64,
    /// Best proven upper bound on total QoE, when the solver computes one.
    pub upper_bound: Option<T>,
    /// Identifier of the random generator algorithm, for seeded solvers.
    pub rng: Option<&'static str>,
    pub seed: Option<u64>,
}

impl<T: Scalar> SolverReport<T> {
    /// Fills in score and counts from `allocation`.
    pub fn new(solver: &'static str, allocation: Allocation, sc: &Scenario<T>, wall_time: Duration) -> Result<Self, ModelError> {
        let total_qoe = score(&allocation, sc)?;
        Ok(Self {
            solver,
            allocated_count: allocation.allocated_count(),
            allocation,
            total_qoe,
            wall_time,
            optimal: false,
            nodes_explored: 0,
            upper_bound: None,
            rng: None,
            seed: None,
        })
    }
}
