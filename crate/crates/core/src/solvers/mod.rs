//! Allocation methods: exact branch-and-bound, exhaustive oracle, the
//! greedy heuristic, and the random and bin-packing baselines.

mod bound;
mod exact;
mod greedy;
pub mod lp;
mod matching;
mod mix;
mod oracle;
mod random;
mod vsvbp;

use std::fmt;
use std::str::FromStr;

pub use exact::{solve_exact, ExactSolverConfig};
pub use greedy::solve_greedy;
pub use oracle::{solve_oracle, ORACLE_SPACE_LIMIT};
pub use random::solve_random;
pub use vsvbp::solve_vsvbp;

use crate::error::SolverError;
use crate::model::{Allocation, Assignment, Scenario, SolverReport};
use crate::scalar::Scalar;

/// Identifier of the generator used by the seeded solvers.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
    Random,
    Vsvbp,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [Self::Exact, Self::Greedy, Self::Random, Self::Vsvbp, Self::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Greedy => "greedy",
            Self::Random => "random",
            Self::Vsvbp => "vsvbp",
            Self::Oracle => "oracle",
        }
    }

    /// Runs this solver. `seed` is used by the random and bin-packing
    /// baselines only.
    pub fn solve<T: Scalar>(self, sc: &Scenario<T>, seed: u64, exact: &ExactSolverConfig) -> Result<SolverReport<T>, SolverError> {
        match self {
            Self::Exact => solve_exact(sc, exact),
            Self::Oracle => solve_oracle(sc),
            Self::Greedy => Ok(solve_greedy(sc)),
            Self::Random => Ok(solve_random(sc, seed)),
            Self::Vsvbp => Ok(solve_vsvbp(sc, seed)),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, SolverError> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| SolverError::UnknownSolver(s.to_string()))
    }
}

/// Remaining capacity of every server, flattened `server * dim + k`.
#[derive(Debug, Clone)]
pub(crate) struct Residual<T> {
    dim: usize,
    remaining: Vec<T>,
    initial: Vec<T>,
}

impl<T: Scalar> Residual<T> {
    pub(crate) fn new(sc: &Scenario<T>) -> Self {
        let initial: Vec<T> = sc.servers().iter().flat_map(|s| s.capacity.components().iter().copied()).collect();
        Self { dim: sc.dim(), remaining: initial.clone(), initial }
    }

    pub(crate) fn room(&self, j: usize) -> &[T] {
        &self.remaining[j * self.dim..(j + 1) * self.dim]
    }

    pub(crate) fn fits(&self, j: usize, demand: &[T]) -> bool {
        self.room(j).iter().zip(demand).all(|(r, w)| *w <= *r + T::tolerance())
    }

    pub(crate) fn take(&mut self, j: usize, demand: &[T]) {
        for (r, w) in self.remaining[j * self.dim..(j + 1) * self.dim].iter_mut().zip(demand) {
            *r = *r - *w;
        }
    }

    pub(crate) fn give(&mut self, j: usize, demand: &[T]) {
        for (r, w) in self.remaining[j * self.dim..(j + 1) * self.dim].iter_mut().zip(demand) {
            *r = *r + *w;
        }
    }

    /// Sum over dimensions of remaining / initial capacity. Dimensions with
    /// zero initial capacity contribute nothing.
    pub(crate) fn normalized_remaining(&self, j: usize) -> T {
        self.normalized_after(j, None)
    }

    pub(crate) fn normalized_after(&self, j: usize, demand: Option<&[T]>) -> T {
        let base = j * self.dim;
        (0..self.dim)
            .filter(|&k| self.initial[base + k] > T::zero())
            .map(|k| {
                let used = demand.map_or(T::zero(), |w| w[k]);
                (self.remaining[base + k] - used) / self.initial[base + k]
            })
            .sum()
    }

    pub(crate) fn initial_total(&self, j: usize) -> T {
        self.initial[j * self.dim..(j + 1) * self.dim].iter().copied().sum()
    }
}

/// Converts per-user `(server index, 1-based level)` picks to an [`Allocation`].
pub(crate) fn to_allocation<T: Scalar>(sc: &Scenario<T>, picks: &[Option<(usize, usize)>]) -> Allocation {
    Allocation::from_assignments(
        picks
            .iter()
            .map(|p| match p {
                None => Assignment::Unallocated,
                Some((j, level)) => Assignment::Assigned { server: sc.servers()[*j].id, level: *level },
            })
            .collect(),
    )
}
