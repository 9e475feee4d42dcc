use std::time::Instant;

use crate::error::SolverError;
use crate::model::{Scenario, SolverReport};
use crate::scalar::Scalar;
use crate::solvers::to_allocation;

/// Largest `(m*q + 1)^n` the oracle accepts.
pub const ORACLE_SPACE_LIMIT: f64 = 1e8;

/// Exhaustive enumeration of every per-user choice in
/// `{cloud} ∪ candidates × levels`.
///
/// Choices are enumerated in lexicographic order (cloud first, then by
/// server id, then level) and the incumbent is only replaced by a strictly
/// better total, so among optimal allocations the lexicographically
/// smallest is returned. A partial assignment that already overloads a
/// server is not extended, since no completion of it is feasible.
pub fn solve_oracle<T: Scalar>(sc: &Scenario<T>) -> Result<SolverReport<T>, SolverError> {
    let (n, m, q) = (sc.users().len(), sc.servers().len(), sc.catalog().len());
    let space = ((m * q + 1) as f64).powi(n as i32);
    if space > ORACLE_SPACE_LIMIT {
        return Err(SolverError::TooLargeForOracle { space, limit: ORACLE_SPACE_LIMIT });
    }
    let start = Instant::now();

    let dim = sc.dim();
    let mut choices: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut servers = sc.candidates(i).to_vec();
        servers.sort_by_key(|&j| sc.servers()[j].id);
        let mut c = vec![None];
        c.extend(servers.iter().flat_map(|&j| (1..=q).map(move |l| Some((j, l)))));
        choices.push(c);
    }

    let mut walk = Walk {
        sc,
        dim,
        choices: &choices,
        load: vec![T::zero(); m * dim],
        current: vec![None; n],
        best: vec![None; n],
        best_value: T::neg_infinity(),
        visited: 0,
    };
    walk.visit(0, T::zero());

    let mut report = SolverReport::new("oracle", to_allocation(sc, &walk.best), sc, start.elapsed())?;
    report.optimal = true;
    report.nodes_explored = walk.visited;
    report.upper_bound = Some(report.total_qoe);
    Ok(report)
}

struct Walk<'a, T> {
    sc: &'a Scenario<T>,
    dim: usize,
    choices: &'a [Vec<Option<(usize, usize)>>],
    load: Vec<T>,
    current: Vec<Option<(usize, usize)>>,
    best: Vec<Option<(usize, usize)>>,
    best_value: T,
    visited: u64,
}

impl<T: Scalar> Walk<'_, T> {
    fn visit(&mut self, i: usize, value: T) {
        self.visited += 1;
        if i == self.current.len() {
            if value > self.best_value + T::tolerance() {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return;
        }
        for c in 0..self.choices[i].len() {
            let choice = self.choices[i][c];
            let gained = match choice {
                None => T::zero(),
                Some((j, l)) => {
                    let level = &self.sc.catalog().levels()[l - 1];
                    let cap = self.sc.servers()[j].capacity.components();
                    let w = level.demand.components();
                    let base = j * self.dim;
                    let fits = (0..self.dim).all(|k| self.load[base + k] + w[k] <= cap[k] + T::tolerance());
                    if !fits {
                        continue;
                    }
                    for k in 0..self.dim {
                        self.load[base + k] = self.load[base + k] + w[k];
                    }
                    level.qoe
                }
            };
            self.current[i] = choice;
            self.visit(i + 1, value + gained);
            if let Some((j, l)) = choice {
                let w = self.sc.catalog().levels()[l - 1].demand.components();
                for k in 0..self.dim {
                    self.load[j * self.dim + k] = self.load[j * self.dim + k] - w[k];
                }
            }
        }
        self.current[i] = None;
    }
}
