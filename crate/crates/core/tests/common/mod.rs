#![allow(dead_code)]

use edgealloc::solvers::ExactSolverConfig;
use edgealloc::{Assignment, Scenario};

/// Node-limited so fuzz runs are deterministic and bounded.
pub fn fuzz_exact_config() -> ExactSolverConfig {
    ExactSolverConfig { node_limit: 200_000, ..ExactSolverConfig::default() }
}

/// Remaining capacity per server after `assignments`, in scenario order.
pub fn residuals(sc: &Scenario, assignments: &[Assignment]) -> Vec<Vec<f64>> {
    let mut res: Vec<Vec<f64>> = sc.servers().iter().map(|s| s.capacity.components().to_vec()).collect();
    for a in assignments {
        if let Assignment::Assigned { server, level } = *a {
            let j = sc.server_idx(server).unwrap();
            let w = &sc.catalog().level(level).unwrap().demand;
            for (r, d) in res[j].iter_mut().zip(w.components()) {
                *r -= d;
            }
        }
    }
    res
}

pub fn fits(room: &[f64], demand: &[f64]) -> bool {
    room.iter().zip(demand).all(|(r, d)| d <= &(r + 1e-9))
}
