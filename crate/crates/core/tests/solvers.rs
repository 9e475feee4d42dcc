mod common;

use common::{fits, fuzz_exact_config, residuals};
use edgealloc::data::synthetic::{random_fuzz, random_small};
use edgealloc::fixtures::{motivating_example, ten_user_topology};
use edgealloc::model::check_feasible;
use edgealloc::solvers::{solve_exact, solve_greedy, solve_oracle, SolverKind};
use edgealloc::{Assignment, ExactSolverConfig, ResourceVector};

#[test]
fn exact_matches_oracle_on_small_instances() {
    for seed in 0..300 {
        let sc = random_small(seed);
        let exact = solve_exact(&sc, &ExactSolverConfig::default()).unwrap();
        let oracle = solve_oracle(&sc).unwrap();
        assert!(exact.optimal, "seed {seed}");
        assert!((exact.total_qoe - oracle.total_qoe).abs() <= 1e-9, "seed {seed}: {} vs {}", exact.total_qoe, oracle.total_qoe);
    }
}

#[test]
fn every_solver_is_feasible_and_exact_dominates() {
    let cfg = fuzz_exact_config();
    for seed in 0..150 {
        let sc = random_fuzz(seed);
        let exact = SolverKind::Exact.solve(&sc, seed, &cfg).unwrap();
        for kind in [SolverKind::Exact, SolverKind::Greedy, SolverKind::Random, SolverKind::Vsvbp] {
            let r = kind.solve(&sc, seed, &cfg).unwrap();
            let verdict = check_feasible(&r.allocation, &sc).unwrap();
            assert!(verdict.is_feasible(), "seed {seed} {kind}: {:?}", verdict.violations);
            if exact.optimal {
                assert!(exact.total_qoe >= r.total_qoe - 1e-9, "seed {seed} {kind}");
            }
        }
    }
}

#[test]
fn greedy_levels_are_maximal() {
    for seed in 0..200 {
        let sc = random_fuzz(seed);
        let r = solve_greedy(&sc);
        let res = residuals(&sc, r.allocation.assignments());
        let cat = sc.catalog();
        for (i, a) in r.allocation.assignments().iter().enumerate() {
            match *a {
                Assignment::Assigned { server, level } if level < cat.len() => {
                    let j = sc.server_idx(server).unwrap();
                    let own = cat.level(level).unwrap().demand.components();
                    let room: Vec<f64> = res[j].iter().zip(own).map(|(r, d)| r + d).collect();
                    assert!(!fits(&room, cat.level(level + 1).unwrap().demand.components()), "seed {seed} user {i}");
                }
                Assignment::Unallocated => {
                    let lowest = cat.level(1).unwrap().demand.components();
                    assert!(sc.candidates(i).iter().all(|&j| !fits(&res[j], lowest)), "seed {seed} user {i}");
                }
                _ => {}
            }
        }
    }
}

#[test]
fn more_capacity_never_lowers_the_optimum() {
    for seed in 0..150 {
        let sc = random_small(seed);
        if sc.servers().is_empty() {
            continue;
        }
        let before = solve_exact(&sc, &ExactSolverConfig::default()).unwrap().total_qoe;
        let j = (seed as usize) % sc.servers().len();
        let bigger: Vec<f64> = sc.servers()[j].capacity.components().iter().map(|c| c + 2.0).collect();
        let grown = sc.with_capacity(j, ResourceVector::new(bigger).unwrap()).unwrap();
        let after = solve_exact(&grown, &ExactSolverConfig::default()).unwrap().total_qoe;
        assert!(after >= before - 1e-9, "seed {seed}: {after} < {before}");
    }
}

#[test]
fn user_order_does_not_change_the_optimum() {
    for seed in 0..100 {
        let sc = random_small(seed);
        let n = sc.users().len();
        let reversed: Vec<usize> = (0..n).rev().collect();
        let a = solve_exact(&sc, &ExactSolverConfig::default()).unwrap().total_qoe;
        let b = solve_exact(&sc.reordered(&reversed), &ExactSolverConfig::default()).unwrap().total_qoe;
        assert!((a - b).abs() <= 1e-9, "seed {seed}");
    }
}

#[test]
fn seeded_solvers_are_reproducible() {
    let sc = ten_user_topology();
    for kind in [SolverKind::Random, SolverKind::Vsvbp] {
        let a = kind.solve(&sc, 42, &ExactSolverConfig::default()).unwrap();
        let b = kind.solve(&sc, 42, &ExactSolverConfig::default()).unwrap();
        assert_eq!(a.allocation, b.allocation);
        assert_eq!(a.rng, Some("chacha8"));
        assert_eq!(a.seed, Some(42));
    }
}

#[test]
fn ten_user_topology_exact_beats_greedy_or_ties() {
    let sc = ten_user_topology();
    let exact = solve_exact(&sc, &ExactSolverConfig::default()).unwrap();
    let greedy = solve_greedy(&sc);
    assert!(exact.optimal);
    assert!(exact.total_qoe >= greedy.total_qoe);
    assert!(check_feasible(&exact.allocation, &sc).unwrap().is_feasible());
}

#[test]
fn oracle_enumeration_guard() {
    assert!(solve_oracle(&motivating_example()).is_ok());
    assert!(solve_oracle(&ten_user_topology()).is_err());
}
