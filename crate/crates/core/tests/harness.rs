use edgealloc::data::{Dataset, DeskLayout};
use edgealloc::harness::{aggregate, run_experiment, run_experiment_with, ExperimentPlan, SweptParameter};
use edgealloc::solvers::SolverKind;

fn dataset() -> Dataset {
    Dataset::synthetic(&DeskLayout { stations: 60, users: 300, ..DeskLayout::default() }, 8)
}

fn plan(set: u8) -> ExperimentPlan {
    let mut p = ExperimentPlan::desk_set(set, 2, 5).unwrap();
    p.sweep_values.truncate(3);
    p.record_wall_time = false;
    p.exact_time_limit_s = 0.0;
    p.exact_node_limit = 100_000;
    p
}

#[test]
fn record_and_summary_counts() {
    let d = dataset();
    for set in 1..=3 {
        let p = plan(set);
        let recs = run_experiment(&p, &d).unwrap();
        assert_eq!(recs.len(), 3 * 2 * 4);
        let summary = aggregate(&recs).unwrap();
        assert_eq!(summary.len(), 3 * 4);
        assert!(summary.iter().all(|r| r.runs + r.failed == 2));
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let d = dataset();
    let mut p = plan(2);
    p.workers = 1;
    let one = run_experiment(&p, &d).unwrap();
    p.workers = 3;
    assert_eq!(one, run_experiment(&p, &d).unwrap());
}

#[test]
fn sink_sees_one_batch_per_sweep_value_in_order() {
    let d = dataset();
    let p = plan(3);
    let mut seen = Vec::new();
    run_experiment_with(&p, &d, |batch| {
        seen.push((batch[0].sweep_value, batch.len()));
        assert!(batch.iter().all(|r| r.sweep_value == batch[0].sweep_value));
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, vec![(5.0, 8), (10.0, 8), (15.0, 8)]);
}

#[test]
fn solvers_share_each_drawn_scenario() {
    let recs = run_experiment(&plan(1), &dataset()).unwrap();
    for cell in recs.chunks(4) {
        assert!(cell.iter().all(|r| r.scenario_digest == cell[0].scenario_digest && r.seed == cell[0].seed));
        let names: Vec<_> = cell.iter().map(|r| r.solver).collect();
        assert_eq!(names, [SolverKind::Exact, SolverKind::Greedy, SolverKind::Random, SolverKind::Vsvbp]);
    }
    assert_ne!(recs[0].scenario_digest, recs[4].scenario_digest);
}

#[test]
fn exact_is_never_worse_when_optimal() {
    let recs = run_experiment(&plan(3), &dataset()).unwrap();
    for cell in recs.chunks(4) {
        let exact = cell[0].outcome.as_ref().unwrap();
        if exact.optimal {
            for r in &cell[1..] {
                assert!(exact.total_qoe >= r.outcome.as_ref().unwrap().total_qoe - 1e-9);
            }
        }
    }
}

#[test]
fn plans_round_trip_through_toml() {
    let p = plan(2);
    let back = ExperimentPlan::from_toml(&p.to_toml()).unwrap();
    assert_eq!(back, p);
    assert_eq!(back.swept_parameter, SweptParameter::ServerFraction);
}
