use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{generate_scenario, scenario_digest, Dataset};
use crate::error::HarnessError;
use crate::harness::{ExperimentPlan, SweptParameter};
use crate::model::Scenario;
use crate::solvers::SolverKind;

/// Measurements of one successful solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub total_qoe: f64,
    pub allocated: usize,
    pub wall_time_ms: f64,
    pub optimal: bool,
}

/// One solver on one drawn scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub experiment: String,
    pub sweep_param: SweptParameter,
    pub sweep_value: f64,
    pub rep: usize,
    pub solver: SolverKind,
    /// `Err` holds the failure message.
    pub outcome: Result<Outcome, String>,
    pub seed: u64,
    pub scenario_digest: String,
}

pub const RECORDS_HEADER: &str = "experiment,sweep_param,sweep_value,rep,solver,total_qoe,allocated,wall_time_ms,optimal,seed,scenario_digest";

impl RunRecord {
    /// CSV row matching [`RECORDS_HEADER`]; failed runs leave the measurement
    /// fields empty.
    pub fn csv_row(&self) -> String {
        let (qoe, alloc, wall, opt) = match &self.outcome {
            Ok(o) => (o.total_qoe.to_string(), o.allocated.to_string(), format!("{:.3}", o.wall_time_ms), o.optimal.to_string()),
            Err(_) => (String::new(), String::new(), String::new(), "false".to_string()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment, self.sweep_param, self.sweep_value, self.rep, self.solver, qoe, alloc, wall, opt, self.seed, self.scenario_digest
        )
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the scenario drawn for `(sweep value, repetition)`.
pub fn cell_seed(base: u64, sweep_value: f64, rep: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ sweep_value.to_bits()) ^ rep as u64)
}

/// Runs every (sweep value, repetition) cell; see [`run_experiment_with`].
pub fn run_experiment(plan: &ExperimentPlan, dataset: &Dataset) -> Result<Vec<RunRecord>, HarnessError> {
    let mut all = Vec::new();
    run_experiment_with(plan, dataset, |batch| {
        all.extend_from_slice(batch);
        Ok(())
    })?;
    Ok(all)
}

/// Runs the plan and hands each finished sweep point's records to `sink`,
/// in sweep order, repetition order, then plan solver order.
///
/// Every cell draws one scenario, shuffles its user order with the cell
/// seed, and gives that identical instance to every selected solver.
/// Repetitions of a sweep point run in parallel; the output does not depend
/// on scheduling.
pub fn run_experiment_with<F>(plan: &ExperimentPlan, dataset: &Dataset, mut sink: F) -> Result<(), HarnessError>
where
    F: FnMut(&[RunRecord]) -> Result<(), HarnessError>,
{
    plan.validate()?;
    if dataset.end_users.len() < plan.max_users() {
        return Err(HarnessError::InvalidPlan(format!(
            "dataset has {} users, plan needs {}",
            dataset.end_users.len(),
            plan.max_users()
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| HarnessError::InvalidPlan(format!("worker pool: {e}")))?;

    for &value in &plan.sweep_values {
        let batch: Vec<RunRecord> = pool.install(|| {
            (0..plan.repetitions).into_par_iter().flat_map_iter(|rep| run_cell(plan, dataset, value, rep)).collect()
        });
        sink(&batch)?;
    }
    Ok(())
}

fn shuffled(sc: &Scenario<f64>, seed: u64) -> Scenario<f64> {
    let mut order: Vec<usize> = (0..sc.users().len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(splitmix64(seed)));
    sc.reordered(&order)
}

fn run_cell(plan: &ExperimentPlan, dataset: &Dataset, value: f64, rep: usize) -> Vec<RunRecord> {
    let seed = cell_seed(plan.base_seed, value, rep);
    let mut spec = plan.spec_at(value);
    spec.seed = seed;
    let drawn = generate_scenario(dataset, &spec).map(|sc| shuffled(&sc, seed));
    let digest = drawn.as_ref().map(scenario_digest).unwrap_or_default();
    let exact = plan.exact_config();

    plan.solvers
        .iter()
        .map(|&solver| {
            let outcome = match &drawn {
                Err(e) => Err(format!("scenario generation failed: {e}")),
                Ok(sc) => solver.solve(sc, seed, &exact).map_err(|e| e.to_string()).map(|r| Outcome {
                    total_qoe: r.total_qoe,
                    allocated: r.allocated_count,
                    wall_time_ms: if plan.record_wall_time { r.wall_time.as_secs_f64() * 1e3 } else { 0.0 },
                    optimal: r.optimal,
                }),
            };
            RunRecord {
                experiment: plan.name.clone(),
                sweep_param: plan.swept_parameter,
                sweep_value: value,
                rep,
                solver,
                outcome,
                seed,
                scenario_digest: digest.clone(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DeskLayout;

    fn small_plan() -> ExperimentPlan {
        let mut p = ExperimentPlan::desk_set(1, 1, 7).unwrap();
        p.sweep_values = vec![20.0];
        p.workers = 2;
        p
    }

    #[test]
    fn one_cell_four_solvers_four_records() {
        let d = Dataset::synthetic(&DeskLayout { stations: 30, users: 100, ..DeskLayout::default() }, 1);
        let recs = run_experiment(&small_plan(), &d).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.scenario_digest == recs[0].scenario_digest && r.outcome.is_ok()));
        let names: Vec<_> = recs.iter().map(|r| r.solver.name()).collect();
        assert_eq!(names, ["exact", "greedy", "random", "vsvbp"]);
    }

    #[test]
    fn solver_failures_are_recorded_not_raised() {
        let d = Dataset::synthetic(&DeskLayout { stations: 30, users: 100, ..DeskLayout::default() }, 1);
        let mut p = small_plan();
        p.solvers = vec![SolverKind::Oracle, SolverKind::Greedy];
        let recs = run_experiment(&p, &d).unwrap();
        assert!(recs[0].outcome.as_ref().unwrap_err().contains("oracle"));
        assert!(recs[1].outcome.is_ok());
        assert!(recs[0].csv_row().contains(",oracle,,,,false,"));
    }

    #[test]
    fn insufficient_dataset_is_a_plan_error() {
        let d = Dataset::synthetic(&DeskLayout { stations: 5, users: 10, ..DeskLayout::default() }, 1);
        assert!(run_experiment(&small_plan(), &d).is_err());
    }

    #[test]
    fn cell_seeds_differ() {
        let a = cell_seed(1, 20.0, 0);
        assert_ne!(a, cell_seed(1, 20.0, 1));
        assert_ne!(a, cell_seed(1, 40.0, 0));
        assert_ne!(a, cell_seed(2, 20.0, 0));
        assert_eq!(a, cell_seed(1, 20.0, 0));
    }
}
