use crate::error::HarnessError;
use crate::harness::{RunRecord, SweptParameter};
use crate::solvers::SolverKind;

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stddev = if values.len() < 2 { 0.0 } else { (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
        Some(Self { mean, stddev })
    }
}

/// Aggregate of one (sweep value, solver) cell. Statistics are `None` when
/// every run in the cell failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub sweep_param: SweptParameter,
    pub sweep_value: f64,
    pub solver: SolverKind,
    pub runs: usize,
    pub failed: usize,
    pub total_qoe: Option<Stat>,
    pub wall_time_ms: Option<Stat>,
    pub allocated: Option<Stat>,
    /// Every successful run was proven optimal.
    pub all_optimal: bool,
}

pub const SUMMARY_HEADER: &str =
    "experiment,sweep_param,sweep_value,solver,runs,failed,mean_total_qoe,std_total_qoe,mean_wall_time_ms,std_wall_time_ms,mean_allocated,all_optimal";

impl SummaryRow {
    pub fn all_failed(&self) -> bool {
        self.runs == 0
    }

    pub fn csv_row(&self) -> String {
        let pair = |s: Option<Stat>| s.map_or((String::new(), String::new()), |s| (s.mean.to_string(), s.stddev.to_string()));
        let (q_mean, q_std) = pair(self.total_qoe);
        let (t_mean, t_std) = pair(self.wall_time_ms);
        let alloc = self.allocated.map_or(String::new(), |s| s.mean.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment, self.sweep_param, self.sweep_value, self.solver, self.runs, self.failed, q_mean, q_std, t_mean, t_std, alloc, self.all_optimal
        )
    }
}

/// Per (experiment, sweep value, solver) means and sample standard
/// deviations over repetitions, in first-appearance order. Failed runs are
/// excluded and counted.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<SummaryRow>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let mut keys: Vec<(&str, u64, SolverKind)> = Vec::new();
    for r in records {
        let key = (r.experiment.as_str(), r.sweep_value.to_bits(), r.solver);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    Ok(keys
        .into_iter()
        .map(|(exp, bits, solver)| {
            let cell: Vec<&RunRecord> =
                records.iter().filter(|r| r.experiment == exp && r.sweep_value.to_bits() == bits && r.solver == solver).collect();
            let ok: Vec<_> = cell.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let qoe: Vec<f64> = ok.iter().map(|o| o.total_qoe).collect();
            let wall: Vec<f64> = ok.iter().map(|o| o.wall_time_ms).collect();
            let alloc: Vec<f64> = ok.iter().map(|o| o.allocated as f64).collect();
            SummaryRow {
                experiment: exp.to_string(),
                sweep_param: cell[0].sweep_param,
                sweep_value: f64::from_bits(bits),
                solver,
                runs: ok.len(),
                failed: cell.len() - ok.len(),
                total_qoe: Stat::of(&qoe),
                wall_time_ms: Stat::of(&wall),
                allocated: Stat::of(&alloc),
                all_optimal: !ok.is_empty() && ok.iter().all(|o| o.optimal),
            }
        })
        .collect())
}
