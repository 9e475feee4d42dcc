//! Experiment plans, execution and reporting.

mod aggregate;
mod output;
mod plan;
mod plot;
mod run;

pub use aggregate::{aggregate, Stat, SummaryRow, SUMMARY_HEADER};
pub use output::{emit_outputs, emit_summary, plots, records_csv, summary_csv, RecordsWriter};
pub use plan::{ExperimentPlan, FixedValues, SweptParameter};
pub use run::{cell_seed, run_experiment, run_experiment_with, Outcome, RunRecord, RECORDS_HEADER};
