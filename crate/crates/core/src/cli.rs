//! Command-line interface.
//!
//! Exit codes: 0 success, 1 infeasible allocation (`verify`), 2 usage,
//! parse or configuration error, 3 solver refused the instance (size guard).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{
    allocation_to_csv, generate_scenario, load_dataset, read_allocation, read_scenario, scenario_to_json, Dataset, DeskLayout,
    GenerationSpec,
};
use crate::error::{HarnessError, SolverError};
use crate::fixtures;
use crate::geometry::DistanceMetric;
use crate::harness::{aggregate, emit_summary, run_experiment_with, ExperimentPlan, RecordsWriter};
use crate::model::{check_rows, Scenario};
use crate::solvers::lp::{to_lp, LpOptions};
use crate::solvers::{ExactSolverConfig, SolverKind};

#[derive(Debug, Parser)]
#[command(name = "edgealloc", version, about = "Edge user allocation with dynamic QoS levels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario and write the allocation CSV.
    Allocate(AllocateArgs),
    /// Check an allocation CSV against a scenario.
    Verify(VerifyArgs),
    /// Run an experiment plan over a dataset.
    Experiment(ExperimentArgs),
    /// Write datasets, scenarios or fixtures.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Write the integer program in CPLEX LP format.
    ExportLp(ExportLpArgs),
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    #[arg(long, default_value = "exact")]
    pub solver: SolverKind,
    #[arg(long, env = "EDGEALLOC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Exact solver time limit in seconds (0 = none).
    #[arg(long, default_value_t = 0.0)]
    pub time_limit: f64,
    /// Recompute coverage with this metric instead of the file's.
    #[arg(long)]
    pub metric: Option<DistanceMetric>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub scenario: PathBuf,
    pub allocation: PathBuf,
    #[arg(long)]
    pub metric: Option<DistanceMetric>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Plan TOML file.
    pub plan: PathBuf,
    /// Directory holding `stations.csv` and `users.csv`.
    #[arg(long, default_value = "data")]
    pub dataset: PathBuf,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Overrides the plan's base seed.
    #[arg(long, env = "EDGEALLOC_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Overrides the plan's exact solver time limit (seconds).
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Write 0 for wall times so reruns are byte-identical.
    #[arg(long)]
    pub no_wall_time: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Synthetic stations/users CSVs.
    Dataset {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 125)]
        stations: usize,
        #[arg(long, default_value_t = 1000)]
        users: usize,
        #[arg(long, env = "EDGEALLOC_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// One scenario drawn from a dataset.
    Scenario {
        #[arg(long, default_value = "data")]
        dataset: PathBuf,
        #[arg(long)]
        n_users: usize,
        #[arg(long, default_value_t = 0.7)]
        server_fraction: f64,
        #[arg(long, default_value_t = 35.0)]
        capacity_mean: f64,
        #[arg(long, default_value_t = 1.0)]
        capacity_stddev: f64,
        #[arg(long, env = "EDGEALLOC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        metric: Option<DistanceMetric>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A built-in scenario.
    Fixture {
        name: Fixture,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Fixture {
    Motivating,
    TenUser,
}

#[derive(Debug, Args)]
pub struct ExportLpArgs {
    pub scenario: PathBuf,
    /// Omit variables for uncovered user/server pairs.
    #[arg(long)]
    pub compact: bool,
    #[arg(long)]
    pub metric: Option<DistanceMetric>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: 2, message: message.to_string() }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let code = match e {
            SolverError::TooManyVariables { .. } | SolverError::TooLargeForOracle { .. } => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Self::usage(e)
    }
}

/// Runs one command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Allocate(a) => allocate(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Experiment(a) => experiment(a, out),
        Command::Generate(g) => generate(g, out),
        Command::ExportLp(a) => {
            let sc = load_scenario(&a.scenario, a.metric)?;
            emit(a.out.as_deref(), &to_lp(&sc, LpOptions { compact: a.compact }), out)
        }
    }
}

fn load_scenario(path: &Path, metric: Option<DistanceMetric>) -> Result<Scenario<f64>, Failure> {
    let sc = read_scenario(path).map_err(Failure::usage)?;
    match metric {
        Some(m) if m != sc.metric() => Scenario::new(
            sc.users().to_vec(),
            sc.servers().to_vec(),
            sc.catalog().clone(),
            *sc.qoe_params(),
            m,
            sc.seed(),
        )
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        _ => Ok(sc),
    }
}

fn emit(path: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => out.write_all(body.as_bytes()).map_err(Failure::usage),
    }
}

fn allocate(a: AllocateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if !(a.time_limit >= 0.0 && a.time_limit.is_finite()) {
        return Err(Failure::usage("--time-limit must be a non-negative number of seconds"));
    }
    let sc = load_scenario(&a.scenario, a.metric)?;
    let cfg = ExactSolverConfig { time_limit: Duration::from_secs_f64(a.time_limit), ..ExactSolverConfig::default() };
    let report = a.solver.solve(&sc, a.seed, &cfg)?;
    let csv = allocation_to_csv(&report, &sc);
    emit(a.out.as_deref(), &csv, out)?;
    if a.out.is_some() {
        writeln!(
            out,
            "solver={} total_qoe={:.4} allocated={}/{} optimal={}",
            report.solver,
            report.total_qoe,
            report.allocated_count,
            sc.users().len(),
            report.optimal
        )
        .map_err(Failure::usage)?;
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let sc = load_scenario(&a.scenario, a.metric)?;
    let file = read_allocation(&a.allocation).map_err(Failure::usage)?;
    let verdict = check_rows(&file.rows, &sc).map_err(|e| Failure::usage(format!("{}: {e}", a.allocation.display())))?;
    for v in &verdict.violations {
        writeln!(out, "{v}").map_err(Failure::usage)?;
    }
    if verdict.is_feasible() {
        writeln!(out, "feasible").map_err(Failure::usage)?;
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("infeasible: {} violation(s)", verdict.violations.len()) })
    }
}

fn experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut plan = ExperimentPlan::load(&a.plan)?;
    if let Some(s) = a.seed {
        plan.base_seed = s;
    }
    if let Some(w) = a.workers {
        plan.workers = w;
    }
    if let Some(t) = a.time_limit {
        plan.exact_time_limit_s = t;
    }
    if let Some(r) = a.repetitions {
        plan.repetitions = r;
    }
    if a.no_wall_time {
        plan.record_wall_time = false;
    }
    plan.validate()?;
    let dataset = load_dataset(&a.dataset.join("stations.csv"), &a.dataset.join("users.csv")).map_err(Failure::usage)?;

    fs::create_dir_all(&a.out).map_err(|e| Failure::usage(format!("{}: {e}", a.out.display())))?;
    let mut writer = RecordsWriter::create(&a.out.join("records.csv"))?;
    let mut all = Vec::new();
    run_experiment_with(&plan, &dataset, |batch| {
        writer.append(batch)?;
        all.extend_from_slice(batch);
        Ok(())
    })?;
    let summary = aggregate(&all)?;
    emit_summary(&summary, &a.out)?;
    for row in &summary {
        let q = row.total_qoe.map_or("failed".to_string(), |s| format!("{:.3} ± {:.3}", s.mean, s.stddev));
        writeln!(out, "{}={} {:>6} qoe {}", row.sweep_param, row.sweep_value, row.solver, q).map_err(Failure::usage)?;
    }
    writeln!(out, "wrote {}", a.out.display()).map_err(Failure::usage)?;
    Ok(())
}

fn generate(g: GenerateCommand, out: &mut dyn Write) -> Result<(), Failure> {
    match g {
        GenerateCommand::Dataset { out: dir, stations, users, seed } => {
            if stations == 0 || users == 0 {
                return Err(Failure::usage("--stations and --users must be positive"));
            }
            fs::create_dir_all(&dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            let d = Dataset::synthetic(&DeskLayout { stations, users, ..DeskLayout::default() }, seed);
            d.write(&dir.join("stations.csv"), &dir.join("users.csv")).map_err(Failure::usage)
        }
        GenerateCommand::Scenario { dataset, n_users, server_fraction, capacity_mean, capacity_stddev, seed, metric, out: path } => {
            let d = load_dataset(&dataset.join("stations.csv"), &dataset.join("users.csv")).map_err(Failure::usage)?;
            let spec = GenerationSpec { capacity_stddev, ..GenerationSpec::standard(n_users, server_fraction, capacity_mean, seed) };
            let mut sc = generate_scenario(&d, &spec).map_err(Failure::usage)?;
            if let Some(m) = metric.filter(|&m| m != sc.metric()) {
                sc = Scenario::new(sc.users().to_vec(), sc.servers().to_vec(), sc.catalog().clone(), *sc.qoe_params(), m, seed)
                    .map_err(Failure::usage)?;
            }
            emit(path.as_deref(), &scenario_to_json(&sc), out)
        }
        GenerateCommand::Fixture { name, out: path } => {
            let sc = match name {
                Fixture::Motivating => fixtures::motivating_example(),
                Fixture::TenUser => fixtures::ten_user_topology(),
            };
            emit(path.as_deref(), &scenario_to_json(&sc), out)
        }
    }
}
