//! Acceptance checks, one line per criterion. Run with `cargo test --test acceptance`.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::fuzz_exact_config;
use edgealloc::data::synthetic::{random_fuzz, random_planar, random_small, PlanarSpec};
use edgealloc::data::{allocation_to_csv, load_dataset, read_allocation, Dataset};
use edgealloc::fixtures::motivating_example;
use edgealloc::harness::{aggregate, run_experiment, ExperimentPlan, RecordsWriter, SummaryRow};
use edgealloc::model::check_rows;
use edgealloc::solvers::{solve_exact, solve_greedy, solve_oracle, SolverKind};
use edgealloc::{Assignment, ExactSolverConfig, QoeParams, QosCatalog, ServerId};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn qoe_model() -> Check {
    let cat = QosCatalog::standard();
    let got: Vec<f64> = cat.levels().iter().map(|l| l.qoe).collect();
    let want = [1.60, 4.09, 4.99];
    let p = QoeParams::standard();
    let ok = (p.max, p.growth, p.midpoint) == (5.0, 1.5, 2.0) && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 0.01);
    ensure(ok, format!("W1..W3 -> {:.2} / {:.2} / {:.2}", got[0], got[1], got[2]))
}

fn motivating() -> Check {
    let sc = motivating_example();
    let exact = solve_exact(&sc, &ExactSolverConfig::default()).map_err(|e| e.to_string())?;
    let greedy = solve_greedy(&sc);
    let w2 = Assignment::Assigned { server: ServerId(4), level: 2 };
    let both_w2 = exact.allocation.assignments().iter().all(|a| *a == w2);
    let ok = (exact.total_qoe - 8.18).abs() <= 0.01 && both_w2 && (greedy.total_qoe - 6.59).abs() <= 0.01;
    ensure(ok, format!("exact {:.2} (both W2: {both_w2}), greedy {:.2}", exact.total_qoe, greedy.total_qoe))
}

fn oracle_equivalence() -> Check {
    let n = 250;
    for seed in 0..n {
        let sc = random_small(seed);
        let exact = solve_exact(&sc, &ExactSolverConfig::default()).map_err(|e| e.to_string())?;
        let oracle = solve_oracle(&sc).map_err(|e| e.to_string())?;
        if (exact.total_qoe - oracle.total_qoe).abs() > 1e-9 {
            return Err(format!("seed {seed}: exact {} vs oracle {}", exact.total_qoe, oracle.total_qoe));
        }
    }
    Ok(format!("{n} instances, exact == oracle within 1e-9"))
}

/// Criteria 4 and 5 share the fuzz corpus.
fn fuzz(dir: &Path) -> (Check, Check) {
    let n = 1000;
    let cfg = fuzz_exact_config();
    let file = dir.join("alloc.csv");
    let (mut optimal, mut dominated) = (0, None);
    for seed in 0..n {
        let sc = random_fuzz(seed);
        let mut totals = Vec::new();
        for kind in [SolverKind::Exact, SolverKind::Greedy, SolverKind::Random, SolverKind::Vsvbp] {
            let r = match kind.solve(&sc, seed, &cfg) {
                Ok(r) => r,
                Err(e) => return (Err(format!("seed {seed} {kind}: {e}")), Err("not run".into())),
            };
            std::fs::write(&file, allocation_to_csv(&r, &sc)).unwrap();
            let rows = read_allocation(&file).map(|f| f.rows);
            match rows.map_err(|e| e.to_string()).and_then(|rows| check_rows(&rows, &sc).map_err(|e| e.to_string())) {
                Ok(v) if v.is_feasible() => {}
                Ok(v) => return (Err(format!("seed {seed} {kind}: {}", v.violations[0])), Err("not run".into())),
                Err(e) => return (Err(format!("seed {seed} {kind}: {e}")), Err("not run".into())),
            }
            totals.push((kind, r.total_qoe, r.optimal));
        }
        if totals[0].2 {
            optimal += 1;
            if let Some(&(k, q, _)) = totals[1..].iter().find(|t| t.1 > totals[0].1 + 1e-9) {
                dominated.get_or_insert(format!("seed {seed}: {k} {q} > exact {}", totals[0].1));
            }
        }
    }
    let feas = Ok(format!("{n} scenarios x 4 solvers pass verify"));
    let dom = match dominated {
        None => Ok(format!("exact >= greedy, random, vsvbp on all {optimal} instances solved to optimality")),
        Some(msg) => Err(msg),
    };
    (feas, dom)
}

fn mean_qoe(summary: &[SummaryRow], value: f64, solver: SolverKind) -> Option<f64> {
    summary.iter().find(|r| r.sweep_value == value && r.solver == solver)?.total_qoe.map(|s| s.mean)
}

fn trends(dataset: &Dataset) -> Check {
    let plan = ExperimentPlan::desk_set(1, 20, 2019).unwrap();
    let summary = aggregate(&run_experiment(&plan, dataset).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [20.0, 40.0] {
        let (Some(e), Some(g)) = (mean_qoe(&summary, n, SolverKind::Exact), mean_qoe(&summary, n, SolverKind::Greedy)) else {
            return Err(format!("n={n}: missing results"));
        };
        ok &= g >= 0.95 * e;
        detail.push(format!("n={n}: greedy/exact {:.3}", g / e));
    }

    // Scarce regime: a trend report, not a gate.
    let mut scarce = ExperimentPlan::desk_set(1, 20, 2019).unwrap();
    scarce.name = "set1_scarce".into();
    scarce.sweep_values = vec![200.0];
    scarce.fixed.capacity_mean = 10.0;
    scarce.solvers = vec![SolverKind::Greedy, SolverKind::Random];
    let s = aggregate(&run_experiment(&scarce, dataset).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let (g, r) = (mean_qoe(&s, 200.0, SolverKind::Greedy).unwrap_or(0.0), mean_qoe(&s, 200.0, SolverKind::Random).unwrap_or(0.0));
    let trend = if g <= 1.05 * r { "greedy within 5% of random" } else { "no crossover: greedy ahead of random" };
    detail.push(format!("n=200 mu=10: greedy {g:.1} vs random {r:.1} [trend: {trend}]"));
    ensure(ok, detail.join("; "))
}

fn min_greedy_time(n: usize) -> Duration {
    let sc = random_planar(&PlanarSpec { n_users: n, n_servers: 60, side: 40.0, radius: (3.0, 6.0), capacity: (20, 60) }, 77);
    (0..9)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(solve_greedy(&sc));
            t.elapsed()
        })
        .min()
        .unwrap()
}

fn greedy_scaling() -> Check {
    let small = min_greedy_time(500);
    let large = min_greedy_time(2000);
    let ratio = large.as_secs_f64() / small.as_secs_f64().max(1e-9);
    ensure(ratio < 8.0, format!("n=500 {small:?}, n=2000 {large:?}, ratio {ratio:.2}"))
}

fn determinism(dataset: &Dataset, dir: &Path) -> Check {
    let mut plan = ExperimentPlan::desk_set(1, 5, 7).unwrap();
    plan.record_wall_time = false;
    plan.exact_time_limit_s = 0.0;
    plan.exact_node_limit = 2_000_000;
    let mut files = Vec::new();
    for (k, workers) in [(0, 1), (1, 0)] {
        plan.workers = workers;
        let path = dir.join(format!("records_{k}.csv"));
        let mut w = RecordsWriter::create(&path).map_err(|e| e.to_string())?;
        w.append(&run_experiment(&plan, dataset).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        drop(w);
        files.push(std::fs::read(&path).unwrap());
    }
    ensure(files[0] == files[1], format!("two runs, {} bytes each, identical: {}", files[0].len(), files[0] == files[1]))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let dataset = load_dataset(&data.join("stations.csv"), &data.join("users.csv")).expect("bundled dataset");

    let (feas, dom) = fuzz(dir.path());
    let results: Vec<(&str, Check)> = vec![
        ("1 QoE model fidelity", qoe_model()),
        ("2 motivating example", motivating()),
        ("3 oracle equivalence", oracle_equivalence()),
        ("4 feasibility fuzzing", feas),
        ("5 dominance", dom),
        ("6 trend reproduction", trends(&dataset)),
        ("7 greedy scaling", greedy_scaling()),
        ("8 determinism", determinism(&dataset, dir.path())),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("criterion {name}: PASS ({d})"),
            Err(d) => {
                failed += 1;
                println!("criterion {name}: FAIL ({d})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
