//! Allocation CSV: `user_id,server_id,level`, with `cloud,0` for users left
//! to the cloud. Lines starting with `#` carry solver report fields.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::io_err;
use crate::error::DataError;
use crate::model::{Assignment, Scenario, ServerId, SolverReport, UserId};

pub const ALLOCATION_HEADER: &str = "user_id,server_id,level";

/// Parsed allocation rows in file order (duplicates preserved).
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationFile {
    pub rows: Vec<(UserId, Assignment)>,
}

pub fn allocation_to_csv(report: &SolverReport<f64>, sc: &Scenario<f64>) -> String {
    let mut out = String::new();
    writeln!(out, "# solver={}", report.solver).unwrap();
    writeln!(out, "# total_qoe={}", report.total_qoe).unwrap();
    writeln!(out, "# allocated={}", report.allocated_count).unwrap();
    writeln!(out, "# optimal={}", report.optimal).unwrap();
    writeln!(out, "# nodes_explored={}", report.nodes_explored).unwrap();
    writeln!(out, "# wall_time_ms={:.3}", report.wall_time.as_secs_f64() * 1e3).unwrap();
    if let Some(b) = report.upper_bound {
        writeln!(out, "# upper_bound={b}").unwrap();
    }
    if let (Some(rng), Some(seed)) = (report.rng, report.seed) {
        writeln!(out, "# rng={rng} seed={seed}").unwrap();
    }
    writeln!(out, "{ALLOCATION_HEADER}").unwrap();
    for (u, a) in sc.users().iter().zip(report.allocation.assignments()) {
        match a {
            Assignment::Unallocated => writeln!(out, "{},cloud,0", u.id).unwrap(),
            Assignment::Assigned { server, level } => writeln!(out, "{},{},{}", u.id, server, level).unwrap(),
        }
    }
    out
}

pub fn write_allocation(path: &Path, report: &SolverReport<f64>, sc: &Scenario<f64>) -> Result<(), DataError> {
    fs::write(path, allocation_to_csv(report, sc)).map_err(io_err(path))
}

pub fn read_allocation(path: &Path) -> Result<AllocationFile, DataError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_allocation(&text).map_err(|(line, message)| DataError::Row { path: path.into(), line, message })
}

fn parse_allocation(text: &str) -> Result<AllocationFile, (u64, String)> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| (0, e.to_string()))?.iter().collect::<Vec<_>>().join(",");
    if header != ALLOCATION_HEADER {
        return Err((1, format!("expected header '{ALLOCATION_HEADER}', found '{header}'")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| (e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(k).unwrap_or("");
        let user: u32 = field(0).parse().map_err(|_| (line, format!("bad user id '{}'", field(0))))?;
        let level: usize = field(2).parse().map_err(|_| (line, format!("bad level '{}'", field(2))))?;
        let assignment = if field(1) == "cloud" {
            if level != 0 {
                return Err((line, format!("cloud rows must have level 0, got {level}")));
            }
            Assignment::Unallocated
        } else {
            let server: u32 = field(1).parse().map_err(|_| (line, format!("bad server id '{}'", field(1))))?;
            Assignment::Assigned { server: ServerId(server), level }
        };
        rows.push((UserId(user), assignment));
    }
    Ok(AllocationFile { rows })
}
