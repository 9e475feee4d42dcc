use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::HarnessError;
use crate::harness::aggregate::{SummaryRow, SUMMARY_HEADER};
use crate::harness::plot::{line_chart, Series};
use crate::harness::{RunRecord, RECORDS_HEADER};

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Appends records to a CSV file, flushing after every batch so a crashed
/// run keeps everything finished so far.
pub struct RecordsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl RecordsWriter {
    pub fn create(path: &Path) -> Result<Self, HarnessError> {
        let mut out = BufWriter::new(File::create(path).map_err(io(path))?);
        writeln!(out, "{RECORDS_HEADER}").and_then(|_| out.flush()).map_err(io(path))?;
        Ok(Self { path: path.to_path_buf(), out })
    }

    pub fn append(&mut self, records: &[RunRecord]) -> Result<(), HarnessError> {
        let path = &self.path;
        for r in records {
            writeln!(self.out, "{}", r.csv_row()).map_err(io(path))?;
        }
        self.out.flush().map_err(io(path))
    }
}

pub fn records_csv(records: &[RunRecord]) -> String {
    let mut s = format!("{RECORDS_HEADER}\n");
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for r in summary {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// One SVG per metric, one line per solver. Cells where every run failed
/// are left out of the line.
pub fn plots(summary: &[SummaryRow]) -> Vec<(String, String)> {
    let Some(first) = summary.first() else { return Vec::new() };
    let exp = &first.experiment;
    let mut solvers = Vec::new();
    for r in summary {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver);
        }
    }
    let metric = |title: &str, y: &str, pick: fn(&SummaryRow) -> Option<f64>| {
        let series: Vec<Series<'_>> = solvers
            .iter()
            .map(|&s| Series {
                name: s.name(),
                points: summary.iter().filter(|r| r.solver == s).filter_map(|r| pick(r).map(|v| (r.sweep_value, v))).collect(),
            })
            .collect();
        line_chart(&format!("{exp}: {title}"), &first.sweep_param.to_string(), y, &series)
    };
    vec![
        (format!("{exp}_total_qoe.svg"), metric("total QoE", "mean total QoE", |r| r.total_qoe.map(|s| s.mean))),
        (format!("{exp}_wall_time.svg"), metric("wall time", "mean wall time (ms)", |r| r.wall_time_ms.map(|s| s.mean))),
    ]
}

/// Writes `records.csv`, `summary.csv` and the plots into `out_dir`.
/// Nothing is written when there are no records.
pub fn emit_outputs(summary: &[SummaryRow], records: &[RunRecord], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if records.is_empty() || summary.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut files = vec![
        ("records.csv".to_string(), records_csv(records)),
        ("summary.csv".to_string(), summary_csv(summary)),
    ];
    files.extend(plots(summary));
    files
        .into_iter()
        .map(|(name, body)| {
            let p = out_dir.join(name);
            fs::write(&p, body).map_err(io(&p))?;
            Ok(p)
        })
        .collect()
}

/// Writes only the summary and plots, for when records were streamed with
/// [`RecordsWriter`].
pub fn emit_summary(summary: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if summary.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let mut files = vec![("summary.csv".to_string(), summary_csv(summary))];
    files.extend(plots(summary));
    files
        .into_iter()
        .map(|(name, body)| {
            let p = out_dir.join(name);
            fs::write(&p, body).map_err(io(&p))?;
            Ok(p)
        })
        .collect()
}
