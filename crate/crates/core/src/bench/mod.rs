//! Benchmark harness: the single-instance pipeline, the results CSV and the
//! per-cell summary table.

mod plot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::encoder::{encode_with, EncodeOptions};
use crate::generator::SuiteManifest;
use crate::model::{Instance, ModelError, Schedule};
use crate::smt::{self, SmtError, SolverConfig, SolverOutcome, Status};
use crate::validate::{decode, validate, DecodeError, ValidationReport};

pub use plot::{plot_dot, plot_svg};

/// Pipeline failure, tagged with the stage it happened in.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("load: {0}")]
    Load(#[from] ModelError),
    #[error("solve: {0}")]
    Solve(#[from] SmtError),
    #[error("decode: {0}")]
    Decode(#[from] DecodeError),
    #[error("validate: schedule violates {failed}")]
    Validate { failed: String, report: Box<ValidationReport> },
    #[error("results: {0}")]
    Results(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchStatus {
    Sat,
    Unsat,
    Timeout,
}

impl fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            BenchStatus::Sat => "sat",
            BenchStatus::Unsat => "unsat",
            BenchStatus::Timeout => "timeout",
        })
    }
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub cell: String,
    pub status: BenchStatus,
    /// Encoding time in seconds.
    pub gt_s: f64,
    /// Solver wall-clock time in seconds.
    pub st_s: f64,
    pub cost: Option<u64>,
    pub timeout: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub solver: SolverConfig,
    pub encode: EncodeOptions,
    /// Instances solved concurrently; each runs its own solver process.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            encode: EncodeOptions::default(),
            workers: 1,
        }
    }
}

/// Everything `solve_one` produces.
#[derive(Debug, Clone)]
pub struct SolveRun {
    pub record: BenchRecord,
    pub instance: Instance,
    pub outcome: SolverOutcome,
    /// Present iff the record is sat, in which case it passed validation.
    pub schedule: Option<Schedule>,
    pub report: Option<ValidationReport>,
}

/// Instance id used in records: the file stem.
pub fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs an already loaded instance through encode, solve, decode and
/// validate. A sat answer whose schedule fails validation is an error,
/// never a sat record.
pub fn solve_instance(
    instance: Instance,
    id: &str,
    cell: &str,
    config: &BenchConfig,
) -> Result<SolveRun, BenchError> {
    let started = Instant::now();
    let encoded = encode_with(&instance, config.encode);
    let generation_time = started.elapsed();
    let mut outcome = smt::solve(&encoded, &config.solver)?;
    outcome.generation_time = generation_time;

    let (status, schedule, report) = match outcome.status {
        Status::Sat => {
            let model = outcome.model.as_ref().ok_or_else(|| {
                BenchError::Solve(SmtError::Malformed("sat answer without a model".into()))
            })?;
            let schedule = decode(model, &encoded, &instance)?;
            let report = validate(&schedule, &instance);
            // without the capacity families the solver may legitimately
            // violate them, so they are not held against it
            let failed: Vec<_> = report
                .failed()
                .into_iter()
                .filter(|f| config.encode.capacity || !matches!(f, crate::encoder::Family::Rule(19 | 20)))
                .collect();
            if !failed.is_empty() {
                let failed = failed.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ");
                return Err(BenchError::Validate {
                    failed,
                    report: Box::new(report),
                });
            }
            (BenchStatus::Sat, Some(schedule), Some(report))
        }
        Status::Unsat => (BenchStatus::Unsat, None, None),
        Status::Unknown => (BenchStatus::Timeout, None, None),
    };
    let record = BenchRecord {
        instance: id.to_string(),
        cell: cell.to_string(),
        status,
        gt_s: generation_time.as_secs_f64(),
        st_s: outcome.solve_time.as_secs_f64(),
        cost: schedule.as_ref().map(|s| s.total_cost),
        timeout: status == BenchStatus::Timeout || outcome.timed_out,
    };
    Ok(SolveRun {
        record,
        instance,
        outcome,
        schedule,
        report,
    })
}

/// Loads `path` and runs [`solve_instance`] on it.
pub fn solve_one(path: &Path, cell: &str, config: &BenchConfig) -> Result<SolveRun, BenchError> {
    let instance = Instance::load(path)?;
    solve_instance(instance, &instance_id(path), cell, config)
}

/// Reads a results CSV; a missing file yields no records.
pub fn read_records(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| BenchError::Results(e.to_string()))?;
    reader
        .deserialize()
        .collect::<Result<Vec<BenchRecord>, _>>()
        .map_err(|e| BenchError::Results(format!("{}: {e}", path.display())))
}

pub fn write_records(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct BenchRun {
    /// All records in manifest order, including ones found in the CSV.
    pub records: Vec<BenchRecord>,
    /// Instances whose pipeline failed, with the error text.
    pub failures: Vec<(String, String)>,
    pub skipped: usize,
}

/// Solves every manifest instance that has no record in `results` yet and
/// appends the new records to it as they complete, so an interrupted run
/// resumes where it stopped.
pub fn bench(manifest: &SuiteManifest, base: &Path, results: &Path, config: &BenchConfig) -> Result<BenchRun, BenchError> {
    let existing = read_records(results)?;
    let done: BTreeSet<&str> = existing.iter().map(|r| r.instance.as_str()).collect();
    let todo: Vec<_> = manifest.instances.iter().filter(|e| !done.contains(e.id.as_str())).collect();
    let skipped = manifest.instances.len() - todo.len();

    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(results)
        .map_err(|e| BenchError::Results(format!("{}: {e}", results.display())))?;
    let writer = Mutex::new(
        csv::WriterBuilder::new()
            .has_headers(existing.is_empty() && std::fs::metadata(results).map_or(true, |m| m.len() == 0))
            .from_writer(file),
    );

    let outcomes = crate::par::map_workers(&todo, config.workers, |entry| {
        let path: PathBuf = base.join(&entry.path);
        let run = solve_one(&path, &entry.cell, config).map(|mut run| {
            run.record.instance = entry.id.clone();
            run.record
        });
        if let Ok(record) = &run {
            let mut w = writer.lock().expect("results writer");
            // a failed append only loses resumability, the record is kept
            let _ = w.serialize(record).and_then(|_| w.flush().map_err(Into::into));
        }
        (entry.id.clone(), run)
    });

    let mut fresh: BTreeMap<String, BenchRecord> = BTreeMap::new();
    let mut failures = Vec::new();
    for (id, run) in outcomes {
        match run {
            Ok(r) => {
                fresh.insert(id, r);
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    let mut by_id: BTreeMap<String, BenchRecord> = existing.into_iter().map(|r| (r.instance.clone(), r)).collect();
    by_id.append(&mut fresh);
    let records = manifest
        .instances
        .iter()
        .filter_map(|e| by_id.get(&e.id).cloned())
        .collect();
    Ok(BenchRun {
        records,
        failures,
        skipped,
    })
}

/// Per-cell aggregate mirroring the columns of the published results table.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: String,
    pub total: usize,
    pub sat: usize,
    pub unsat: usize,
    pub mean_gt: f64,
    pub mean_st_sat: Option<f64>,
    pub mean_st_unsat: Option<f64>,
}

impl CellSummary {
    pub fn solved(&self) -> usize {
        self.sat + self.unsat
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = xs.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Pure function of the records; cells appear in first-seen order.
pub fn summarize(records: &[BenchRecord]) -> Vec<CellSummary> {
    let mut order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        let slot = cells.entry(&r.cell).or_default();
        if slot.is_empty() {
            order.push(&r.cell);
        }
        slot.push(r);
    }
    order
        .into_iter()
        .map(|cell| {
            let rs = &cells[cell];
            let st = |s: BenchStatus| mean(rs.iter().filter(|r| r.status == s).map(|r| r.st_s));
            CellSummary {
                cell: cell.to_string(),
                total: rs.len(),
                sat: rs.iter().filter(|r| r.status == BenchStatus::Sat).count(),
                unsat: rs.iter().filter(|r| r.status == BenchStatus::Unsat).count(),
                mean_gt: mean(rs.iter().map(|r| r.gt_s)).unwrap_or(0.0),
                mean_st_sat: st(BenchStatus::Sat),
                mean_st_unsat: st(BenchStatus::Unsat),
            }
        })
        .collect()
}

/// Text table: Sol, GT, ST split by sat/unsat, SC. Missing means render
/// as `-`. An empty record set gives an empty string.
pub fn render_table(summary: &[CellSummary]) -> String {
    if summary.is_empty() {
        return String::new();
    }
    let secs = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let width = summary.iter().map(|c| c.cell.len()).max().unwrap_or(0).max(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>8}  {:>9}  {:>9}  {:>7}",
        "cell", "Sol", "GT[s]", "ST sat", "ST unsat", "SC"
    );
    for c in summary {
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>8.2}  {:>9}  {:>9}  {:>7}",
            c.cell,
            format!("{}/{}", c.solved(), c.total),
            c.mean_gt,
            secs(c.mean_st_sat),
            secs(c.mean_st_unsat),
            format!("{}/{}", c.sat, c.unsat),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(cell: &str, status: BenchStatus, st: f64) -> BenchRecord {
        BenchRecord {
            instance: format!("{cell}-{st}"),
            cell: cell.into(),
            status,
            gt_s: 0.5,
            st_s: st,
            cost: (status == BenchStatus::Sat).then_some(4),
            timeout: status == BenchStatus::Timeout,
        }
    }

    #[test]
    fn all_unsat_cell_has_no_sat_time() {
        let rs: Vec<_> = (0..5).map(|i| rec("c", BenchStatus::Unsat, f64::from(i))).collect();
        let s = summarize(&rs);
        assert_eq!(s[0].mean_st_sat, None);
        assert_eq!(s[0].mean_st_unsat, Some(2.0));
        let table = render_table(&s);
        let row = table.lines().nth(1).unwrap();
        assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["c", "5/5", "0.50", "-", "2.00", "0/5"]);
    }

    #[test]
    fn timeouts_count_as_unsolved() {
        let rs = vec![rec("c", BenchStatus::Sat, 1.0), rec("c", BenchStatus::Timeout, 9.0)];
        let s = &summarize(&rs)[0];
        assert_eq!((s.solved(), s.total), (1, 2));
        assert_eq!(s.mean_st_unsat, None);
    }

    #[test]
    fn empty_records_give_empty_table() {
        assert_eq!(render_table(&summarize(&[])), "");
    }

    #[test]
    fn csv_header_and_round_trip() {
        let rs = vec![rec("15-3-5/r0/d15", BenchStatus::Sat, 1.25), rec("x", BenchStatus::Unsat, 2.0)];
        let text = write_records(&rs);
        assert_eq!(text.lines().next().unwrap(), "instance,cell,status,gt_s,st_s,cost,timeout");
        assert_eq!(text.lines().nth(2).unwrap(), "x-2,x,unsat,0.5,2.0,,false");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        std::fs::write(&p, text).unwrap();
        assert_eq!(read_records(&p).unwrap(), rs);
    }
}
