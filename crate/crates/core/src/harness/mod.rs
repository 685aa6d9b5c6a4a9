//! Trials, logs, reports and dataset collection.

mod config;
mod dataset;
mod report;
mod trial;

pub use config::*;
pub use dataset::{collect_dataset, DatasetEntry, DiversityStats, Manifest, Split};
pub use report::{aggregate, format_pm, Report, ReportRow};
pub use trial::{
    check_record, classify_failure, run_trial, run_trial_observed, run_trial_with_id, trial_id, FailureClass, Outcome,
    StepRecord, TrialRecord,
};

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{InsertionReport, Variant};

/// One line of a trial log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Header { trial_id: String, tier: u8, variant: Variant, seed: u64 },
    Step(StepRecord),
    Insertion(InsertionReport),
    Outcome { outcome: Outcome, failure_class: FailureClass, anomaly: Option<String> },
}

pub fn log_lines(r: &TrialRecord) -> Vec<LogLine> {
    let mut v = vec![LogLine::Header {
        trial_id: r.trial_id.clone(),
        tier: r.tier,
        variant: r.variant,
        seed: r.seed,
    }];
    v.extend(r.steps.iter().cloned().map(LogLine::Step));
    v.extend(r.insertion.clone().map(LogLine::Insertion));
    v.push(LogLine::Outcome {
        outcome: r.outcome,
        failure_class: r.failure_class,
        anomaly: r.anomaly.clone(),
    });
    v
}

/// JSON lines, one object per line, newline-terminated.
pub fn log_text(r: &TrialRecord) -> String {
    log_lines(r)
        .iter()
        .map(|l| serde_json::to_string(l).expect("log lines serialise") + "\n")
        .collect()
}

/// Every complete, parseable line; the count of lines skipped.
pub fn parse_log(text: &str) -> (Vec<LogLine>, usize) {
    let mut skipped = 0;
    let lines = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| {
            let r = serde_json::from_str(l).ok();
            skipped += r.is_none() as usize;
            r
        })
        .collect();
    (lines, skipped)
}

/// Rebuilds a record; `None` when the header or outcome line is missing.
pub fn record_from_lines(lines: &[LogLine]) -> Option<TrialRecord> {
    let mut rec = None;
    let mut done = false;
    for l in lines {
        match (l, rec.as_mut()) {
            (LogLine::Header { trial_id, tier, variant, seed }, None) => {
                rec = Some(TrialRecord {
                    trial_id: trial_id.clone(),
                    tier: *tier,
                    variant: *variant,
                    seed: *seed,
                    steps: Vec::new(),
                    insertion: None,
                    outcome: Outcome::default(),
                    failure_class: FailureClass::None,
                    anomaly: None,
                })
            }
            (LogLine::Step(s), Some(r)) => r.steps.push(s.clone()),
            (LogLine::Insertion(i), Some(r)) => r.insertion = Some(i.clone()),
            (LogLine::Outcome { outcome, failure_class, anomaly }, Some(r)) => {
                r.outcome = *outcome;
                r.failure_class = *failure_class;
                r.anomaly = anomaly.clone();
                done = true;
            }
            _ => return None,
        }
    }
    rec.filter(|_| done)
}

pub fn write_log(r: &TrialRecord, path: &Path) -> Result<()> {
    std::fs::write(path, log_text(r)).map_err(|e| Error::io(path, e))
}

/// Runs `n` trials of one (tier, variant) cell on `cfg.trial.threads` workers.
/// Trial `i` uses seed `seed_base + i`; output is ordered by trial id.
pub fn run_cell(tier: u8, variant: Variant, n: usize, seed_base: u64, cfg: &RunConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let threads = match cfg.trial.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    }
    .clamp(1, n.max(1));
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::with_capacity(n));
    let first_err = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let id = trial_id(tier, variant, i);
                match run_trial_with_id(id, tier, variant, seed_base.wrapping_add(i as u64), cfg) {
                    Ok(r) => out.lock().unwrap().push(r),
                    Err(e) => {
                        first_err.lock().unwrap().get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });
    if let Some(e) = first_err.into_inner().unwrap() {
        return Err(e);
    }
    let mut v = out.into_inner().unwrap();
    v.sort_by(|a, b| a.trial_id.cmp(&b.trial_id));
    Ok(v)
}

/// Writes one log per trial plus `report.txt` and `report.csv`.
pub fn write_run(dir: &Path, records: &[TrialRecord]) -> Result<Report> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for r in records {
        write_log(r, &dir.join(format!("{}.jsonl", r.trial_id)))?;
    }
    let report = aggregate(records)?;
    for (name, body) in [("report.txt", report.to_text()), ("report.csv", report.to_csv())] {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
    }
    Ok(report)
}

/// Complete records from every `*.jsonl` in `dir`, sorted by trial id.
/// Logs without an outcome line are skipped.
pub fn read_run(dir: &Path) -> Result<Vec<TrialRecord>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        out.extend(record_from_lines(&parse_log(&text).0));
    }
    out.sort_by(|a, b| a.trial_id.cmp(&b.trial_id));
    Ok(out)
}

#[cfg(test)]
mod tests;
