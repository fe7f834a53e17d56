use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::OutputFormat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One grid cell of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub experiment: String,
    pub spec: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isogeny: Option<String>,
    pub q: u64,
    pub n: usize,
    pub k: Option<usize>,
    /// Decimal string, since closed-form orders can exceed 64 bits.
    pub order: Option<String>,
    pub count: Option<u64>,
    pub flags: BTreeMap<String, Value>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CellRecord {
    pub fn new(experiment: &str, spec: &str, q: u64, n: usize) -> Self {
        CellRecord {
            experiment: experiment.to_string(),
            spec: spec.to_string(),
            isogeny: None,
            q,
            n,
            k: None,
            order: None,
            count: None,
            flags: BTreeMap::new(),
            status: Status::Pass,
            note: None,
        }
    }

    pub fn flag(&mut self, key: &str, value: impl Serialize) {
        self.flags.insert(key.to_string(), serde_json::to_value(value).expect("flag serializes"));
    }

    pub fn get_flag(&self, key: &str) -> Option<&Value> {
        self.flags.get(key)
    }

    /// Marks the cell failed unless `ok`, keeping the first failure note.
    pub fn check(&mut self, ok: bool, what: &str) {
        if !ok && self.status != Status::Skipped {
            self.status = Status::Fail;
            if self.note.is_none() {
                self.note = Some(format!("assertion failed: {what}"));
            }
        }
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.status = Status::Fail;
        self.note = Some(note.into());
    }

    pub fn skip(&mut self, note: impl Into<String>) {
        self.status = Status::Skipped;
        self.note = Some(note.into());
    }

    fn sort_key(&self) -> (&str, &str, u64, usize, Option<usize>) {
        (&self.experiment, &self.spec, self.q, self.n, self.k)
    }
}

/// Orders records by `(experiment, spec, q, n, k)`; ties keep grid order.
pub fn ordered_merge(mut records: Vec<CellRecord>) -> Vec<CellRecord> {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    records
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub cells: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub status: Status,
}

impl ExperimentSummary {
    pub fn of(experiment: &str, records: &[CellRecord]) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        let failed = count(Status::Fail);
        ExperimentSummary {
            experiment: experiment.to_string(),
            cells: records.len(),
            passed: count(Status::Pass),
            failed,
            skipped: count(Status::Skipped),
            status: if failed == 0 { Status::Pass } else { Status::Fail },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub experiments: Vec<ExperimentSummary>,
    pub all_passed: bool,
}

impl Summary {
    pub fn new(experiments: Vec<ExperimentSummary>) -> Self {
        let all_passed = experiments.iter().all(|e| e.failed == 0);
        Summary { experiments, all_passed }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `<id>.jsonl` and/or `<id>.csv` under `dir`.
pub fn write_records(dir: &Path, experiment: &str, records: &[CellRecord], format: OutputFormat) -> Result<()> {
    fs::create_dir_all(dir)?;
    if format.json() {
        let mut out = Vec::new();
        for r in records {
            serde_json::to_writer(&mut out, r).map_err(|e| Error::Io(e.to_string()))?;
            out.push(b'\n');
        }
        fs::write(dir.join(format!("{experiment}.jsonl")), out)?;
    }
    if format.csv() {
        let mut w = csv::Writer::from_path(dir.join(format!("{experiment}.csv"))).map_err(csv_error)?;
        w.write_record(["experiment", "spec", "isogeny", "q", "n", "k", "order", "count", "status", "note", "flags"])
            .map_err(csv_error)?;
        for r in records {
            let opt = |v: Option<String>| v.unwrap_or_default();
            let status = serde_json::to_value(r.status).expect("status serializes");
            w.write_record([
                r.experiment.clone(),
                r.spec.clone(),
                opt(r.isogeny.clone()),
                r.q.to_string(),
                r.n.to_string(),
                opt(r.k.map(|k| k.to_string())),
                opt(r.order.clone()),
                opt(r.count.map(|c| c.to_string())),
                status.as_str().unwrap_or_default().to_string(),
                opt(r.note.clone()),
                serde_json::to_string(&r.flags).expect("flags serialize"),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn write_summary(dir: &Path, summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut file = fs::File::create(dir.join("summary.json"))?;
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.to_string()))?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}
