//! Result records and their on-disk formats.
//!
//! `<out>/<experiment>.jsonl` holds one JSON object per line: a header
//! (`"type":"header"`) carrying the experiment, seed, configuration hash and
//! every relevant configuration value, then one `"type":"record"` line per
//! metric and one `"type":"violation"` line per failed invariant. Reals are
//! written as strings with 17 significant digits (`1.2345678901234567e-1`);
//! non-finite values are `null`. `<out>/<experiment>.csv` repeats the records
//! under the header `experiment,config_hash,metric,value,std_err,replicas,timestamp`.
//! Both files are UTF-8 with LF line endings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub metric: String,
    pub value: f64,
    pub std_err: Option<f64>,
    pub replicas: u64,
}

impl ResultRecord {
    pub fn exact(metric: impl Into<String>, value: f64) -> Self {
        ResultRecord {
            metric: metric.into(),
            value,
            std_err: None,
            replicas: 0,
        }
    }

    pub fn estimate(
        metric: impl Into<String>,
        e: &fk_core::stats::Estimate,
        replicas: u64,
    ) -> Self {
        ResultRecord {
            metric: metric.into(),
            value: e.mean,
            std_err: Some(e.std_err),
            replicas,
        }
    }

    pub fn count(metric: impl Into<String>, n: usize, replicas: u64) -> Self {
        ResultRecord {
            metric: metric.into(),
            value: n as f64,
            std_err: None,
            replicas,
        }
    }
}

/// Everything an experiment produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub records: Vec<ResultRecord>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn push(&mut self, r: ResultRecord) {
        self.records.push(r);
    }

    pub fn violation(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    pub fn get(&self, metric: &str) -> Option<&ResultRecord> {
        self.records.iter().find(|r| r.metric == metric)
    }

    pub fn value(&self, metric: &str) -> Option<f64> {
        self.get(metric).map(|r| r.value)
    }
}

pub fn format_real(x: f64) -> Value {
    if x.is_finite() {
        Value::String(format!("{x:.16e}"))
    } else {
        Value::Null
    }
}

fn csv_real(x: Option<f64>) -> String {
    match x {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        _ => String::new(),
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

pub fn header_line(cfg: &ExperimentConfig) -> String {
    let config: Map<String, Value> = cfg
        .relevant()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
        .collect();
    json!({
        "type": "header",
        "format": FORMAT_VERSION,
        "experiment": cfg.experiment.name(),
        "config_hash": cfg.hash(),
        "seed": cfg.seed.to_string(),
        "config": config,
    })
    .to_string()
}

pub fn record_line(cfg: &ExperimentConfig, r: &ResultRecord, timestamp: u64) -> String {
    json!({
        "type": "record",
        "experiment": cfg.experiment.name(),
        "config_hash": cfg.hash(),
        "metric": r.metric,
        "value": format_real(r.value),
        "std_err": r.std_err.map_or(Value::Null, format_real),
        "replicas": r.replicas,
        "timestamp": timestamp,
    })
    .to_string()
}

pub fn violation_line(cfg: &ExperimentConfig, message: &str) -> String {
    json!({
        "type": "violation",
        "experiment": cfg.experiment.name(),
        "config_hash": cfg.hash(),
        "message": message,
    })
    .to_string()
}

/// Paths of the written files.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub jsonl: PathBuf,
    pub csv: PathBuf,
}

pub fn write_outcome(
    dir: &Path,
    cfg: &ExperimentConfig,
    outcome: &Outcome,
) -> std::io::Result<Artifacts> {
    fs::create_dir_all(dir)?;
    let name = cfg.experiment.name();
    let ts = now();
    let jsonl = dir.join(format!("{name}.jsonl"));
    let csv = dir.join(format!("{name}.csv"));

    let mut j = std::io::BufWriter::new(fs::File::create(&jsonl)?);
    writeln!(j, "{}", header_line(cfg))?;
    for r in &outcome.records {
        writeln!(j, "{}", record_line(cfg, r, ts))?;
    }
    for v in &outcome.violations {
        writeln!(j, "{}", violation_line(cfg, v))?;
    }
    j.flush()?;

    let mut c = std::io::BufWriter::new(fs::File::create(&csv)?);
    writeln!(
        c,
        "experiment,config_hash,metric,value,std_err,replicas,timestamp"
    )?;
    let hash = cfg.hash();
    for r in &outcome.records {
        writeln!(
            c,
            "{name},{hash},{},{},{},{},{ts}",
            r.metric,
            csv_real(Some(r.value)),
            csv_real(r.std_err),
            r.replicas
        )?;
    }
    c.flush()?;
    Ok(Artifacts { jsonl, csv })
}

/// Parsed contents of a JSONL result file.
#[derive(Clone, Debug)]
pub struct ResultFile {
    pub header: Value,
    pub records: Vec<Value>,
    pub violations: Vec<Value>,
}

pub fn read_result_file(path: &Path) -> Result<ResultFile, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| format!("{}: empty file", path.display()))?;
    let header: Value =
        serde_json::from_str(first).map_err(|e| format!("{}:1: {e}", path.display()))?;
    if header["type"] != "header" {
        return Err(format!("{}:1: first line is not a header", path.display()));
    }
    let mut records = Vec::new();
    let mut violations = Vec::new();
    for (no, line) in lines {
        let v: Value = serde_json::from_str(line)
            .map_err(|e| format!("{}:{}: {e}", path.display(), no + 1))?;
        match v["type"].as_str() {
            Some("record") => records.push(v),
            Some("violation") => violations.push(v),
            _ => return Err(format!("{}:{}: unknown line type", path.display(), no + 1)),
        }
    }
    Ok(ResultFile {
        header,
        records,
        violations,
    })
}
