//! Re-execution of a result file and textual comparison of its records.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::experiments::{execute, Experiment, RunError};
use crate::records::{format_real, read_result_file, ResultRecord};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReproduceReport {
    pub experiment: String,
    pub records: usize,
    /// One line per differing field.
    pub diffs: Vec<String>,
}

impl ReproduceReport {
    pub fn identical(&self) -> bool {
        self.diffs.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReproduceError {
    #[error("{0}")]
    File(String),
    #[error(transparent)]
    Run(#[from] RunError),
}

fn field_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

fn rendered(r: &ResultRecord) -> [(&'static str, String); 4] {
    [
        ("metric", r.metric.clone()),
        ("value", field_text(&format_real(r.value))),
        (
            "std_err",
            r.std_err
                .map_or("null".into(), |e| field_text(&format_real(e))),
        ),
        ("replicas", r.replicas.to_string()),
    ]
}

/// Configuration embedded in a result header.
pub fn header_config(header: &Value) -> Result<ExperimentConfig, ReproduceError> {
    let name = header["experiment"]
        .as_str()
        .ok_or_else(|| ReproduceError::File("header lacks `experiment`".into()))?;
    let experiment: Experiment = name.parse().map_err(ReproduceError::File)?;
    let seed = header["seed"]
        .as_str()
        .and_then(|s| s.parse::<u64>().ok())
        .or_else(|| header["seed"].as_u64())
        .ok_or_else(|| ReproduceError::File("header lacks a numeric `seed`".into()))?;
    let map = header["config"]
        .as_object()
        .ok_or_else(|| ReproduceError::File("header lacks `config`".into()))?;
    let raw: BTreeMap<String, String> = map
        .iter()
        .map(|(k, v)| (k.clone(), field_text(v)))
        .collect();
    ExperimentConfig::build(experiment, &raw, &[], Some(seed))
        .map_err(|e| RunError::Config(e).into())
}

/// Re-runs the experiment recorded in `path` and compares every record field
/// except the timestamp.
pub fn reproduce(path: &Path) -> Result<ReproduceReport, ReproduceError> {
    let file = read_result_file(path).map_err(ReproduceError::File)?;
    let cfg = header_config(&file.header)?;
    let mut report = ReproduceReport {
        experiment: cfg.experiment.name().to_string(),
        records: file.records.len(),
        diffs: Vec::new(),
    };
    let stored_hash = field_text(&file.header["config_hash"]);
    if stored_hash != cfg.hash() {
        report.diffs.push(format!(
            "header: config_hash {stored_hash} does not match its configuration ({})",
            cfg.hash()
        ));
    }
    let fresh = execute(&cfg)?;
    for (k, old) in file.records.iter().enumerate() {
        let Some(new) = fresh.records.get(k) else {
            report
                .diffs
                .push(format!("record {k}: missing from the rerun"));
            continue;
        };
        let metric = field_text(&old["metric"]);
        for (field, text) in rendered(new) {
            let before = field_text(&old[field]);
            if before != text {
                report
                    .diffs
                    .push(format!("record {k} ({metric}): {field} {before} -> {text}"));
            }
        }
    }
    for (k, extra) in fresh.records.iter().enumerate().skip(file.records.len()) {
        report
            .diffs
            .push(format!("record {k} ({}): not in the file", extra.metric));
    }
    let old_v: Vec<String> = file
        .violations
        .iter()
        .map(|v| field_text(&v["message"]))
        .collect();
    if old_v != fresh.violations {
        report.diffs.push(format!(
            "violations: {} in the file, {} in the rerun",
            old_v.len(),
            fresh.violations.len()
        ));
    }
    Ok(report)
}
