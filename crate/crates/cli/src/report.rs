//! Run report and the summary statistics `--verify` compares.

use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::Payload;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub artifact_version: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub inputs: Value,
    pub outputs: Value,
    pub results: Value,
    pub wall_clock_s: f64,
}

/// Row count and per-column min, max and sum of a CSV payload; comment
/// lines and the header are skipped.
pub fn csv_summary(text: &str) -> Result<Value, String> {
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = match lines.next() {
        Some(h) => h.split(',').map(|s| s.trim().to_string()).collect(),
        None => return Err("empty CSV".into()),
    };
    let n = header.len();
    let mut min = vec![f64::INFINITY; n];
    let mut max = vec![f64::NEG_INFINITY; n];
    let mut sum = vec![0.0; n];
    let mut rows = 0usize;
    for (i, line) in lines.enumerate() {
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != n {
            return Err(format!("data row {} has {} columns, header has {n}", i + 1, vals.len()));
        }
        for (j, v) in vals.iter().enumerate() {
            let x: f64 = v.trim().parse().map_err(|_| format!("data row {}: not a number {v:?}", i + 1))?;
            min[j] = min[j].min(x);
            max[j] = max[j].max(x);
            sum[j] += x;
        }
        rows += 1;
    }
    let columns: Vec<Value> = (0..n)
        .map(|j| json!({ "name": header[j], "min": min[j], "max": max[j], "sum": sum[j] }))
        .collect();
    Ok(json!({ "rows": rows, "columns": columns }))
}

pub fn summary(payload: &Payload) -> Result<Value, String> {
    match payload {
        Payload::Csv(text) => csv_summary(text),
        Payload::Json(v) => Ok(v.clone()),
    }
}

/// Summary of a payload read back from disk, in the same format.
pub fn summary_of_file(text: &str, json_payload: bool) -> Result<Value, String> {
    if json_payload {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        csv_summary(text)
    }
}
