//! JSON reports and CSV pairing tables.

use anyhow::Result;
use branch_lab_core::weaklimit::{FunctionalVerdict, LimitTrace};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SCHEMA: &str = "branch-lab/1";

/// One `⟨ψ_ν, φ⟩` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub series: String,
    pub nu: u32,
    pub center: f64,
    pub width: f64,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub passed: bool,
    pub verdict: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairings: Vec<PairingRow>,
}

impl Stage {
    pub fn new(name: impl Into<String>, passed: bool, verdict: Value) -> Self {
        Self { name: name.into(), passed, verdict, pairings: Vec::new() }
    }

    pub fn with_pairings(mut self, pairings: Vec<PairingRow>) -> Self {
        self.pairings = pairings;
        self
    }
}

/// Wall-clock data; the only part of a report that may differ between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub timestamp_unix_ms: u128,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: RunConfig,
    pub stages: Vec<Stage>,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: Vec<String>, config: RunConfig) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            config,
            stages: Vec::new(),
            conclusion: String::new(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The report without its timing block, for run-to-run comparison.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.timing = None;
        copy.to_json()
    }

    pub fn pairings(&self) -> impl Iterator<Item = &PairingRow> {
        self.stages.iter().flat_map(|s| &s.pairings)
    }
}

/// CSV with one row per pairing across all stages; header only when there
/// are none.
pub fn emit_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["series", "nu", "center", "width", "value", "error_estimate"])?;
    for r in report.pairings() {
        w.write_record([
            r.series.clone(),
            r.nu.to_string(),
            r.center.to_string(),
            r.width.to_string(),
            r.value.to_string(),
            r.error_estimate.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn trace_rows(series: &str, traces: &[LimitTrace]) -> Vec<PairingRow> {
    traces
        .iter()
        .flat_map(|t| {
            t.samples.iter().map(move |s| PairingRow {
                series: series.to_string(),
                nu: s.nu,
                center: t.test_function.center,
                width: t.test_function.width,
                value: s.value,
                error_estimate: s.error_estimate,
            })
        })
        .collect()
}

/// Classification plus the per-member verdicts, without the samples
/// (those go to the pairing rows).
pub fn summarize(v: &FunctionalVerdict) -> Value {
    let members: Vec<Value> = v
        .per_test_function
        .iter()
        .map(|t| json!({ "center": t.test_function.center, "width": t.test_function.width, "limit": t.verdict }))
        .collect();
    json!({ "classification": v.classification, "members": members })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_gives_header_only() {
        let r = Report::new(vec!["demo".into()], RunConfig::default());
        assert_eq!(emit_csv(&r).unwrap(), "series,nu,center,width,value,error_estimate\n");
    }

    #[test]
    fn timing_is_excluded_from_comparison() {
        let mut a = Report::new(vec![], RunConfig::default());
        let mut b = a.clone();
        a.timing = Some(Timing { timestamp_unix_ms: 1, elapsed_ms: 2 });
        b.timing = Some(Timing { timestamp_unix_ms: 3, elapsed_ms: 4 });
        assert_ne!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.deterministic_json().unwrap(), b.deterministic_json().unwrap());
    }
}
