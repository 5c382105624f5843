//! The structured document every command emits.

use crate::config::RunConfig;
use serde::Serialize;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const TOOL: &str = "psym";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply (e.g. a theorem hypothesis is not met).
    NotApplicable,
}

/// One yes/no claim, with the computation that backs it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub oracle: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>, oracle: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            oracle: oracle.into(),
        }
    }

    pub fn not_applicable(name: impl Into<String>, detail: impl Into<String>, oracle: impl Into<String>) -> Self {
        Verdict { name: name.into(), status: Status::NotApplicable, detail: detail.into(), oracle: oracle.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub started_unix: f64,
    pub total_seconds: f64,
    pub stages: Vec<(String, f64)>,
}

/// Wall-clock bookkeeping; dropped from the report in reproducible mode.
pub struct Stopwatch {
    start: Instant,
    started_unix: f64,
    last: Instant,
    stages: Vec<(String, f64)>,
}

impl Stopwatch {
    pub fn start() -> Self {
        let now = Instant::now();
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        Stopwatch { start: now, started_unix: unix, last: now, stages: Vec::new() }
    }

    pub fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push((stage.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }

    pub fn finish(self) -> Timing {
        Timing { started_unix: self.started_unix, total_seconds: self.start.elapsed().as_secs_f64(), stages: self.stages }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub results: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ReportDocument {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config: config.clone(),
            results: serde_json::Value::Null,
            verdicts: Vec::new(),
            warnings: Vec::new(),
            timing: None,
        }
    }

    pub fn failures(&self) -> usize {
        self.verdicts.iter().filter(|v| v.status == Status::Fail).count()
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        crate::json::to_string(self)
    }
}
