//! Run reports: a flat list of per-item records plus summary counts,
//! rendered either as human-oriented lines or as a single JSON document.
//!
//! Identical inputs and flags produce byte-identical output, except for the
//! tool version field in JSON mode.

use serde::Serialize;

use pfk_core::interp::Obligation;
use pfk_core::surface::ItemRecord;

/// How the report is rendered on standard output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One `STATUS kind name [cause]` line per record, then a summary line.
    Text,
    /// A single JSON document.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// One checked thing: an item of a theory file, a proof obligation, a
/// transferred theorem, or a property suite.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub status: Status,
    pub kind: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
}

impl Record {
    pub fn ok(kind: impl Into<String>, name: impl Into<String>) -> Self {
        Record {
            status: Status::Ok,
            kind: kind.into(),
            name: name.into(),
            cause: None,
        }
    }

    pub fn failed(
        kind: impl Into<String>,
        name: impl Into<String>,
        cause: impl Into<String>,
    ) -> Self {
        Record {
            status: Status::Failed,
            kind: kind.into(),
            name: name.into(),
            cause: Some(cause.into()),
        }
    }

    pub fn from_obligation(o: &Obligation) -> Self {
        match &o.status {
            pfk_core::interp::ObligationStatus::Ok => Record::ok(o.kind.to_string(), &o.subject),
            pfk_core::interp::ObligationStatus::Failed(cause) => {
                Record::failed(o.kind.to_string(), &o.subject, cause)
            }
        }
    }

    pub fn from_item(r: &ItemRecord) -> Self {
        match &r.error {
            None => Record::ok(r.kind, &r.name),
            Some(cause) => Record::failed(r.kind, &r.name, cause),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// The full result of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub exit_code: i32,
}

impl Report {
    /// Assemble a report. `exit_code` is 0 exactly when no record failed,
    /// unless a fatal code (2) is imposed by the caller.
    pub fn new(command: String, records: Vec<Record>, fatal: bool) -> Self {
        let total = records.len();
        let failed = records
            .iter()
            .filter(|r| r.status == Status::Failed)
            .count();
        let exit_code = if fatal {
            2
        } else if failed > 0 {
            1
        } else {
            0
        };
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            records,
            summary: Summary {
                total,
                passed: total - failed,
                failed,
            },
            exit_code,
        }
    }

    /// A report for an error that prevented the run from producing records
    /// (unreadable input, unparsable file, incomplete parameter map).
    pub fn fatal(command: String, name: impl Into<String>, cause: impl Into<String>) -> Self {
        Report::new(command, vec![Record::failed("error", name, cause)], true)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                for r in &self.records {
                    let status = match r.status {
                        Status::Ok => "OK",
                        Status::Failed => "FAIL",
                    };
                    out.push_str(status);
                    out.push(' ');
                    out.push_str(&r.kind);
                    out.push(' ');
                    out.push_str(&r.name);
                    if let Some(cause) = &r.cause {
                        out.push_str(": ");
                        out.push_str(cause);
                    }
                    out.push('\n');
                }
                out.push_str(&format!(
                    "{} checked, {} passed, {} failed\n",
                    self.summary.total, self.summary.passed, self.summary.failed
                ));
                out
            }
        }
    }
}
