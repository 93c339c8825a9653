use std::fmt::Write as _;
use std::io;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read or write `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse `{path}`: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{message}")]
    Validation { message: String, pointer: Option<String> },
    #[error("{0}")]
    Absent(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Absent(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Absent(_) => "structure-absent",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn to_json(&self) -> Value {
        let pointer = match self {
            CliError::Validation { pointer, .. } => pointer.clone(),
            _ => None,
        };
        serde_json::json!({ "kind": self.kind(), "message": self.to_string(), "pointer": pointer })
    }

    pub fn validation(message: impl Into<String>, pointer: impl Into<Option<String>>) -> CliError {
        CliError::Validation {
            message: message.into(),
            pointer: pointer.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Absent,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub status: &'static str,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub payload: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> RunReport {
        RunReport {
            command,
            status: "ok",
            exit_code: 0,
            checks: Vec::new(),
            payload: Value::Null,
            warnings: Vec::new(),
            error: None,
            elapsed_ms: 0,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: impl Into<Option<String>>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.check(name, Status::Pass, None);
    }

    pub fn fail_with(&mut self, err: &CliError) {
        self.status = "error";
        self.exit_code = err.exit_code();
        self.error = Some(err.to_json());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "$ catkit {}", self.command.join(" "));
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Absent => "ABSENT",
            };
            match &c.detail {
                Some(d) => {
                    let _ = writeln!(out, "{tag:6} {}: {d}", c.name);
                }
                None => {
                    let _ = writeln!(out, "{tag:6} {}", c.name);
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {}", e["message"].as_str().unwrap_or_default());
            if let Some(p) = e["pointer"].as_str() {
                let _ = writeln!(out, "  at {p}");
            }
        }
        if !self.payload.is_null() {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&self.payload).expect("plain data"));
        }
        let _ = writeln!(out, "status: {} (exit {}) in {} ms", self.status, self.exit_code, self.elapsed_ms);
        out
    }
}
