use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "deltavc.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// One run's report: a self-describing JSON document, or the same data as
/// text.
pub struct Report {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub theorems: Vec<String>,
    pub status: Status,
    pub result: Value,
    pub text: String,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            parameters: Map::new(),
            theorems: Vec::new(),
            status: Status::Pass,
            result: Value::Null,
            text: String::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn input(&mut self, path: &Path, contents: &str) -> &mut Self {
        self.param("input", path.display().to_string());
        self.param("input_contents", contents)
    }

    pub fn theorem(&mut self, tag: impl Into<String>) -> &mut Self {
        self.theorems.push(tag.into());
        self
    }

    pub fn line(&mut self, s: impl AsRef<str>) -> &mut Self {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": self.parameters,
            "theorems": self.theorems,
            "status": self.status,
            "result": self.result,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "deltavc {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.parameters {
            if k == "input_contents" {
                continue;
            }
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "  {k:<12} {shown}");
        }
        if !self.theorems.is_empty() {
            let _ = writeln!(out, "  {:<12} {}", "theorems", self.theorems.join(", "));
        }
        out.push('\n');
        out.push_str(&self.text);
        let _ = writeln!(
            out,
            "status: {}",
            match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            }
        );
        out
    }
}
