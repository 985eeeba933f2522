//! Machine-readable run reports.
//!
//! Reports serialize with sorted keys (serde_json's default map), carry no
//! wall-clock data unless `--timing` is given, and format rationals per the
//! `--precision` flag, so identical inputs produce byte-identical output.

use rpq_core::scalar::{format_rat, Rat};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactPass,
    TolerancePass,
    Fail,
    StructuralFail,
    LoggedDiscrepancy,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ExactPass => "exact-pass",
            Verdict::TolerancePass => "tolerance-pass",
            Verdict::Fail => "fail",
            Verdict::StructuralFail => "structural-fail",
            Verdict::LoggedDiscrepancy => "logged-discrepancy",
        }
    }
}

pub struct Record {
    pub name: String,
    pub inputs: Value,
    pub expected: Value,
    pub actual: Value,
    pub residual: Value,
    pub verdict: Verdict,
    pub formula: &'static str,
    pub convention: &'static str,
}

impl Record {
    pub fn to_value(&self) -> Value {
        json!({
            "name": self.name,
            "inputs": self.inputs,
            "expected": self.expected,
            "actual": self.actual,
            "residual": self.residual,
            "verdict": self.verdict.as_str(),
            "provenance": {
                "formula": self.formula,
                "convention": self.convention,
            },
        })
    }
}

pub struct RunReport {
    pub command: String,
    pub algebra: String,
    pub seed: u64,
    pub records: Vec<Record>,
    pub truncation: Value,
    pub timing_ms: Option<u128>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().any(|r| r.verdict == Verdict::Fail) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("algebra".into(), json!(self.algebra));
        m.insert("seed".into(), json!(self.seed));
        m.insert(
            "records".into(),
            Value::Array(self.records.iter().map(|r| r.to_value()).collect()),
        );
        m.insert("truncation".into(), self.truncation.clone());
        if let Some(t) = self.timing_ms {
            m.insert("timing_ms".into(), json!(t as u64));
        }
        Value::Object(m)
    }
}

/// Formats a rational per the precision flag (None = exact).
pub fn rat_val(r: &Rat, digits: Option<usize>) -> Value {
    Value::String(format_rat(r, digits))
}

pub fn f64_val(v: f64) -> Value {
    json!(v)
}
