//! Report records, output formats and exit statuses.

use std::collections::BTreeMap;
use std::io::Write;

use afl_core::orbital::LaurentSeries;
use afl_core::reductions::{CheckReport, Value};
use afl_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Exit statuses, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Fail = 1,
    Cap = 3,
    Schema = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The more severe of the two; schema errors dominate.
    pub fn worst(self, o: Status) -> Status {
        self.max(o)
    }
}

/// Errors that mean the input itself is unusable.
pub fn is_schema_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidSpec(_)
            | Error::PrecisionTooSmall(_)
            | Error::NotQuadratic
            | Error::Shape(_)
            | Error::NotHermitian
            | Error::NotRegularSemisimple
            | Error::NotAdjointStable { .. }
    )
}

pub fn status_of(e: &Error) -> Status {
    match e {
        Error::CapExceeded { .. } => Status::Cap,
        e if is_schema_error(e) => Status::Schema,
        _ => Status::Fail,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub identity: String,
    pub inputs_digest: String,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    /// `pass`, `fail`, `cap` (enumeration cap hit) or `invalid` (bad input).
    pub verdict: String,
    pub precisions: Vec<u32>,
    /// Wall time; `null` unless timings were requested, so that output is
    /// reproducible byte for byte.
    pub millis: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl ReportJson {
    pub fn from_check(r: &CheckReport, digest: &str, millis: Option<u64>) -> ReportJson {
        ReportJson {
            identity: r.identity.clone(),
            inputs_digest: digest.into(),
            lhs: value_json(&r.lhs),
            rhs: value_json(&r.rhs),
            verdict: if r.passed() { "pass" } else { "fail" }.into(),
            precisions: r.precisions.clone(),
            millis,
            diagnostics: r.diagnostics.clone(),
        }
    }

    /// A report for a check that raised an error.
    pub fn from_error(identity: &str, digest: &str, status: Status, e: &str, millis: Option<u64>) -> ReportJson {
        ReportJson {
            identity: identity.into(),
            inputs_digest: digest.into(),
            lhs: serde_json::Value::Null,
            rhs: serde_json::Value::Null,
            verdict: match status {
                Status::Cap => "cap",
                Status::Schema => "invalid",
                _ => "fail",
            }
            .into(),
            precisions: Vec::new(),
            millis,
            diagnostics: vec![e.into()],
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    /// Exit status implied by the verdict.
    pub fn status(&self) -> Status {
        match self.verdict.as_str() {
            "pass" => Status::Ok,
            "cap" => Status::Cap,
            "invalid" => Status::Schema,
            _ => Status::Fail,
        }
    }
}

pub fn series_json(s: &LaurentSeries) -> serde_json::Value {
    json!(s.terms().iter().map(|(e, c)| [*e, *c]).collect::<Vec<_>>())
}

pub fn counts_json(c: &BTreeMap<u32, u64>) -> serde_json::Value {
    let m: serde_json::Map<String, serde_json::Value> = c.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    serde_json::Value::Object(m)
}

pub fn value_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Int(i) => json!(i),
        Value::Bool(b) => json!(b),
        Value::Counts(c) => counts_json(c),
        Value::Series(s) => series_json(s),
        Value::List(l) => serde_json::Value::Array(l.iter().map(value_json).collect()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Writes report records in the chosen format.
pub fn write_reports(out: &mut dyn Write, reports: &[ReportJson], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("reports serialize"))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["identity", "inputs_digest", "verdict", "lhs", "rhs", "precisions", "millis"])?;
            for r in reports {
                let precs = r.precisions.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([
                    r.identity.clone(),
                    r.inputs_digest.clone(),
                    r.verdict.clone(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    precs,
                    r.millis.map(|m| m.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            for r in reports {
                writeln!(out, "[{}] {} ({})", r.verdict.to_uppercase(), r.identity, &r.inputs_digest[..12.min(r.inputs_digest.len())])?;
                writeln!(out, "    lhs = {}", r.lhs)?;
                writeln!(out, "    rhs = {}", r.rhs)?;
                writeln!(out, "    precisions {:?}", r.precisions)?;
                for d in &r.diagnostics {
                    writeln!(out, "    ! {d}")?;
                }
            }
        }
    }
    Ok(())
}

/// Writes a single result object (for `parity`, `orbital`, `gen`).
pub fn write_object(out: &mut dyn Write, v: &serde_json::Value, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(v).expect("values serialize")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let obj = v.as_object().cloned().unwrap_or_default();
            w.write_record(obj.keys())?;
            w.write_record(obj.values().map(|x| match x {
                serde_json::Value::String(s) => s.clone(),
                x => x.to_string(),
            }))?;
            w.flush()?;
            Ok(())
        }
        Format::Pretty => {
            match v.as_object() {
                Some(obj) => {
                    for (k, x) in obj {
                        writeln!(out, "{k:>12}: {x}")?;
                    }
                }
                None => writeln!(out, "{v}")?,
            }
            Ok(())
        }
    }
}
