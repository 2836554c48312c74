//! Diagnostic records and their CSV/JSON emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;

/// One diagnostic evaluated on one family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub family_id: String,
    pub diagnostic: String,
    /// Zeros, rotation and parameters, enough to replay the record.
    pub input_summary: String,
    pub value: Option<f64>,
    pub error_estimate: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: bool,
    pub seconds: f64,
    /// Secondary outputs such as the maximizing square.
    pub detail: String,
    pub timed_out: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub seed: u64,
    pub records: Vec<Record>,
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("csv is utf-8")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "family_id",
            "diagnostic",
            "input_summary",
            "value",
            "error_estimate",
            "threshold",
            "pass",
            "seconds",
        ])?;
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            wr.write_record([
                r.family_id.as_str(),
                r.diagnostic.as_str(),
                r.input_summary.as_str(),
                &num(r.value),
                &num(r.error_estimate),
                &num(r.threshold),
                if r.pass { "true" } else { "false" },
                &r.seconds.to_string(),
            ])?;
        }
        wr.flush()
    }
}

/// Writes the report to `path`; filesystem errors are returned unchanged.
pub fn write_report(report: &DiagnosticsReport, format: Format, path: &Path) -> io::Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => report.write_csv(&mut file)?,
        Format::Json => file.write_all(report.to_json().as_bytes())?,
    }
    file.flush()
}
