//! Output envelope shared by every subcommand, rendered as JSON or CSV.

use std::fmt::Write as _;

use orthoglide::ManipulatorParams;
use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "orthoglide";
pub const VERSION: &str = orthoglide::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Fixed-order table for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub feasible: bool,
    pub input: Value,
    pub params: ManipulatorParams,
    pub result: Value,
}

/// A finished command: the envelope, its CSV view, and the feasibility
/// verdict that drives the exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub envelope: Envelope,
    pub table: Table,
}

impl Output {
    pub fn new(
        command: &'static str,
        feasible: bool,
        input: &impl Serialize,
        params: &ManipulatorParams,
        result: &impl Serialize,
        table: Table,
    ) -> Self {
        Self {
            envelope: Envelope {
                tool: TOOL,
                version: VERSION,
                command,
                feasible,
                input: to_value(input),
                params: *params,
                result: to_value(result),
            },
            table,
        }
    }

    pub fn feasible(&self) -> bool {
        self.envelope.feasible
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    /// Metadata goes in leading `#` lines, then the fixed header and rows.
    fn render_csv(&self) -> String {
        let e = &self.envelope;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# tool={} version={} command={} feasible={}",
            e.tool, e.version, e.command, e.feasible
        );
        let _ = writeln!(
            s,
            "# input={}",
            serde_json::to_string(&e.input).expect("serializable")
        );
        let _ = writeln!(
            s,
            "# params={}",
            serde_json::to_string(&e.params).expect("serializable")
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.table.header).expect("in-memory write");
        for row in &self.table.rows {
            w.write_record(row).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory write");
        s.push_str(std::str::from_utf8(&body).expect("utf-8 fields"));
        s
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Shortest round-trip decimal.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
