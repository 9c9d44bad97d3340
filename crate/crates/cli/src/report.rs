use std::fmt::Write as _;
use std::io::Write;

use clap::ValueEnum;
use pjring::jacobi::GateOutcome;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows for CSV and text output; the JSON form keeps them under `result`.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Envelope shared by every subcommand. Two runs with the same arguments
/// serialize identically except for `wall_time_ms`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub s: usize,
    pub l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub prime_policy: &'static str,
    pub primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateOutcome>,
    pub wall_time_ms: u64,
    pub result: Value,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str, s: usize, l: usize) -> Self {
        Self {
            tool: "pjring",
            version: env!("CARGO_PKG_VERSION"),
            command,
            s,
            l,
            a: None,
            seed: None,
            prime_policy: "none",
            primes: Vec::new(),
            gate: None,
            wall_time_ms: 0,
            result: Value::Null,
            table: None,
        }
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        })
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(t) => {
                out += &t.header.join(",");
                out.push('\n');
                for row in &t.rows {
                    out += &row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
                    out.push('\n');
                }
            }
            None => {
                out += "key,value\n";
                for (k, v) in self.summary() {
                    let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&v));
                }
            }
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} ({})", self.tool, self.command, self.version);
        let a = self.a.map(|a| format!(" a={a}")).unwrap_or_default();
        let _ = writeln!(out, "G({},{}) s={} l={}{a}", self.s, self.l + 1, self.s, self.l);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}");
        }
        if !self.primes.is_empty() {
            let ps: Vec<String> = self.primes.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "primes ({}) {}", self.prime_policy, ps.join(" "));
        }
        if let Some(g) = &self.gate {
            let _ = writeln!(out, "gate {}: {}", if g.passed { "passed" } else { "refused" }, g.reason);
        }
        match &self.table {
            Some(t) => {
                let mut widths: Vec<usize> = t.header.iter().map(|h| h.len()).collect();
                for row in &t.rows {
                    for (w, c) in widths.iter_mut().zip(row) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cells: Vec<&str>| {
                    cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
                };
                let _ = writeln!(out, "{}", line(t.header.clone()));
                for row in &t.rows {
                    let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
                }
            }
            None => {
                for (k, v) in self.summary() {
                    let _ = writeln!(out, "{k}: {v}");
                }
            }
        }
        let _ = writeln!(out, "wall time {} ms", self.wall_time_ms);
        out
    }

    /// Top-level scalar fields of `result`; arrays and objects as compact JSON.
    fn summary(&self) -> Vec<(String, String)> {
        match &self.result {
            Value::Object(map) => map
                .iter()
                .map(|(k, v)| {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (k.clone(), v)
                })
                .collect(),
            Value::Null => Vec::new(),
            other => vec![("result".into(), other.to_string())],
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit(text: &str, output: Option<&std::path::Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
