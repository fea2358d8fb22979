//! Tabular command output rendered as CSV or JSON.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use stern_measure::dyadic::format_rational;

/// Significant digits for decimal output.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(String),
    Real(f64),
    Exact(String),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn int(v: impl ToString) -> Cell {
        Cell::Int(v.to_string())
    }

    pub fn exact(q: &BigRational) -> Cell {
        Cell::Exact(format_rational(q))
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Exact(s) | Cell::Text(s) => s.clone(),
            Cell::Real(v) => decimal(*v),
            Cell::Flag(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// `v` with [`DIGITS`] significant digits: positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..DIGITS as i32).contains(&exp) {
        let places = (DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.places$}");
        // rounding can carry into a new leading digit
        let digits = s.chars().filter(char::is_ascii_digit).count() - leading_zeros(&s);
        if digits > DIGITS && places > 0 {
            let places = places - 1;
            return format!("{v:.places$}");
        }
        s
    } else {
        format!("{v:.prec$e}", prec = DIGITS - 1)
    }
}

fn leading_zeros(s: &str) -> usize {
    s.chars()
        .filter(|c| c.is_ascii_digit())
        .take_while(|&c| c == '0')
        .count()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Named pass/fail flags; a report fails when any flag is false.
    pub checks: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    parameters: &'a BTreeMap<String, String>,
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
    checks: &'a BTreeMap<String, bool>,
    passed: bool,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Report {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Report::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Report {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: &str, passed: bool) {
        self.checks.insert(name.to_string(), passed);
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(self.columns.iter().map(String::as_str)));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&csv_line(cells.iter().map(String::as_str)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Flag(b) => serde_json::Value::Bool(*b),
                        Cell::Empty => serde_json::Value::Null,
                        other => serde_json::Value::String(other.render()),
                    })
                    .collect()
            })
            .collect();
        let report = JsonReport {
            command: &self.command,
            parameters: &self.parameters,
            columns: &self.columns,
            rows,
            checks: &self.checks,
            passed: self.passed(),
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }
}

fn csv_line<'a>(fields: impl Iterator<Item = &'a str>) -> String {
    let mut line = fields
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}
