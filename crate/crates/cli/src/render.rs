use crate::Failure;
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `key  value` lines (single results only; tables fall back to CSV).
    Text,
    Csv,
    Markdown,
    Json,
}

enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn display(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => short_or_fixed(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// An ordered set of named values describing one result.
pub struct Record {
    fields: Vec<(&'static str, Cell)>,
}

impl Record {
    pub fn new() -> Self {
        Self { fields: Vec::new() }
    }

    pub fn int(mut self, key: &'static str, v: i64) -> Self {
        self.fields.push((key, Cell::Int(v)));
        self
    }

    pub fn num(mut self, key: &'static str, v: f64) -> Self {
        self.fields.push((key, Cell::Num(v)));
        self
    }

    pub fn text(mut self, key: &'static str, v: String) -> Self {
        self.fields.push((key, Cell::Text(v)));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Text => {
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                Ok(self
                    .fields
                    .iter()
                    .map(|(k, v)| format!("{k:<width$}  {}\n", v.display()))
                    .collect())
            }
            Format::Json => {
                let obj: Map<String, Value> = self.fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                json_text(&Value::Object(obj))
            }
            Format::Csv | Format::Markdown => {
                let mut t = Table::new(self.fields.iter().map(|(k, _)| k.to_string()).collect());
                t.push(
                    self.fields.iter().map(|(_, v)| v.display()).collect(),
                    Value::Object(self.fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect()),
                );
                t.render(format)
            }
        }
    }
}

/// Rows shown rounded in CSV and Markdown, with a full-precision JSON twin.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    json: Vec<Value>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
            json: Vec::new(),
        }
    }

    pub fn push(&mut self, shown: Vec<String>, full: Value) {
        debug_assert_eq!(shown.len(), self.headers.len());
        self.rows.push(shown);
        self.json.push(full);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Text | Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).map_err(csv_failure)?;
                for r in &self.rows {
                    w.write_record(r).map_err(csv_failure)?;
                }
                let bytes = w.into_inner().map_err(|e| Failure::Numerical(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Failure::Numerical(e.to_string()))
            }
            Format::Markdown => {
                let mut out = format!("| {} |\n", self.headers.join(" | "));
                out.push_str(&format!("|{}\n", "---|".repeat(self.headers.len())));
                for r in &self.rows {
                    out.push_str(&format!("| {} |\n", r.join(" | ")));
                }
                Ok(out)
            }
            Format::Json => json_text(&Value::Array(self.json.clone())),
        }
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Numerical(format!("csv: {e}"))
}

fn json_text(v: &Value) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Shortest form for values with at most six decimals, else six decimals.
fn short_or_fixed(v: f64) -> String {
    let short = format!("{v}");
    match short.split_once('.') {
        Some((_, frac)) if frac.len() > 6 => format!("{v:.6}"),
        _ => short,
    }
}

/// `0.8` as `80%`, `0.995` as `99.5%`.
pub fn percent(p: f64) -> String {
    let v = p * 100.0;
    if (v - v.round()).abs() < 1e-9 {
        format!("{}%", v.round())
    } else {
        format!("{}%", (v * 1e6).round() / 1e6)
    }
}
