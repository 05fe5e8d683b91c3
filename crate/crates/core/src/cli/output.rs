use clap::ValueEnum;
use serde_json::{json, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Column-oriented result with a header row.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Command output plus the inputs needed to reproduce it.
#[derive(Debug, Clone)]
pub(crate) struct Document {
    pub command: String,
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
}

impl Document {
    fn meta(&self) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
        })
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({"meta": self.meta(), "result": self.result}))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Config(format!("`{}` has no CSV output; use --format json", self.command)))?;
                let mut s = format!(
                    "# {} {}\n# command: {}\n# config: {}\n",
                    env!("CARGO_PKG_NAME"),
                    env!("CARGO_PKG_VERSION"),
                    self.command,
                    serde_json::to_string(&self.config)?
                );
                s.push_str(&table.header.join(","));
                s.push('\n');
                for row in &table.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}

/// Shortest round-trip decimal, `inf` for infinities.
pub(crate) fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![num(0.5), num(f64::INFINITY)]);
        let d = Document { command: "x".into(), config: json!({"k": 1}), result: json!(null), table: Some(t) };
        let s = d.render(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# zfsdma "));
        assert_eq!(lines[2], "# config: {\"k\":1}");
        assert_eq!(&lines[3..], ["a,b", "0.5,inf"]);
        let no_table = Document { table: None, ..d };
        assert!(no_table.render(Format::Csv).unwrap_err().is_usage());
        let j: Value = serde_json::from_str(&no_table.render(Format::Json).unwrap()).unwrap();
        assert_eq!(j["meta"]["command"], "x");
    }
}
