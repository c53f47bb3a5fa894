//! Rendering of command reports as aligned text, JSON, or CSV.

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[value(name = "table")]
    PlainTable,
    #[value(name = "json")]
    Json,
    #[value(name = "csv")]
    Csv,
}

impl OutputFormat {
    /// An explicit choice wins; otherwise a table on a terminal, JSON when redirected.
    pub fn resolve(explicit: Option<OutputFormat>, stdout_is_terminal: bool) -> OutputFormat {
        explicit.unwrap_or(if stdout_is_terminal { OutputFormat::PlainTable } else { OutputFormat::Json })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    fn render_plain(&self, out: &mut String) {
        let cols = self.header.len();
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(cols) {
                width[i] = width[i].max(cell.chars().count());
            }
        }
        let line = |cells: &[String], out: &mut String| {
            let padded: Vec<String> =
                cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = width[i])).collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.header, out);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        line(&rule, out);
        for row in &self.rows {
            line(row, out);
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
    }
}

/// Everything a command produced, independent of how it is printed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub elapsed_seconds: f64,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "meta": {
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_seconds": self.elapsed_seconds,
            },
        })
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => render_json(&self.to_json()),
            OutputFormat::Csv => {
                self.tables.iter().map(Table::render_csv).collect::<Vec<_>>().join("\n")
            }
            OutputFormat::PlainTable => {
                let mut out = String::new();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    t.render_plain(&mut out);
                }
                for note in &self.notes {
                    out.push_str("note: ");
                    out.push_str(note);
                    out.push('\n');
                }
                out
            }
        }
    }
}

/// Pretty JSON with keys in sorted order, newline terminated.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
