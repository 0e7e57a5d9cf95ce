use std::io::Write;

use serde_json::Value;

use crate::args::Format;

/// One subcommand's output: fixed CSV/table columns plus the JSON objects.
pub struct Output {
    pub headers: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub json: Vec<Value>,
    /// Summary lines shown under the table.
    pub notes: Vec<String>,
}

impl Output {
    pub fn single(headers: &'static [&'static str], row: Vec<String>, json: Value) -> Self {
        Output { headers, rows: vec![row], json: vec![json], notes: Vec::new() }
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                for v in &self.json {
                    writeln!(out, "{}", serde_json::to_string(v).expect("json value"))?;
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Table => {
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let line = |cells: Vec<&str>| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(out, "{}", line(self.headers.to_vec()))?;
                for row in &self.rows {
                    writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
                }
                for note in &self.notes {
                    writeln!(out, "{note}")?;
                }
            }
        }
        Ok(())
    }
}
