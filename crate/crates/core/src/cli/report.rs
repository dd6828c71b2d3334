//! Tabular reports rendered as aligned text or CSV.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
}

/// Header, rows, and free-text notes. Notes go below the table in table mode
/// and to stderr in CSV mode, keeping CSV output pure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Table => Ok(self.render_table()),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io_err = |e: csv::Error| CliError::Io(e.to_string());
        writer.write_record(&self.headers).map_err(io_err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(io_err)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    fn render_table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if !self.headers.is_empty() {
            out += &line(&self.headers);
            for row in &self.rows {
                out += &line(row);
            }
        }
        for note in &self.notes {
            out += note;
            out.push('\n');
        }
        out
    }
}

/// Writes the report to `out` (or `stdout`) and CSV-mode notes to `stderr`.
pub fn emit_table(
    report: &Report,
    format: Format,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let text = report.render(format)?;
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match out {
        Some(path) => {
            let mut file =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            file.write_all(text.as_bytes()).map_err(io_err)?;
        }
        None => stdout.write_all(text.as_bytes()).map_err(io_err)?,
    }
    if format == Format::Csv {
        for note in &report.notes {
            writeln!(stderr, "{note}").map_err(io_err)?;
        }
    }
    Ok(())
}
