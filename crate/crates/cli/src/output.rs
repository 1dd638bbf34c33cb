use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

/// A CSV document: `#`-prefixed metadata lines, a header row and data rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// 17 significant digits, so every finite value parses back bit for bit.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of a column; empty cells become `None`.
    pub fn floats(&self, name: &str) -> CliResult<Vec<Option<f64>>> {
        let k = self
            .column(name)
            .ok_or_else(|| CliError::Runtime(format!("no column '{name}'")))?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r[k].trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|_| {
                        CliError::Runtime(format!("'{cell}' in column {name} is not a number"))
                    })
                }
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> CliResult<()> {
        for line in &self.metadata {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> CliResult<()> {
        match path {
            Some(p) => {
                let file = File::create(p)
                    .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))?;
                self.write_to(io::BufWriter::new(file))
            }
            None => self.write_to(io::stdout().lock()),
        }
    }

    pub fn read_from<R: Read>(input: R) -> CliResult<Self> {
        let mut reader = BufReader::new(input);
        let mut metadata = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        while reader.read_line(&mut line)? > 0 {
            match line.strip_prefix('#') {
                Some(rest) => metadata.push(rest.trim().to_string()),
                None => body.push_str(&line),
            }
            line.clear();
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            metadata,
            header,
            rows,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let file = File::open(path)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        Self::read_from(file)
    }
}
