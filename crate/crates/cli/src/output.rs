//! Buffered CSV writing. Files are only created once every row is computed.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A finished table: header plus pre-formatted rows.
pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Table {
            name,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Seventeen significant digits, enough to recover the exact `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes every table under `dir` and returns the paths in order.
pub fn write_tables<'a>(dir: &Path, tables: impl IntoIterator<Item = &'a Table>) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(t.name);
        let file = std::fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "{}", t.header.join(",")).map_err(io_err(&path))?;
        for row in &t.rows {
            writeln!(w, "{}", row.join(",")).map_err(io_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
