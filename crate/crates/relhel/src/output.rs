//! CSV emission. Every file opens with `#` lines carrying the command, units,
//! resolution and the SHA-256 digest of the effective configuration.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::RunError;

pub fn config_digest(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV table under construction.
pub struct Table {
    command: &'static str,
    resolution: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// One CSV cell.
pub enum Cell {
    F(f64),
    I(i64),
    U(usize),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:e}"),
            Cell::I(x) => x.to_string(),
            Cell::U(x) => x.to_string(),
            Cell::B(x) => x.to_string(),
            Cell::S(x) => x.clone(),
        }
    }
}

impl Table {
    pub fn new(command: &'static str, resolution: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { command, resolution: resolution.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.iter().map(Cell::render).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, digest: &str) -> Result<String, RunError> {
        let mut head = String::new();
        head.push_str(&format!("# relhel {}\n", self.command));
        head.push_str("# units: c = 1; lengths, times and proper times share one unit\n");
        head.push_str(&format!("# resolution: {}\n", self.resolution));
        head.push_str(&format!("# config-sha256: {digest}\n"));
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| RunError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let body = w.into_inner().map_err(|e| RunError::Io(e.to_string()))?;
        Ok(head + &String::from_utf8(body).expect("csv output is utf-8"))
    }

    pub fn write(&self, dir: &Path, name: &str, digest: &str) -> Result<PathBuf, RunError> {
        write_text(dir, name, &self.render(digest)?)
    }
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
