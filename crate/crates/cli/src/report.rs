//! CSV emission. Every artifact is one table with a `#`-prefixed header
//! block: the tool version first, then `key = value` lines echoing each
//! resolved parameter (re-runnable as a config file), then the column row
//! and the data rows. Derived summaries (fits, crossings) append as trailing
//! `#` lines so the body stays a single homogeneous table. No timestamps:
//! identical invocations must produce identical bytes.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use crate::CliResult;

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(subcommand: &str) -> Self {
        let mut buf = format!("# torus-ising {}\n", env!("CARGO_PKG_VERSION"));
        buf.push_str(&format!("# subcommand = {subcommand}\n"));
        Csv { buf }
    }

    /// One `# key = value` header (or footer) line.
    pub fn kv(&mut self, key: &str, value: impl Display) {
        self.buf.push_str(&format!("# {key} = {value}\n"));
    }

    /// A free-form `#` comment line.
    pub fn comment(&mut self, text: &str) {
        self.buf.push_str(&format!("# {text}\n"));
    }

    pub fn columns(&mut self, cols: &[&str]) {
        self.buf.push_str(&cols.join(","));
        self.buf.push('\n');
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    /// Writes the finished table to the file, or to stdout when no path is
    /// given.
    pub fn write(self, out: Option<&Path>) -> CliResult<()> {
        match out {
            Some(path) => {
                std::fs::write(path, self.buf.as_bytes())?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(self.buf.as_bytes())
                    .and_then(|()| lock.flush())?;
            }
        }
        Ok(())
    }
}

/// Full-double-precision cell: 17 significant digits, so downstream fits
/// reproduce bit-for-bit.
pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Text cell made comma-safe for embedding in a row.
pub fn csv_safe(s: &str) -> String {
    s.replace(',', ";")
}
