//! Artifact writer. Every file goes under one output directory and is
//! recorded in the manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use grushin_core::GridFunction;
use serde::Serialize;

pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

/// One CSV table; `doc` becomes the leading `#` comment line.
pub struct Table {
    pub doc: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(doc: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { doc: doc.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting, so identical runs give identical bytes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        if name.contains(['/', '\\']) || name.starts_with('.') {
            bail!("artifact name `{name}` would leave the output directory");
        }
        self.files.push(name.to_string());
        Ok(self.root.join(name))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name)?;
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.path(name)?;
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        let path = self.path(name)?;
        let mut f = BufWriter::new(File::create(&path)?);
        writeln!(f, "# {}", table.doc)?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(&table.columns)?;
        for r in &table.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn nodes(&mut self, name: &str, u: &GridFunction) -> Result<()> {
        let path = self.path(name)?;
        let mut w = BufWriter::new(File::create(&path)?);
        u.write_node_dump(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Files written so far, in order.
    pub fn manifest(&self) -> Vec<String> {
        self.files.clone()
    }

    /// Timing is kept apart from the report so reports stay byte-identical
    /// across reruns.
    pub fn timing<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.root.join("timing.json"))?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        Ok(())
    }
}
