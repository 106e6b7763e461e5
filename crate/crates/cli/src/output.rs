use std::fs;
use std::path::{Path, PathBuf};

use proxmcmc::io::{fmt_f64, write_pgm, BitDepth};
use proxmcmc::Grid;
use serde::Serialize;

use crate::error::CliResult;

/// Result directory; every file has exactly one writer.
#[derive(Clone, Debug)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> CliResult<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn text(&self, name: &str, content: &str) -> CliResult<()> {
        fs::write(self.path(name), content)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }

    pub fn pgm(
        &self,
        name: &str,
        image: &Grid,
        lo: f64,
        hi: f64,
        depth: BitDepth,
    ) -> CliResult<()> {
        write_pgm(&self.path(name), image, lo, hi, depth)?;
        Ok(())
    }
}

/// CSV builder with a fixed header and full-precision floats.
pub struct Csv {
    buf: String,
    width: usize,
}

pub enum Cell<'a> {
    F(f64),
    I(usize),
    B(bool),
    S(&'a str),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            buf: format!("{}\n", header.join(",")),
            width: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        debug_assert_eq!(cells.len(), self.width);
        let parts: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::F(v) => fmt_f64(*v),
                Cell::I(v) => v.to_string(),
                Cell::B(v) => u8::from(*v).to_string(),
                Cell::S(v) => v.to_string(),
            })
            .collect();
        self.buf.push_str(&parts.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
