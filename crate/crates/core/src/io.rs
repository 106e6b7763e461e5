//! Binary PGM images and CSV matrices.
//!
//! PGM files are P5 with 8-bit or 16-bit (big-endian) samples. Writers map
//! the value range `[lo, hi]` linearly onto `[0, maxval]`, rounding to the
//! nearest level and clamping; readers return the raw levels.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Grid;

/// Shortest-round-trip-safe float formatting: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn maxval(self) -> u16 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

pub fn encode_pgm(image: &Grid, lo: f64, hi: f64, depth: BitDepth) -> Result<Vec<u8>> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "PGM range [{lo}, {hi}] is empty"
        )));
    }
    let maxval = depth.maxval();
    let mut out = format!("P5\n{} {}\n{}\n", image.cols(), image.rows(), maxval).into_bytes();
    let scale = f64::from(maxval) / (hi - lo);
    for &v in image.as_slice() {
        let level = ((v - lo) * scale).round();
        let level = if level.is_nan() {
            0
        } else {
            level.clamp(0.0, f64::from(maxval)) as u16
        };
        match depth {
            BitDepth::Eight => out.push(level as u8),
            BitDepth::Sixteen => out.extend_from_slice(&level.to_be_bytes()),
        }
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, image: &Grid, lo: f64, hi: f64, depth: BitDepth) -> Result<()> {
    fs::write(path, encode_pgm(image, lo, hi, depth)?)?;
    Ok(())
}

/// Decodes a P5 image into raw grey levels and its `maxval`.
pub fn decode_pgm(bytes: &[u8]) -> Result<(Grid, u16)> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        fields.push(
            std::str::from_utf8(&bytes[start..pos])
                .map_err(|_| Error::Parse("bad PGM header".into()))?,
        );
    }
    if fields[0] != "P5" {
        return Err(Error::Parse(format!(
            "expected binary PGM (P5), found '{}'",
            fields[0]
        )));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad PGM header field '{s}'")))
    };
    let (cols, rows, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval == 0 || maxval > 65535 || rows == 0 || cols == 0 {
        return Err(Error::Parse("PGM dimensions or maxval out of range".into()));
    }
    pos += 1;
    let width = if maxval < 256 { 1 } else { 2 };
    let need = rows * cols * width;
    let data = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::Parse("truncated PGM raster".into()))?;
    let values = if width == 1 {
        data.iter().map(|&b| f64::from(b)).collect()
    } else {
        data.chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])))
            .collect()
    };
    Ok((Grid::new(rows, cols, values)?, maxval as u16))
}

pub fn read_pgm(path: &Path) -> Result<(Grid, u16)> {
    decode_pgm(&fs::read(path)?)
}

/// Matrix as CSV with a `c0,c1,…` header row.
pub fn matrix_to_csv(m: &Grid) -> String {
    let mut s = (0..m.cols())
        .map(|c| format!("c{c}"))
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| fmt_f64(m.get(r, c))).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Parses a numeric CSV matrix, skipping a non-numeric header row.
pub fn matrix_from_csv(text: &str) -> Result<Grid> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Parse(format!(
                    "non-numeric CSV field on line {}",
                    i + 1
                )))
            }
        }
    }
    let cols = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Parse("CSV contains no data rows".into()))?;
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: bad.len(),
        });
    }
    Grid::new(rows.len(), cols, rows.concat())
}
