//! Plain-text state files and tabulated mask files.
//!
//! State file: a header line `n_points length hbar center`, then one line
//! `re im` per sample. Values are written with 17 significant digits, which
//! round-trips every f64 exactly.
//!
//! Mask table: lines `x A` or `x re im` (whitespace or comma separated) on a
//! uniform x lattice. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{ChurError, Result};
use crate::grid::{GridSpec, StateVector};

pub fn format_state(state: &StateVector) -> String {
    let g = state.grid();
    let mut out = String::with_capacity(48 * g.n_points());
    let _ = writeln!(out, "{} {:.16e} {:.16e} {:.16e}", g.n_points(), g.length(), g.hbar(), g.center());
    for a in state.amplitudes() {
        let _ = writeln!(out, "{:.16e} {:.16e}", a.re, a.im);
    }
    out
}

pub fn parse_state(text: &str) -> Result<StateVector> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(ChurError::Parse { line: 1, message: "empty state file".into() })?;
    let fields = split_fields(header);
    if fields.len() != 4 {
        return Err(parse_err(hline, "header must be `n_points length hbar center`"));
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err(hline, "n_points is not an integer"))?;
    let nums = fields[1..].iter().map(|f| parse_f64(f, hline)).collect::<Result<Vec<_>>>()?;
    let grid = GridSpec::new(n, nums[0], nums[1], nums[2])?;
    let mut amps = Vec::with_capacity(n);
    for (i, line) in lines {
        let f = split_fields(line);
        if f.len() != 2 {
            return Err(parse_err(i, "expected two columns `re im`"));
        }
        amps.push(Complex64::new(parse_f64(f[0], i)?, parse_f64(f[1], i)?));
    }
    if amps.len() != n {
        return Err(ChurError::LengthMismatch { expected: n, got: amps.len() });
    }
    StateVector::new(grid, amps)
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<()> {
    std::fs::write(path, format_state(state))?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// Uniformly sampled complex mask amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskTable {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

pub fn parse_mask_table(text: &str) -> Result<MaskTable> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f = split_fields(t);
        let v = match f.len() {
            2 => Complex64::new(parse_f64(f[1], i)?, 0.0),
            3 => Complex64::new(parse_f64(f[1], i)?, parse_f64(f[2], i)?),
            _ => return Err(parse_err(i, "expected `x A` or `x re im`")),
        };
        xs.push(parse_f64(f[0], i)?);
        values.push(v);
    }
    if xs.len() < 2 {
        return Err(ChurError::InvalidMask("a table needs at least two samples".into()));
    }
    let dx = xs[1] - xs[0];
    if !(dx > 0.0) {
        return Err(ChurError::InvalidMask("x must increase".into()));
    }
    for (i, w) in xs.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.max(1.0) {
            return Err(ChurError::InvalidMask(format!("non-uniform x spacing at sample {}", i + 1)));
        }
    }
    Ok(MaskTable { x0: xs[0], dx, values })
}

pub fn read_mask_table(path: &Path) -> Result<MaskTable> {
    parse_mask_table(&std::fs::read_to_string(path)?)
}

pub fn format_mask_table(table: &MaskTable) -> String {
    let mut out = String::new();
    for (i, v) in table.values.iter().enumerate() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", table.x0 + i as f64 * table.dx, v.re, v.im);
    }
    out
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect()
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| parse_err(line, &format!("`{s}` is not a number")))
}

fn parse_err(line: usize, message: &str) -> ChurError {
    ChurError::Parse { line: line + 1, message: message.into() }
}
