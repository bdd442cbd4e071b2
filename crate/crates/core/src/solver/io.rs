//! Plain-text snapshot dumps.
//!
//! ```text
//! # sqg-snapshot v1
//! n <n>
//! box_len <L>
//! alpha <α>
//! t <t>
//! <re> <im>        (n² lines, FFT-ordered, row-major over (j1, j2))
//! ```
//!
//! Coefficients use the unnormalized forward transform: the Fourier-series
//! amplitude of mode `j` is `c_j / n²`. Floats are written in shortest
//! round-trip form, so a dump reads back bit-identically.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lattice::{make_lattice, FrequencyLattice};

pub const SNAPSHOT_MAGIC: &str = "# sqg-snapshot v1";

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralField, alpha: f64, t: f64) -> std::io::Result<()> {
    let lat = field.lattice();
    writeln!(w, "{SNAPSHOT_MAGIC}")?;
    writeln!(w, "n {}", lat.n())?;
    writeln!(w, "box_len {:?}", lat.box_len())?;
    writeln!(w, "alpha {alpha:?}")?;
    writeln!(w, "t {t:?}")?;
    for c in field.coeffs() {
        writeln!(w, "{:?} {:?}", c.re, c.im)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SnapshotDump {
    pub field: SpectralField,
    pub alpha: f64,
    pub t: f64,
}

fn header<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| SqgError::Parse(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| SqgError::Parse(format!("expected `{key} <value>`, got `{line}`")))
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| SqgError::Parse(format!("bad number `{s}`")))
}

pub fn read_snapshot<R: BufRead>(r: R) -> Result<SnapshotDump> {
    read_snapshot_on(r, None)
}

/// Reads a dump, reusing `lattice` when it matches the header.
pub fn read_snapshot_on<R: BufRead>(r: R, lattice: Option<&Arc<FrequencyLattice>>) -> Result<SnapshotDump> {
    let lines: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut it = lines.iter().map(String::as_str);
    if it.next() != Some(SNAPSHOT_MAGIC) {
        return Err(SqgError::Parse("not an sqg snapshot".into()));
    }
    let n: usize = num(header(it.next(), "n")?)?;
    let box_len: f64 = num(header(it.next(), "box_len")?)?;
    let alpha: f64 = num(header(it.next(), "alpha")?)?;
    let t: f64 = num(header(it.next(), "t")?)?;
    let lat = match lattice {
        Some(l) if l.n() == n && l.box_len() == box_len => l.clone(),
        _ => make_lattice(n, box_len)?,
    };
    let coeffs = it
        .map(|line| {
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => Ok(Complex64::new(num(a)?, num(b)?)),
                _ => Err(SqgError::Parse(format!("bad coefficient line `{line}`"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let field = SpectralField::from_coeffs(&lat, coeffs)?;
    Ok(SnapshotDump { field, alpha, t })
}
