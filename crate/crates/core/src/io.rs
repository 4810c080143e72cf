//! CSV readers and writers for the measure types. All numeric output uses
//! 17 significant digits (`{:.16e}`) so that a written file reproduces the
//! in-memory values bit for bit on read-back, with `.` decimal separators
//! and LF line endings. Writers stage into a sibling temp file and rename on
//! success, so a failed run never leaves a partial artifact behind.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::measures::{Density1D, Grid1D, ParticleEnsemble};
use crate::scalar::{as_f64, cast, Scalar};

fn io_err(path: &Path, err: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        why: err.to_string(),
    }
}

fn parse_err(path: &Path, line: usize, why: impl Into<String>) -> Error {
    Error::Io {
        path: path.display().to_string(),
        why: format!("line {line}: {}", why.into()),
    }
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| ".out".into());
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes `render`'s output to `path` atomically: the content goes to a
/// temp file first and is renamed over the target only once fully written.
pub fn write_atomic(path: &Path, render: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    render(&mut buf)?;
    let tmp = temp_sibling(path);
    fs::write(&tmp, &buf).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path, e)
    })
}

/// Density CSV: header `x,rho`, one row per cell center.
pub fn write_density_csv<S: Scalar>(path: &Path, rho: &Density1D<S>) -> Result<()> {
    write_atomic(path, |buf| {
        buf.extend_from_slice(b"x,rho\n");
        let grid = rho.grid();
        for (i, &v) in rho.values().iter().enumerate() {
            writeln!(buf, "{:.16e},{:.16e}", as_f64(grid.center(i)), as_f64(v))
                .expect("in-memory write");
        }
        Ok(())
    })
}

/// Ensemble CSV: header `x`, one row per particle.
pub fn write_ensemble_csv<S: Scalar>(path: &Path, ens: &ParticleEnsemble<S>) -> Result<()> {
    write_atomic(path, |buf| {
        buf.extend_from_slice(b"x\n");
        for &x in ens.positions() {
            writeln!(buf, "{:.16e}", as_f64(x)).expect("in-memory write");
        }
        Ok(())
    })
}

/// Reads a density CSV written by [`write_density_csv`] back onto `grid`.
/// The file's x column must match the grid's cell centers.
pub fn read_density_csv<S: Scalar>(path: &Path, grid: Grid1D<S>) -> Result<Density1D<S>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x,rho" => {}
        other => {
            return Err(parse_err(
                path,
                other.map(|(i, _)| i + 1).unwrap_or(1),
                "expected header `x,rho`",
            ))
        }
    }
    let mut values = Vec::with_capacity(grid.cells());
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (xs, rs) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, i + 1, "expected two comma-separated fields"))?;
        let x: f64 = xs
            .trim()
            .parse()
            .map_err(|e| parse_err(path, i + 1, format!("bad x value: {e}")))?;
        let r: f64 = rs
            .trim()
            .parse()
            .map_err(|e| parse_err(path, i + 1, format!("bad rho value: {e}")))?;
        let k = values.len();
        if k >= grid.cells() {
            return Err(parse_err(path, i + 1, "more rows than grid cells"));
        }
        let center = as_f64(grid.center(k));
        if (x - center).abs() > 1e-9 * (1.0 + center.abs()) {
            return Err(parse_err(
                path,
                i + 1,
                format!("x = {x} does not match grid center {center}"),
            ));
        }
        values.push(cast::<S>(r));
    }
    if values.len() != grid.cells() {
        return Err(Error::InsufficientData {
            needed: grid.cells(),
            got: values.len(),
        });
    }
    Density1D::new(grid, values)
}

/// Reads an ensemble CSV written by [`write_ensemble_csv`].
pub fn read_ensemble_csv<S: Scalar>(path: &Path) -> Result<ParticleEnsemble<S>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x" => {}
        other => {
            return Err(parse_err(
                path,
                other.map(|(i, _)| i + 1).unwrap_or(1),
                "expected header `x`",
            ))
        }
    }
    let mut positions = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|e| parse_err(path, i + 1, format!("bad position: {e}")))?;
        positions.push(cast::<S>(x));
    }
    ParticleEnsemble::new(positions, S::zero())
}
