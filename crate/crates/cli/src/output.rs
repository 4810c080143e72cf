//! Artifact writers.
//!
//! Everything goes through the core's atomic writer, so a failing command
//! never leaves a partial file behind. CSV cells carry 17 significant
//! digits with `.` decimals and LF line endings, which round-trips f64
//! exactly; JSON uses serde's shortest exact representation. Identical
//! runs therefore produce byte-identical artifacts.

use std::io::Write as _;
use std::path::Path;

use freeflow_core::energy::EnergyBreakdown;
use freeflow_core::io::{write_atomic, write_density_csv, write_ensemble_csv};
use freeflow_core::measures::{Density1D, ParticleEnsemble, TransportMap1D};
use freeflow_core::{Error, Result};
use serde::Serialize;

use crate::config::OutputFormat;

/// 17 significant digits: one leading digit plus 16 after the point.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes `doc` as pretty JSON with a trailing newline, atomically.
pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    write_atomic(path, |buf| {
        serde_json::to_writer_pretty(&mut *buf, doc).map_err(|e| Error::Io {
            path: path.display().to_string(),
            why: e.to_string(),
        })?;
        buf.push(b'\n');
        Ok(())
    })
}

#[derive(Serialize)]
struct DensityDoc {
    x: Vec<f64>,
    rho: Vec<f64>,
}

/// Density artifact in the chosen encoding.
pub fn write_density(path: &Path, rho: &Density1D<f64>, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => write_density_csv(path, rho),
        OutputFormat::Json => write_json(
            path,
            &DensityDoc {
                x: rho.grid().centers(),
                rho: rho.values().to_vec(),
            },
        ),
    }
}

#[derive(Serialize)]
struct EnsembleDoc {
    time: f64,
    positions: Vec<f64>,
}

/// Particle-ensemble artifact in the chosen encoding.
pub fn write_ensemble(
    path: &Path,
    ens: &ParticleEnsemble<f64>,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_ensemble_csv(path, ens),
        OutputFormat::Json => write_json(
            path,
            &EnsembleDoc {
                time: ens.time(),
                positions: ens.positions().to_vec(),
            },
        ),
    }
}

#[derive(Serialize)]
struct EnergyDoc {
    time: Vec<f64>,
    entropy: Vec<f64>,
    potential: Vec<f64>,
    total: Vec<f64>,
}

/// Energy trace: `time,entropy,potential,total` per snapshot.
pub fn write_energy_trace(
    path: &Path,
    times: &[f64],
    rows: &[EnergyBreakdown<f64>],
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_atomic(path, |buf| {
            buf.extend_from_slice(b"time,entropy,potential,total\n");
            for (t, row) in times.iter().zip(rows) {
                writeln!(
                    buf,
                    "{},{},{},{}",
                    sig17(*t),
                    sig17(row.entropy_term),
                    sig17(row.potential_term),
                    sig17(row.total)
                )
                .expect("in-memory write");
            }
            Ok(())
        }),
        OutputFormat::Json => write_json(
            path,
            &EnergyDoc {
                time: times.to_vec(),
                entropy: rows.iter().map(|r| r.entropy_term).collect(),
                potential: rows.iter().map(|r| r.potential_term).collect(),
                total: rows.iter().map(|r| r.total).collect(),
            },
        ),
    }
}

#[derive(Serialize)]
struct SliceDoc {
    t: f64,
    x: Vec<f64>,
    rho: Vec<f64>,
}

/// Interpolation slices: long-format `t,x,rho` rows (CSV) or one JSON
/// object per parameter value.
pub fn write_slices(
    path: &Path,
    slices: &[(f64, Density1D<f64>)],
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_atomic(path, |buf| {
            buf.extend_from_slice(b"t,x,rho\n");
            for (t, rho) in slices {
                let grid = rho.grid();
                for (i, &v) in rho.values().iter().enumerate() {
                    writeln!(buf, "{},{},{}", sig17(*t), sig17(grid.center(i)), sig17(v))
                        .expect("in-memory write");
                }
            }
            Ok(())
        }),
        OutputFormat::Json => {
            let docs: Vec<SliceDoc> = slices
                .iter()
                .map(|(t, rho)| SliceDoc {
                    t: *t,
                    x: rho.grid().centers(),
                    rho: rho.values().to_vec(),
                })
                .collect();
            write_json(path, &docs)
        }
    }
}

/// Transport map table: `x,map` per source cell.
pub fn write_map_csv(path: &Path, map: &TransportMap1D<f64>) -> Result<()> {
    write_atomic(path, |buf| {
        buf.extend_from_slice(b"x,map\n");
        let grid = map.grid();
        for (i, &v) in map.values().iter().enumerate() {
            writeln!(buf, "{},{}", sig17(grid.center(i)), sig17(v)).expect("in-memory write");
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [
            1.0 / 3.0,
            std::f64::consts::PI,
            -2.2250738585072014e-308,
            6.02214076e23,
        ] {
            let s = sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(sig17(0.5), "5.0000000000000000e-1");
    }
}
