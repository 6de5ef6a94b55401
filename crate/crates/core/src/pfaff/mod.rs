//! Numeric construction of the change of variables: integrate the Pfaff
//! system for T, integrate T to the new coordinates, and check the result.

mod grid;
mod integrate;
mod numeric;
mod verify;

use std::fmt::Debug;
use std::io::{self, BufRead, Write};

pub use grid::{Axis, GridSpec};
pub use integrate::{
    integrate_coordinates, integrate_t, path_independence_check, DroppedPoint, GridPoint, GridSolution, DET_THRESHOLD,
};
pub use verify::{verify_diffusion_form, DiffusionCheck};

use crate::scalar::Field;

/// Floating-point scalars usable by the integrator.
pub trait Real: num_traits::Float + Field + Send + Sync + Debug + 'static {}

impl<T: num_traits::Float + Field + Send + Sync + Debug + 'static> Real for T {}

/// Writes one row per retained grid point: the y coordinates, the ỹ
/// components and the entries of T in row-major order, with 17 significant
/// digits. `names` labels the y columns.
pub fn write_table<F: Real, W: Write>(sol: &GridSolution<F>, names: &[String], mut out: W) -> io::Result<()> {
    let n = sol.dim();
    let mut header: Vec<String> = names.iter().take(n).cloned().collect();
    header.extend((1..=n).map(|m| format!("ytilde{m}")));
    for m in 1..=n {
        header.extend((1..=n).map(|p| format!("T{m}_{p}")));
    }
    writeln!(out, "{}", header.join("\t"))?;
    for p in &sol.points {
        let row: Vec<String> = p
            .y
            .iter()
            .chain(&p.ytilde)
            .chain(p.t.entries())
            .map(|v| format!("{:.16e}", v.to_f64().unwrap_or(f64::NAN)))
            .collect();
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

/// Reads back a table written by [`write_table`]: the header and the rows.
pub fn read_table<R: BufRead>(input: R) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(h) => h?.split('\t').map(str::to_string).collect::<Vec<_>>(),
        None => return Ok((Vec::new(), Vec::new())),
    };
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split('\t')
            .map(|s| s.parse::<f64>().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
            .collect::<io::Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "row width differs from header"));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
