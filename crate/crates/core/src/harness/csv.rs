//! Trajectory CSV: `t`, populations, real and imaginary parts of the upper
//! triangle (row-major), then the three diagnostics. Numbers carry 17
//! significant digits, so parsing and re-emitting is byte-identical.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::density::Diagnostics;
use crate::error::{Error, Result};
use crate::splitting::Trajectory;

pub fn csv_header(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|j| format!("rho_{j}_{j}")));
    for j in 1..=n {
        for k in j + 1..=n {
            cols.push(format!("re_rho_{j}_{k}"));
            cols.push(format!("im_rho_{j}_{k}"));
        }
    }
    cols.extend(["hermiticity_defect", "trace_error", "min_eigenvalue"].map(String::from));
    cols
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(traj.n_levels))?;
    for k in 0..traj.len() {
        let mut row = vec![num(traj.times[k])];
        row.extend(traj.populations[k].iter().copied().map(num));
        for z in &traj.coherences[k] {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        let d = &traj.diagnostics[k];
        row.extend([d.hermiticity_defect, d.trace_error, d.min_eigenvalue].map(num));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(traj, BufWriter::new(file)).map_err(|e| Error::io(path, e.into()))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Trajectory> {
    let bad = |msg: String| Error::Config(format!("trajectory CSV: {msg}"));
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let cols = header.len();
    let n = ((cols as f64 - 4.0).max(0.0)).sqrt().round() as usize;
    if n < 2 || n * n + 4 != cols {
        return Err(bad(format!(
            "{cols} columns do not describe an N-level trajectory"
        )));
    }
    let expected = csv_header(n);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(bad("unexpected column names".into()));
    }
    let mut traj = Trajectory::new(n);
    for record in r.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let v: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}"))))
            .collect::<Result<_>>()?;
        let n_coh = n * (n - 1) / 2;
        let coh_start = 1 + n;
        let d = Diagnostics {
            hermiticity_defect: v[cols - 3],
            trace_error: v[cols - 2],
            min_eigenvalue: v[cols - 1],
        };
        traj.times.push(v[0]);
        traj.populations.push(v[1..coh_start].to_vec());
        traj.coherences.push(
            (0..n_coh)
                .map(|i| Complex64::new(v[coh_start + 2 * i], v[coh_start + 2 * i + 1]))
                .collect(),
        );
        traj.diagnostics.push(d);
        traj.observe(&d);
    }
    Ok(traj)
}

/// Writes any serializable rows (benchmark or report rows) with a header.
pub fn emit_rows<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row).map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
