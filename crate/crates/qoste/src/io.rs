//! CSV and JSON file formats.
//!
//! Floats are written in shortest round-trip form, so every file reads back
//! bit-for-bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use qoste_core::propagation::Trajectory;
use qoste_core::{ControlWaveform, PauliCoeffs, Protocol, StateVector, Tabulated, TimeGrid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PROTOCOL_COLUMNS: [&str; 5] = ["t", "c0", "cx", "cy", "cz"];
pub const TRAJECTORY_COLUMNS: [&str; 8] = ["t", "re_a", "im_a", "re_b", "im_b", "x", "y", "z"];
pub const WAVEFORM_COLUMNS: [&str; 4] = ["t_mid", "vx", "vy", "vz"];
pub const SCAN_COLUMNS: [&str; 2] = ["eta", "fidelity"];

/// First line of a waveform CSV, after `# `.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformHeader {
    pub omega_i: f64,
    pub t_f: f64,
    pub n_steps: usize,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Output {
        path: path.to_owned(),
        source,
    })
}

fn write_failed(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Output {
        path: path.to_owned(),
        source: e.into(),
    }
}

fn write_table<W: Write>(path: &Path, out: W, columns: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(write_failed(path))?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string()))
            .map_err(write_failed(path))?;
    }
    w.flush().map_err(|source| Error::Output {
        path: path.to_owned(),
        source,
    })
}

/// Rows of a headed numeric table with their 1-based file line numbers.
fn read_table(path: &Path, text: &str, columns: &[&str], line_offset: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::input(path, Some(line_offset + 1), e.to_string()))?;
    if header.iter().ne(columns.iter().copied()) {
        return Err(Error::input(
            path,
            Some(line_offset + 1),
            format!(
                "expected header `{}`, found `{}`",
                columns.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize + line_offset);
            Error::input(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize) + line_offset;
        let values = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::input(
                        path,
                        Some(line),
                        format!("column `{}`: cannot parse `{field}`", columns[j]),
                    )
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(path, None, e.to_string()))
}

/// Loads a tabulated protocol (`t,c0,cx,cy,cz`).
pub fn read_protocol_csv(path: &Path) -> Result<Protocol> {
    let rows = read_table(path, &read_text(path)?, &PROTOCOL_COLUMNS, 0)?;
    let lines: Vec<usize> = rows.iter().map(|(l, _)| *l).collect();
    let times = rows.iter().map(|(_, r)| r[0]).collect();
    let coeffs = rows
        .iter()
        .map(|(_, r)| PauliCoeffs::new(r[1], r[2], r[3], r[4]))
        .collect();
    match Tabulated::new(times, coeffs) {
        Ok(t) => Ok(Protocol::Tabulated(t)),
        Err(qoste_core::Error::InvalidTable { row, reason }) => {
            let line = lines.get(row).copied().or(lines.last().copied()).unwrap_or(1);
            Err(Error::input(path, Some(line), reason))
        }
        Err(e) => Err(Error::input(path, None, e.to_string())),
    }
}

pub fn write_protocol_csv(path: &Path, tab: &Tabulated) -> Result<()> {
    let rows = tab
        .times()
        .iter()
        .zip(tab.coeffs())
        .map(|(t, c)| vec![*t, c.c0, c.cx, c.cy, c.cz]);
    write_table(path, create(path)?, &PROTOCOL_COLUMNS, rows)
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let rows = traj.states.iter().enumerate().map(|(k, s)| {
        let b = s.bloch_unchecked();
        vec![traj.grid.t(k), s.a.re, s.a.im, s.b.re, s.b.im, b.x, b.y, b.z]
    });
    write_table(path, create(path)?, &TRAJECTORY_COLUMNS, rows)
}

/// Reads a trajectory; the time column must be a uniform grid starting at 0.
pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let rows = read_table(path, &read_text(path)?, &TRAJECTORY_COLUMNS, 0)?;
    if rows.len() < 2 {
        return Err(Error::input(path, None, "need at least two rows"));
    }
    let t_f = rows[rows.len() - 1].1[0];
    let grid = TimeGrid::new(t_f, rows.len() - 1).map_err(|e| Error::input(path, None, e.to_string()))?;
    let mut states = Vec::with_capacity(rows.len());
    for (k, (line, r)) in rows.iter().enumerate() {
        if (r[0] - grid.t(k)).abs() > 1e-9 * t_f {
            return Err(Error::input(
                path,
                Some(*line),
                "time column is not a uniform grid from 0",
            ));
        }
        states.push(StateVector::new(Complex64::new(r[1], r[2]), Complex64::new(r[3], r[4])));
    }
    Ok(Trajectory { grid, states })
}

pub fn write_waveform_csv(path: &Path, w: &ControlWaveform) -> Result<()> {
    let header = WaveformHeader {
        omega_i: w.omega_i,
        t_f: w.grid.t_f(),
        n_steps: w.grid.n_steps(),
    };
    let mut out = create(path)?;
    let json = serde_json::to_string(&header).expect("header serializes");
    writeln!(out, "# {json}").map_err(|source| Error::Output {
        path: path.to_owned(),
        source,
    })?;
    let rows =
        w.v.iter()
            .enumerate()
            .map(|(k, v)| vec![w.grid.t_mid(k), v[0], v[1], v[2]]);
    write_table(path, out, &WAVEFORM_COLUMNS, rows)
}

pub fn read_waveform_csv(path: &Path) -> Result<ControlWaveform> {
    let text = read_text(path)?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let json = first
        .trim_end()
        .strip_prefix('#')
        .ok_or_else(|| Error::input(path, Some(1), "missing `# {json}` header line"))?;
    let header: WaveformHeader =
        serde_json::from_str(json.trim()).map_err(|e| Error::input(path, Some(1), format!("header: {e}")))?;
    let grid = TimeGrid::new(header.t_f, header.n_steps).map_err(|e| Error::input(path, Some(1), e.to_string()))?;
    let rows = read_table(path, rest, &WAVEFORM_COLUMNS, 1)?;
    if rows.len() != header.n_steps {
        return Err(Error::input(
            path,
            None,
            format!("header says {} steps, found {} rows", header.n_steps, rows.len()),
        ));
    }
    let mut v = Vec::with_capacity(rows.len());
    for (k, (line, r)) in rows.iter().enumerate() {
        if (r[0] - grid.t_mid(k)).abs() > 1e-9 * header.t_f {
            return Err(Error::input(path, Some(*line), "t_mid does not match the header grid"));
        }
        v.push([r[1], r[2], r[3]]);
    }
    ControlWaveform::new(grid, v, header.omega_i).map_err(|e| Error::input(path, Some(1), e.to_string()))
}

pub fn write_scan_csv(path: &Path, scan: &[(f64, f64)]) -> Result<()> {
    write_table(
        path,
        create(path)?,
        &SCAN_COLUMNS,
        scan.iter().map(|(e, f)| vec![*e, *f]),
    )
}

pub fn read_scan_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let rows = read_table(path, &read_text(path)?, &SCAN_COLUMNS, 0)?;
    Ok(rows.into_iter().map(|(_, r)| (r[0], r[1])).collect())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    let fail = |source| Error::Output {
        path: path.to_owned(),
        source,
    };
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| fail(e.into()))?;
    writeln!(out).map_err(fail)?;
    out.flush().map_err(fail)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::input(path, Some(e.line()), e.to_string()))
}
