use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::State;
use crate::scalar::Real;
use crate::trajectory::{Scheme, StepDiagnostics, Trajectory};

pub const TRAJECTORY_HEADER: &str = "step,t_days,S,A,I,Q,H,Hbar,D,N,lambda";

/// Writes the CSV form: one `#` metadata line, the header, then one row per
/// stored state in 17-significant-digit scientific notation.
pub fn write_trajectory_to<T: Real>(traj: &Trajectory<T>, mut out: impl Write) -> std::io::Result<()> {
    write!(out, "# scheme={} h={:?}", traj.scheme, traj.h.as_f64())?;
    if let Some(d) = traj.start_date {
        write!(out, " t0_date={}", d.format("%Y-%m-%d"))?;
    }
    writeln!(out)?;
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (n, (s, d)) in traj.states.iter().zip(&traj.diagnostics).enumerate() {
        write!(out, "{n},{:.16e}", traj.time(n).as_f64())?;
        for v in s.compartments() {
            write!(out, ",{:.16e}", v.as_f64())?;
        }
        writeln!(
            out,
            ",{:.16e},{:.16e},{:.16e}",
            s.deaths.as_f64(),
            d.population.as_f64(),
            d.force_of_infection.as_f64()
        )?;
    }
    out.flush()
}

pub fn write_trajectory<T: Real>(traj: &Trajectory<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trajectory_to(traj, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

fn parse_metadata(line: &str, origin: &str) -> Result<(Scheme, f64, Option<NaiveDate>)> {
    let bad = |message: String| Error::Data {
        path: origin.to_string(),
        row: 0,
        message,
    };
    let mut scheme = None;
    let mut h = None;
    let mut date = None;
    for field in line.trim_start_matches('#').split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("bad metadata field `{field}`")))?;
        match k {
            "scheme" => scheme = Some(v.parse::<Scheme>().map_err(bad)?),
            "h" => h = Some(v.parse::<f64>().map_err(|e| bad(format!("bad h: {e}")))?),
            "t0_date" => {
                date = Some(
                    NaiveDate::parse_from_str(v, "%Y-%m-%d")
                        .map_err(|e| bad(format!("bad t0_date: {e}")))?,
                )
            }
            _ => {}
        }
    }
    Ok((
        scheme.ok_or_else(|| bad("metadata lacks scheme".into()))?,
        h.ok_or_else(|| bad("metadata lacks h".into()))?,
        date,
    ))
}

/// Reads a trajectory written by [`write_trajectory`]. Solve residuals are
/// not stored and come back as zero.
pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory<f64>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    if !first.starts_with('#') {
        return Err(Error::Data {
            path: origin,
            row: 0,
            message: "missing `# scheme=... h=...` metadata line".into(),
        });
    }
    let (scheme, h, start_date) = parse_metadata(&first, &origin)?;

    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Data {
            path: origin.clone(),
            row: 0,
            message: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != TRAJECTORY_HEADER {
        return Err(Error::Data {
            path: origin,
            row: 0,
            message: format!("expected header `{TRAJECTORY_HEADER}`, got `{header}`"),
        });
    }
    let mut states = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let row = idx + 1;
        let err = |message: String| Error::Data {
            path: origin.clone(),
            row,
            message,
        };
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .skip(2)
            .map(|f| f.parse::<f64>().map_err(|e| err(format!("`{f}`: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 9 {
            return Err(err(format!("expected 11 fields, got {}", vals.len() + 2)));
        }
        states.push(State::from_compartments(
            [vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]],
            vals[6],
        ));
        diagnostics.push(StepDiagnostics {
            population: vals[7],
            force_of_infection: vals[8],
            solve_residual: 0.0,
        });
    }
    if states.is_empty() {
        return Err(Error::Data {
            path: origin,
            row: 0,
            message: "no data rows".into(),
        });
    }
    Ok(Trajectory {
        scheme,
        h,
        start_date,
        states,
        diagnostics,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_report<R: Serialize>(report: &R, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
