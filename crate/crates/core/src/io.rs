//! CSV and JSON formats.
//!
//! Floats are written in the shortest form that parses back to the same
//! double, so `parse(emit(x)) == x` bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field2d::{Field2D, PolarGrid};
use crate::grid::RadialGrid;
use crate::qtensor::QTensor;
use crate::reduced::{OdeResidual, Profile};

pub const PROFILE_HEADER: &str = "r,u,v";
pub const FIELD_HEADER: &str = "r,phi,q11,q12,q13,q22,q23";

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_row(out: &mut String, vals: &[f64]) {
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*v));
    }
    out.push('\n');
}

pub fn profile_to_csv(p: &Profile) -> String {
    let mut out = String::with_capacity(64 * p.len());
    writeln!(out, "{PROFILE_HEADER}").unwrap();
    for i in 0..p.len() {
        write_row(&mut out, &[p.grid.r(i), p.u[i], p.v[i]]);
    }
    out
}

/// Data rows of a CSV with the given header: `(line number, fields)`.
fn rows(text: &str, header: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (line, first) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let got: String = first
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",");
    if got != header {
        return Err(Error::Parse {
            line,
            message: format!("expected header '{header}', found '{first}'"),
        });
    }
    let width = header.split(',').count();
    let mut out = Vec::new();
    for (line, l) in lines {
        if l.is_empty() {
            continue;
        }
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let vals = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("'{f}' is not a finite number"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push((line, vals));
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(out)
}

fn grid_error(line: usize, e: Error) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    let rows = rows(text, PROFILE_HEADER)?;
    let last = rows.last().map(|r| r.0).unwrap_or(1);
    let mut r = Vec::with_capacity(rows.len());
    let mut u = Vec::with_capacity(rows.len());
    let mut v = Vec::with_capacity(rows.len());
    for (_, vals) in &rows {
        r.push(vals[0]);
        u.push(vals[1]);
        v.push(vals[2]);
    }
    let grid = RadialGrid::from_nodes(r).map_err(|e| grid_error(last, e))?;
    Profile::new(grid, u, v)
}

pub fn read_profile(path: &Path) -> Result<Profile> {
    parse_profile(&fs::read_to_string(path)?)
}

pub fn field_to_csv(f: &Field2D) -> String {
    let m = f.grid.angular();
    let mut out = String::with_capacity(128 * f.values.len());
    writeln!(out, "{FIELD_HEADER}").unwrap();
    for (i, &r) in f.grid.radial().nodes().iter().enumerate() {
        for j in 0..m {
            let q = f.values[i * m + j].to_array();
            write_row(&mut out, &[r, f.grid.phi(j), q[0], q[1], q[2], q[3], q[4]]);
        }
    }
    out
}

pub fn parse_field(text: &str) -> Result<Field2D> {
    let rows = rows(text, FIELD_HEADER)?;
    let r0 = rows[0].1[0];
    let m = rows.iter().take_while(|(_, v)| v[0] == r0).count();
    if rows.len() % m != 0 {
        return Err(Error::Parse {
            line: rows.last().unwrap().0,
            message: format!("{} rows do not form rings of {m} angles", rows.len()),
        });
    }
    let mut nodes = Vec::with_capacity(rows.len() / m);
    for ring in rows.chunks(m) {
        let r = ring[0].1[0];
        if let Some((line, _)) = ring.iter().find(|(_, v)| v[0] != r) {
            return Err(Error::Parse {
                line: *line,
                message: "ring rows must share one radius".into(),
            });
        }
        nodes.push(r);
    }
    let radial = RadialGrid::from_nodes(nodes).map_err(|e| grid_error(rows[0].0, e))?;
    let grid = PolarGrid::new(radial, m).map_err(|e| grid_error(rows[0].0, e))?;
    for (idx, (line, v)) in rows.iter().enumerate() {
        let expected = grid.phi(idx % m);
        if (v[1] - expected).abs() > 1e-12 {
            return Err(Error::Parse {
                line: *line,
                message: format!("angle {} does not match the uniform angle {expected}", v[1]),
            });
        }
    }
    let values = rows
        .iter()
        .map(|(_, v)| QTensor::from_array([v[2], v[3], v[4], v[5], v[6]]))
        .collect();
    Field2D::new(grid, values)
}

pub fn read_field(path: &Path) -> Result<Field2D> {
    parse_field(&fs::read_to_string(path)?)
}

/// `r,ru,rv` per node.
pub fn residual_to_csv(grid: &RadialGrid, res: &OdeResidual) -> String {
    let mut out = String::new();
    writeln!(out, "r,ru,rv").unwrap();
    for i in 0..grid.len() {
        write_row(&mut out, &[grid.r(i), res.ru[i], res.rv[i]]);
    }
    out
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "no file name"))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}
