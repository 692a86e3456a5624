//! CSV and binary formats for sampled functions.
//!
//! CSV: header `coord_1,..,coord_d,re,im`, one row per sample in row-major
//! order. Binary: the 8-byte magic `HPHASE01`, `dim` and `points` as
//! little-endian `u32` (16 bytes in all), the extent as `f64`, then
//! interleaved `re, im` little-endian `f64` pairs.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use super::{Field, GridSpec};
use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: &[u8; 8] = b"HPHASE01";

pub fn to_csv_string(f: &Field) -> String {
    let spec = f.spec;
    let mut s = String::new();
    for a in 1..=spec.dim {
        let _ = write!(s, "coord_{a},");
    }
    s.push_str("re,im\n");
    let mut idx = vec![0usize; spec.dim];
    for (k, v) in f.values.iter().enumerate() {
        spec.unravel(k, &mut idx);
        for &i in &idx {
            let _ = write!(s, "{},", spec.coord(i));
        }
        let _ = writeln!(s, "{},{}", v.re, v.im);
    }
    s
}

pub fn write_csv(f: &Field, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(f))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Field> {
    parse_csv(&std::fs::read_to_string(path)?)
}

/// Parses the CSV format, recovering the grid from the coordinate columns.
pub fn parse_csv(text: &str) -> Result<Field> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = cols.len().checked_sub(2).filter(|&d| d > 0).ok_or(Error::Parse {
        line: 1,
        msg: "header needs coord columns plus re,im".into(),
    })?;
    for (a, c) in cols[..dim].iter().enumerate() {
        if *c != format!("coord_{}", a + 1) {
            return Err(Error::Parse { line: 1, msg: format!("unexpected column '{c}'") });
        }
    }
    if cols[dim] != "re" || cols[dim + 1] != "im" {
        return Err(Error::Parse { line: 1, msg: "last columns must be re,im".into() });
    }
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 2 {
            return Err(Error::Parse {
                line: ln + 1,
                msg: format!("expected {} columns, found {}", dim + 2, fields.len()),
            });
        }
        let nums: std::result::Result<Vec<f64>, _> = fields.iter().map(|v| v.parse::<f64>()).collect();
        let nums = nums.map_err(|e| Error::Parse { line: ln + 1, msg: e.to_string() })?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse { line: ln + 1, msg: "non-finite value".into() });
        }
        coords.push(nums[..dim].to_vec());
        values.push(C64::new(nums[dim], nums[dim + 1]));
    }
    let points = (values.len() as f64).powf(1.0 / dim as f64).round() as usize;
    if points.pow(dim as u32) != values.len() || points < 2 {
        return Err(Error::Parse { line: 0, msg: format!("{} rows do not form a {dim}-d cube", values.len()) });
    }
    let t0 = coords[0][dim - 1];
    let t1 = coords[1][dim - 1];
    let spacing = t1 - t0;
    let extent = -t0;
    if !(spacing > 0.0) || (points as f64 * spacing - 2.0 * extent).abs() > 1e-9 * extent.max(1.0) {
        return Err(Error::Parse { line: 2, msg: "coordinates are not a symmetric uniform lattice".into() });
    }
    let spec = GridSpec::new(dim, extent, points).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    let mut idx = vec![0usize; dim];
    for (k, c) in coords.iter().enumerate() {
        spec.unravel(k, &mut idx);
        for (a, &i) in idx.iter().enumerate() {
            if (c[a] - spec.coord(i)).abs() > 1e-9 * spec.extent.max(1.0) {
                return Err(Error::Parse { line: k + 2, msg: "row out of lattice order".into() });
            }
        }
    }
    Field::from_values(spec, values)
}

pub fn write_binary(f: &Field, w: &mut impl Write) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(f.spec.dim as u32).to_le_bytes())?;
    w.write_all(&(f.spec.points as u32).to_le_bytes())?;
    w.write_all(&f.spec.extent.to_le_bytes())?;
    for v in &f.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(r: &mut impl Read) -> Result<Field> {
    let mut head = [0u8; 24];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(Error::Parse { line: 0, msg: "bad magic".into() });
    }
    let dim = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let points = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    let extent = f64::from_le_bytes(head[16..24].try_into().unwrap());
    let spec = GridSpec::new(dim, extent, points)?;
    let mut raw = vec![0u8; spec.len() * 16];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::from_values(spec, values)
}

pub fn save_binary(f: &Field, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 16 * f.len());
    write_binary(f, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_binary(path: &Path) -> Result<Field> {
    let bytes = std::fs::read(path)?;
    read_binary(&mut bytes.as_slice())
}
