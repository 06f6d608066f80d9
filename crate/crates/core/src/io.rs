//! File formats.
//!
//! * Point clouds: CSV with a header `x0,x1,...` and one point per row.
//! * Distance matrices: `n` rows of `n` comma-separated reals, no header.
//! * Regions: one point index per line; blank lines are skipped.
//! * Paths: CSV rows `t,x,y`, with an optional `t,x,y` header.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::metric::{validate_metric, FiniteMetricSpace};
use crate::quasigeodesic::PlPath;
use crate::region::Region;
use crate::table::format_real;

fn reader(trim: bool, headers: bool) -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.has_headers(headers).flexible(true);
    if trim {
        b.trim(csv::Trim::All);
    }
    b
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("`{field}` is not a number"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse {
            line,
            msg: format!("`{field}` is not finite"),
        })
    }
}

fn line_of(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

pub fn read_point_cloud<R: Read>(input: R) -> Result<PointCloud> {
    let mut rdr = reader(true, true).from_reader(input);
    let dim = rdr.headers()?.len();
    let mut coords = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != dim {
            return Err(Error::Parse {
                line,
                msg: format!("{} fields, expected {dim}", record.len()),
            });
        }
        for field in &record {
            coords.push(parse_real(field, line)?);
        }
    }
    PointCloud::from_flat(dim, coords)
}

/// Reads a matrix and rejects it unless it passes [`validate_metric`].
/// Coincident distinct points are accepted.
pub fn read_matrix<R: Read>(input: R) -> Result<FiniteMetricSpace> {
    let space = read_raw_matrix(input)?;
    match validate_metric(&space).violation {
        Some(v) => Err(Error::InvalidMetric(v)),
        None => Ok(space),
    }
}

/// Reads a square matrix of finite reals without checking the axioms.
pub fn read_raw_matrix<R: Read>(input: R) -> Result<FiniteMetricSpace> {
    let mut rdr = reader(true, false).from_reader(input);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        rows.push(
            record
                .iter()
                .map(|f| parse_real(f, line))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    FiniteMetricSpace::from_matrix(&rows)
}

pub fn read_region<R: Read>(input: R, ambient: usize) -> Result<Region> {
    let mut members = Vec::new();
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        members.push(s.parse::<usize>().map_err(|_| Error::Parse {
            line: k + 1,
            msg: format!("`{s}` is not a point index"),
        })?);
    }
    Region::new(ambient, members)
}

pub fn read_path<R: Read>(input: R) -> Result<PlPath> {
    let mut rdr = reader(true, false).from_reader(input);
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        if k == 0 && record.iter().collect::<Vec<_>>() == ["t", "x", "y"] {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("{} fields, expected t,x,y", record.len()),
            });
        }
        params.push(parse_real(&record[0], line)?);
        points.push([parse_real(&record[1], line)?, parse_real(&record[2], line)?]);
    }
    PlPath::new(params, points)
}

pub fn write_point_cloud<W: Write>(cloud: &PointCloud, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((0..cloud.dim()).map(|k| format!("x{k}")))?;
    for p in cloud.points() {
        w.write_record(p.iter().map(|&v| format_real(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(space: &FiniteMetricSpace, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for i in 0..space.len() {
        w.write_record((0..space.len()).map(|j| format_real(space.dist(i, j))))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_region<W: Write>(region: &Region, mut out: W) -> Result<()> {
    for i in region.iter() {
        writeln!(out, "{i}")?;
    }
    Ok(())
}

pub fn write_path<W: Write>(path: &PlPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for (t, p) in path.params().iter().zip(path.points()) {
        w.write_record([format_real(*t), format_real(p[0]), format_real(p[1])])?;
    }
    w.flush()?;
    Ok(())
}

pub fn open(path: impl AsRef<Path>) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}
