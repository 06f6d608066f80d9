//! Result tables with a CSV and a JSON rendering.
//!
//! CSV is canonical: a header row, then one line per row. Reals use the
//! shortest representation that parses back to the same `f64`; infinities
//! print as `inf` and `-inf`. JSON is an array of objects with the columns
//! in header order; non-finite reals become `null`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::lens::{GridRow, LensRow, LineUltra};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::param(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Shortest round-trip decimal, switching to exponent form for very large
/// or very small magnitudes.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else if v != 0.0 && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => f.write_str(&format_real(*v)),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Missing => Ok(()),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::param(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// The cell in `column` of row `row`.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|name| name == column)?;
        self.rows.get(row).map(|r| &r[c])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("tables are UTF-8")
    }
}

pub fn lens_table(rows: &[LensRow]) -> Table {
    let mut t = Table::new([
        "n",
        "h",
        "points",
        "region_points",
        "ecc_d",
        "ecc_d_analytic",
        "ecc_dprime",
        "ecc_dprime_analytic",
        "max_inradius",
        "inradius_center_x",
        "inradius_center_y",
        "min_covering_radius",
        "quasi_ball_d",
        "quasi_ball_dprime",
        "weak_ecc_d",
        "weak_ecc_dprime",
    ]);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.h.into(),
            r.points.into(),
            r.region_points.into(),
            r.ecc_d.into(),
            r.ecc_d_analytic.into(),
            r.ecc_dprime.into(),
            r.ecc_dprime_analytic.into(),
            r.max_inradius.into(),
            r.inradius_center[0].into(),
            r.inradius_center[1].into(),
            r.min_covering_radius.into(),
            r.quasi_ball_d.into(),
            r.quasi_ball_dprime.into(),
            r.weak_ecc_d.into(),
            r.weak_ecc_dprime.into(),
        ])
        .expect("row matches header");
    }
    t
}

pub fn grid_table(rows: &[GridRow]) -> Table {
    let mut t = Table::new([
        "side",
        "points",
        "spacing",
        "method",
        "delta_d",
        "delta_dprime",
        "corner_bound",
    ]);
    for r in rows {
        t.push(vec![
            r.side.into(),
            r.points.into(),
            r.spacing.into(),
            r.method.into(),
            r.delta_d.into(),
            r.delta_dprime.into(),
            r.corner_bound.into(),
        ])
        .expect("row matches header");
    }
    t
}

pub fn line_table(rows: &[LineUltra]) -> Table {
    let mut t = Table::new(["n", "delta_u", "gap_to_ln2", "witness_x", "witness_y", "witness_z"]);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.delta_u.into(),
            r.gap_to_ln2.into(),
            r.witness[0].into(),
            r.witness[1].into(),
            r.witness[2].into(),
        ])
        .expect("row matches header");
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.0, 0.1, 1.0 / 3.0, 2f64.sqrt() - 1.0, 1e-7, 6.02e23, -4.5, 1e300] {
            let s = format_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(3.0), "3");
    }

    #[test]
    fn csv_and_json_mirror_each_other() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.25.into(), Cell::Missing]).unwrap();
        t.push(vec![2usize.into(), f64::INFINITY.into(), "x,y".into()]).unwrap();
        assert!(t.push(vec![Cell::Missing]).is_err());
        assert_eq!(t.render(Format::Csv), "a,b,c\n1,0.25,\n2,inf,\"x,y\"\n");
        let json = t.to_json();
        assert_eq!(json[0]["b"], 0.25);
        assert_eq!(json[1]["b"], Value::Null);
        assert_eq!(json[1]["c"], "x,y");
        let keys: Vec<&String> = json[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b", "c"]);
    }
}
