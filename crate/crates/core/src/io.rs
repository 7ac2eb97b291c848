//! CSV plot data: `(t, value)` for scalar sequences and `(t, x, y)` for
//! planar polygons refined componentwise.

use std::io::{Read, Write};

use crate::engine::RefinedData;
use crate::error::{Error, Result};

/// Full double precision: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_values<W: Write>(w: W, data: &RefinedData) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "value"]).map_err(csv_err)?;
    for (t, v) in data.points() {
        out.write_record([fmt_f64(t), fmt_f64(v)]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(w: W, x: &RefinedData, y: &RefinedData) -> Result<()> {
    if x.offset != y.offset || x.values.len() != y.values.len() || x.level != y.level {
        return Err(Error::Format("x and y components are not on the same grid".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "x", "y"]).map_err(csv_err)?;
    for ((t, a), b) in x.points().zip(&y.values) {
        out.write_record([fmt_f64(t), fmt_f64(a), fmt_f64(*b)]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a numeric CSV with a header row; returns the header and the rows.
pub fn read_table<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.iter().map(str::to_owned).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Format(format!("row {}: {f:?}: {e}", n + 1))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::Format(format!("row {} has {} fields, expected {}", n + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Places samples `t_n` on the grid `(i + p) / 2^level`; the abscissae must
/// be consecutive grid points.
pub fn to_grid(ts: &[f64], values: Vec<f64>, level: u32, p: f64) -> Result<RefinedData> {
    if ts.is_empty() {
        return Err(Error::Format("no samples".into()));
    }
    let scale = 2f64.powi(level as i32);
    let index = |t: f64| t * scale - p;
    let first = index(ts[0]).round();
    for (n, &t) in ts.iter().enumerate() {
        let want = first + n as f64;
        if (index(t) - want).abs() > 1e-9 {
            return Err(Error::Format(format!(
                "sample {n} at t = {t} is not grid point {want} of level {level} with p = {p}"
            )));
        }
    }
    Ok(RefinedData::new(first as i64, values, level, p))
}

/// Splits a `(t, value)` or `(t, x, y)` table into one grid sequence per value column.
pub fn table_to_components(rows: &[Vec<f64>], level: u32, p: f64) -> Result<Vec<RefinedData>> {
    let width = rows.first().map_or(0, Vec::len);
    if width < 2 {
        return Err(Error::Format("expected a t column and at least one value column".into()));
    }
    let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    (1..width).map(|c| to_grid(&ts, rows.iter().map(|r| r[c]).collect(), level, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_exactly() {
        let data = RefinedData::new(-3, vec![0.1, -1.0 / 3.0, 2.0f64.sqrt(), 1e-300], 2, -0.5);
        let mut buf = Vec::new();
        write_values(&mut buf, &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value\n"));
        assert!(text.contains("-8.7500000000000000e-1,1.0000000000000001e-1"));
        let (header, rows) = read_table(buf.as_slice()).unwrap();
        assert_eq!(header, ["t", "value"]);
        let back = table_to_components(&rows, 2, -0.5).unwrap();
        assert_eq!(back, vec![data]);
    }

    #[test]
    fn curves_share_a_grid() {
        let x = RefinedData::new(0, vec![0.0, 1.0, 0.0], 0, 0.0);
        let y = RefinedData::new(0, vec![1.0, 0.0, -1.0], 0, 0.0);
        let mut buf = Vec::new();
        write_curve(&mut buf, &x, &y).unwrap();
        let (_, rows) = read_table(buf.as_slice()).unwrap();
        let parts = table_to_components(&rows, 0, 0.0).unwrap();
        assert_eq!(parts, vec![x.clone(), y]);
        let shifted = RefinedData::new(1, vec![1.0, 0.0, -1.0], 0, 0.0);
        assert!(write_curve(Vec::new(), &x, &shifted).is_err());
    }

    #[test]
    fn rejects_off_grid_and_ragged_input() {
        assert!(to_grid(&[0.0, 1.0, 2.5], vec![0.0; 3], 0, 0.0).is_err());
        assert!(read_table("t,value\n0,1\n1\n".as_bytes()).is_err());
        assert!(read_table("t,value\n0,abc\n".as_bytes()).is_err());
    }
}
