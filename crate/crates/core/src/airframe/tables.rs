//! Gridded lookup tables with multilinear interpolation.
//!
//! Tables are plain-text CSV. Lines starting with `#` are comments. A 2-D
//! grid has a header whose first cell names both axes as `row\column`
//! followed by the column breakpoints; each data row starts with its row
//! breakpoint:
//!
//! ```text
//! # Pitching moment coefficient
//! alpha_deg\elevator_deg,-24,-12,0,12,24
//! -10,0.205,0.081,-0.046,-0.174,-0.259
//! ```
//!
//! A column table has a header `axis,name1,name2,...` and one row per
//! breakpoint; every named column becomes its own 1-D table.
//!
//! Lookups outside the grid clamp to the edge and report it.

use crate::{Error, Result};

/// Result of a table lookup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lookup {
    pub value: f64,
    /// True when at least one coordinate fell outside the grid.
    pub clamped: bool,
}

fn locate(axis: &[f64], x: f64) -> (usize, f64, bool) {
    let n = axis.len();
    if x <= axis[0] {
        return (0, 0.0, x < axis[0]);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0, x > axis[n - 1]);
    }
    let hi = axis.partition_point(|&p| p <= x).min(n - 1);
    let lo = hi - 1;
    (lo, (x - axis[lo]) / (axis[hi] - axis[lo]), false)
}

fn check_axis(axis: &[f64], what: &str, path: &str) -> Result<()> {
    if axis.len() < 2 {
        return Err(table_err(path, format!("{what} axis needs at least two breakpoints")));
    }
    if axis.iter().any(|x| !x.is_finite()) {
        return Err(table_err(path, format!("{what} axis has non-finite breakpoints")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(table_err(path, format!("{what} axis is not strictly increasing")));
    }
    Ok(())
}

fn table_err(path: &str, message: impl Into<String>) -> Error {
    Error::Table {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1 {
    axis: Vec<f64>,
    values: Vec<f64>,
}

impl Table1 {
    pub fn new(axis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis(&axis, "breakpoint", "<memory>")?;
        if values.len() != axis.len() {
            return Err(table_err("<memory>", "value count does not match axis"));
        }
        Ok(Self { axis, values })
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn lookup(&self, x: f64) -> Lookup {
        let (i, t, clamped) = locate(&self.axis, x);
        let value = self.values[i] + t * (self.values[i + 1] - self.values[i]);
        Lookup { value, clamped }
    }
}

/// A 2-D grid stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Table2 {
    rows: Vec<f64>,
    cols: Vec<f64>,
    values: Vec<f64>,
}

impl Table2 {
    pub fn new(rows: Vec<f64>, cols: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis(&rows, "row", "<memory>")?;
        check_axis(&cols, "column", "<memory>")?;
        if values.len() != rows.len() * cols.len() {
            return Err(table_err("<memory>", "value count does not match grid"));
        }
        Ok(Self { rows, cols, values })
    }

    /// A table that evaluates to `value` everywhere.
    pub fn constant(value: f64) -> Self {
        Self {
            rows: vec![0.0, 1.0],
            cols: vec![0.0, 1.0],
            values: vec![value; 4],
        }
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn cols(&self) -> &[f64] {
        &self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols.len() + col]
    }

    pub fn lookup(&self, x: f64, y: f64) -> Lookup {
        let (i, s, cx) = locate(&self.rows, x);
        let (j, t, cy) = locate(&self.cols, y);
        let v00 = self.at(i, j);
        let v01 = self.at(i, j + 1);
        let v10 = self.at(i + 1, j);
        let v11 = self.at(i + 1, j + 1);
        let a = v00 + t * (v01 - v00);
        let b = v10 + t * (v11 - v10);
        Lookup {
            value: a + s * (b - a),
            clamped: cx || cy,
        }
    }

    /// Parses a 2-D grid in the `row\column` header layout.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut reader = reader(text);
        let header = reader
            .headers()
            .map_err(|e| table_err(path, e.to_string()))?
            .clone();
        if header.len() < 3 || !header[0].contains('\\') {
            return Err(table_err(path, "expected a `row\\column` header followed by breakpoints"));
        }
        let cols = header
            .iter()
            .skip(1)
            .map(|s| parse_num(s, path))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| table_err(path, e.to_string()))?;
            if record.len() != cols.len() + 1 {
                return Err(table_err(
                    path,
                    format!("row has {} cells, expected {}", record.len(), cols.len() + 1),
                ));
            }
            rows.push(parse_num(&record[0], path)?);
            for cell in record.iter().skip(1) {
                values.push(parse_num(cell, path)?);
            }
        }
        check_axis(&rows, "row", path)?;
        check_axis(&cols, "column", path)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(table_err(path, "non-finite table value"));
        }
        Ok(Self { rows, cols, values })
    }
}

/// Parses a column table; returns one [`Table1`] per named column.
pub fn parse_columns(text: &str, path: &str) -> Result<Vec<(String, Table1)>> {
    let mut reader = reader(text);
    let header = reader
        .headers()
        .map_err(|e| table_err(path, e.to_string()))?
        .clone();
    if header.len() < 2 {
        return Err(table_err(path, "expected an axis column and at least one value column"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut axis = Vec::new();
    let mut columns = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record.map_err(|e| table_err(path, e.to_string()))?;
        if record.len() != names.len() + 1 {
            return Err(table_err(path, "ragged row"));
        }
        axis.push(parse_num(&record[0], path)?);
        for (col, cell) in columns.iter_mut().zip(record.iter().skip(1)) {
            col.push(parse_num(cell, path)?);
        }
    }
    check_axis(&axis, "breakpoint", path)?;
    Ok(names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| {
            (
                name,
                Table1 {
                    axis: axis.clone(),
                    values,
                },
            )
        })
        .collect())
}

/// Parses a `name,value` list of scalar constants.
pub fn parse_scalars(text: &str, path: &str) -> Result<Vec<(String, f64)>> {
    let mut reader = reader(text);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| table_err(path, e.to_string()))?;
        if record.len() != 2 {
            return Err(table_err(path, "expected `name,value` rows"));
        }
        out.push((record[0].to_string(), parse_num(&record[1], path)?));
    }
    Ok(out)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn parse_num(cell: &str, path: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| table_err(path, format!("`{cell}` is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = "# test grid\nx\\y,0,10\n0,0,10\n1,100,110\n";

    #[test]
    fn bilinear_interior() {
        let t = Table2::parse(GRID, "grid").unwrap();
        let l = t.lookup(0.5, 5.0);
        assert!((l.value - 55.0).abs() < 1e-12);
        assert!(!l.clamped);
    }

    #[test]
    fn grid_nodes_reproduced() {
        let t = Table2::parse(GRID, "grid").unwrap();
        assert_eq!(t.lookup(1.0, 10.0).value, 110.0);
        assert_eq!(t.lookup(0.0, 0.0).value, 0.0);
    }

    #[test]
    fn outside_clamps_and_flags() {
        let t = Table2::parse(GRID, "grid").unwrap();
        let l = t.lookup(5.0, -3.0);
        assert_eq!(l.value, 100.0);
        assert!(l.clamped);
    }

    #[test]
    fn rejects_non_monotone_axis() {
        let bad = "x\\y,0,10\n1,0,0\n0,1,1\n";
        assert!(matches!(Table2::parse(bad, "bad"), Err(Error::Table { .. })));
    }

    #[test]
    fn rejects_ragged_rows() {
        let bad = "x\\y,0,10\n0,0\n1,1,1\n";
        assert!(Table2::parse(bad, "bad").is_err());
    }

    #[test]
    fn column_table() {
        let cols = parse_columns("a,p,q\n0,1,2\n2,3,6\n", "cols").unwrap();
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[1].0, "q");
        assert!((cols[1].1.lookup(1.0).value - 4.0).abs() < 1e-12);
        assert!(cols[0].1.lookup(9.0).clamped);
    }
}
