//! Plain numeric CSV: comma separated, `.` decimal point, no header row.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::EmbeddingMatrix;

pub fn decode(text: &str) -> Result<EmbeddingMatrix<f64>> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let body = body.strip_suffix('\r').unwrap_or(body);
    if body.is_empty() {
        return Err(Error::at_line(1, "empty csv, cannot infer the dimension"));
    }
    let mut dim = 0;
    let mut values = Vec::new();
    for (row, line) in body.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut fields = 0;
        for (col, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::at_line(
                    row + 1,
                    format!("column {}: invalid number {field:?}", col + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            values.push(v);
            fields += 1;
        }
        if row == 0 {
            dim = fields;
        } else if fields != dim {
            return Err(Error::at_line(
                row + 1,
                format!("{fields} fields, expected {dim}"),
            ));
        }
    }
    EmbeddingMatrix::new(values.len() / dim, dim, values)
}

/// Shortest round-trip decimal rendering, one row per line.
pub fn encode(m: &EmbeddingMatrix<f64>) -> Result<String> {
    if m.is_empty() {
        return Err(Error::Shape(
            "csv cannot represent a matrix with zero rows".into(),
        ));
    }
    let mut out = String::new();
    for row in m.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}
