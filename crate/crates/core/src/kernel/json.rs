//! Matrix JSON: `{"dim": n, "data": [[[re, im], ...], ...]}`, row-major.
//!
//! State vectors use the same layout with `n` rows of one entry each.
//! Numbers are written in the shortest decimal form that reads back to the
//! identical `f64`; integral values are written without a fractional part.

use num_complex::Complex64;
use serde_json::Value;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

fn write_number(out: &mut String, x: f64) {
    if x == x.trunc() && x.abs() < 9.0e15 {
        out.push_str(&format!("{}", x as i64));
    } else {
        // Debug formatting of f64 is the shortest round-trip representation
        out.push_str(&format!("{x:?}"));
    }
}

fn write_entry(out: &mut String, z: Complex64) {
    out.push('[');
    write_number(out, z.re);
    out.push(',');
    write_number(out, z.im);
    out.push(']');
}

fn write_rows<'a>(dim: usize, rows: impl Iterator<Item = &'a [Complex64]>) -> String {
    let mut out = format!("{{\"dim\":{dim},\"data\":[");
    for (i, row) in rows.enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, &z) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write_entry(&mut out, z);
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

pub fn serialize_matrix(m: &ComplexMatrix) -> String {
    write_rows(m.dim(), (0..m.dim()).map(|i| m.row(i)))
}

pub fn serialize_vector(v: &[Complex64]) -> String {
    write_rows(v.len(), v.chunks(1))
}

/// Matrix JSON as a `serde_json::Value`, for embedding in reports.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::from_str(&serialize_matrix(m)).expect("serializer emits valid JSON")
}

pub fn vector_value(v: &[Complex64]) -> Value {
    serde_json::from_str(&serialize_vector(v)).expect("serializer emits valid JSON")
}

fn parse_err(position: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        position: position.into(),
        message: message.into(),
    }
}

fn parse_rows(text: &[u8]) -> Result<(usize, Vec<Vec<Complex64>>)> {
    let value: Value = serde_json::from_slice(text).map_err(|e| {
        parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    rows_from_value(&value)
}

fn rows_from_value(value: &Value) -> Result<(usize, Vec<Vec<Complex64>>)> {
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err("$", "expected an object with \"dim\" and \"data\""))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("$.dim", "expected a non-negative integer"))? as usize;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("$.data", "expected an array of rows"))?;
    if data.len() != dim {
        return Err(parse_err(
            "$.data",
            format!("{} rows but dim is {dim}", data.len()),
        ));
    }
    let mut rows = Vec::with_capacity(dim);
    for (i, row) in data.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(format!("$.data[{i}]"), "expected an array"))?;
        let mut parsed = Vec::with_capacity(row.len());
        for (j, entry) in row.iter().enumerate() {
            let pos = format!("$.data[{i}][{j}]");
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| parse_err(&pos, "expected a [re, im] pair"))?;
            let re = pair[0]
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(&pos, "real part is not a finite number"))?;
            let im = pair[1]
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(&pos, "imaginary part is not a finite number"))?;
            parsed.push(Complex64::new(re, im));
        }
        rows.push(parsed);
    }
    Ok((dim, rows))
}

pub fn parse_matrix(text: &[u8]) -> Result<ComplexMatrix> {
    let (dim, rows) = parse_rows(text)?;
    square_from_rows(dim, rows)
}

pub fn matrix_from_value(value: &Value) -> Result<ComplexMatrix> {
    let (dim, rows) = rows_from_value(value)?;
    square_from_rows(dim, rows)
}

fn square_from_rows(dim: usize, rows: Vec<Vec<Complex64>>) -> Result<ComplexMatrix> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(parse_err(
            format!("$.data[{i}]"),
            format!("row has {} entries, expected {dim}", r.len()),
        ));
    }
    ComplexMatrix::from_rows(&rows)
}

/// Parse an n×1 column in matrix JSON layout.
pub fn parse_vector(text: &[u8]) -> Result<Vec<Complex64>> {
    let (_, rows) = parse_rows(text)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [z] => Ok(*z),
            _ => Err(parse_err(
                format!("$.data[{i}]"),
                format!("state rows hold exactly one entry, found {}", r.len()),
            )),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rng::random_hermitian;
    use proptest::prelude::*;

    #[test]
    fn identity_serializes_exactly() {
        assert_eq!(
            serialize_matrix(&ComplexMatrix::identity(2)),
            r#"{"dim":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#
        );
    }

    #[test]
    fn identity_parses_back() {
        let m = parse_matrix(br#"{"dim":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
        assert_eq!(m, ComplexMatrix::identity(2));
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = parse_matrix(br#"{"dim":2,"data":[[[1,0],[0,0]],[[0,0]]]}"#).unwrap_err();
        match err {
            Error::Parse { position, .. } => assert_eq!(position, "$.data[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line_and_column() {
        let err = parse_matrix(b"{\"dim\":2,\n \"data\": [[[1,0]").unwrap_err();
        match err {
            Error::Parse { position, .. } => assert!(position.starts_with("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_entry_rejected() {
        assert!(parse_matrix(br#"{"dim":1,"data":[[["x",0]]]}"#).is_err());
        assert!(parse_matrix(br#"{"dim":1,"data":[[[1]]]}"#).is_err());
    }

    #[test]
    fn vector_layout() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let text = serialize_vector(&v);
        assert_eq!(text, r#"{"dim":2,"data":[[[0.6,0]],[[0,0.8]]]}"#);
        assert_eq!(parse_vector(text.as_bytes()).unwrap(), v);
    }

    proptest! {
        #[test]
        fn matrix_round_trip_is_exact(n in 1usize..6, seed in any::<u64>(), scale in -300i32..300) {
            let m = random_hermitian(n, seed).matrix().scale_real(10f64.powi(scale));
            let back = parse_matrix(serialize_matrix(&m).as_bytes()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
