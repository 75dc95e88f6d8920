//! Reader for the shared matrix file format.
//!
//! Plain text: the first line holds `n` (square) or `rows cols`, followed by
//! the rows as whitespace-separated integers. Alternatively a JSON array of
//! arrays whose entries are integers or decimal strings.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;

use super::matrix::{GramMatrix, IntMatrix};
use crate::error::{Error, Result};

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let v: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        return IntMatrix::from_big_rows(rows_from_json(&v)?);
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension `{t}`"))))
        .collect::<Result<_>>()?;
    let (rows, cols) = match dims.as_slice() {
        [n] => (*n, *n),
        [r, c] => (*r, *c),
        _ => return Err(Error::Parse(format!("bad header `{header}`"))),
    };
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let line = lines.next().ok_or_else(|| Error::Parse("too few rows".into()))?;
        let row: Vec<BigInt> = line
            .split_whitespace()
            .map(|t| BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad integer `{t}`"))))
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(Error::Parse(format!("expected {cols} entries, found {}", row.len())));
        }
        data.extend(row);
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing rows".into()));
    }
    IntMatrix::from_vec(rows, cols, data)
}

pub fn parse_gram(text: &str) -> Result<GramMatrix> {
    GramMatrix::new(parse_matrix(text)?)
}

pub fn read_gram(path: &Path) -> Result<GramMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_gram(&text)
}

pub fn read_matrix(path: &Path) -> Result<IntMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub(crate) fn rows_from_json(v: &serde_json::Value) -> Result<Vec<Vec<BigInt>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("expected array of rows".into()))?;
    rows.iter()
        .map(|row| {
            let row = row.as_array().ok_or_else(|| Error::Parse("expected array row".into()))?;
            row.iter().map(json_int).collect()
        })
        .collect()
}

fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("non-integer entry {n}"))),
        serde_json::Value::String(s) => {
            BigInt::from_str(s).map_err(|_| Error::Parse(format!("bad integer `{s}`")))
        }
        other => Err(Error::Parse(format!("unexpected entry {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_json_agree() {
        let a = parse_gram("2\n2 1\n1 2\n").unwrap();
        let b = parse_gram("[[2, 1], [1, \"2\"]]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rectangular_header() {
        let m = parse_matrix("3 1\n1\n0\n0\n").unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 1));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_gram("2\n1 0\n").is_err());
        assert!(parse_gram("2\n1 0\n0 x\n").is_err());
        assert!(matches!(parse_gram("2\n1 2\n3 1\n"), Err(Error::NotSymmetric(1, 0))));
        assert!(parse_gram("").is_err());
    }

    #[test]
    fn display_round_trips() {
        let g = GramMatrix::e8();
        assert_eq!(parse_gram(&g.to_string()).unwrap(), g);
    }
}
