//! File formats and exact serialization.
//!
//! Gram matrices travel as `{"m": int, "gram": [[int]]}`; vectors and
//! idempotent matrices as arrays of exact rational strings `"p/q"` in lowest
//! terms. Every exact rational is rendered as `"num/den"` with a positive
//! denominator so reports are loss-free and byte-stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Deserialize;
use std::path::Path;
use std::str::FromStr;

use crate::lattice::{QuadLattice, RatVector};
use crate::matrix::QMat;
use crate::{Error, Result};

/// Canonical rendering: `num/den`, lowest terms, positive denominator.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p`, `p/q`, and signs; rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n.trim(), d.trim()),
    };
    let n = BigInt::from_str(num)
        .map_err(|_| Error::BadInput(format!("bad rational numerator: {s:?}")))?;
    let d = BigInt::from_str(den)
        .map_err(|_| Error::BadInput(format!("bad rational denominator: {s:?}")))?;
    if d.magnitude().is_one() && !d.is_negative() {
        return Ok(BigRational::from_integer(n));
    }
    if d == BigInt::from(0) {
        return Err(Error::BadInput(format!("zero denominator: {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Comma-separated rationals, e.g. `2/3,1,-5`.
pub fn parse_rational_vector(s: &str) -> Result<RatVector> {
    let coords = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(Error::BadInput("empty vector".into()));
    }
    Ok(RatVector(coords))
}

/// Comma-separated integers, e.g. `1,-1,1`.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::BadInput(format!("bad integer: {p:?}")))
        })
        .collect()
}

#[derive(Deserialize)]
struct GramFile {
    m: usize,
    gram: Vec<Vec<i64>>,
}

/// Load `{"m": int, "gram": [[int]]}`.
pub fn load_gram(path: &Path) -> Result<QuadLattice> {
    let text = std::fs::read_to_string(path)?;
    let parsed: GramFile = serde_json::from_str(&text)
        .map_err(|e| Error::BadInput(format!("bad gram file {}: {e}", path.display())))?;
    if parsed.gram.len() != parsed.m {
        return Err(Error::BadInput(format!(
            "gram file {} declares m = {} but has {} rows",
            path.display(),
            parsed.m,
            parsed.gram.len()
        )));
    }
    let gram = parsed
        .gram
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    QuadLattice::new(gram)
}

#[derive(Deserialize)]
struct IdempotentFile {
    e: Vec<Vec<String>>,
}

/// Load `{"e": [["p/q", ...], ...]}` as a rational matrix.
pub fn load_rational_matrix(path: &Path) -> Result<QMat> {
    let text = std::fs::read_to_string(path)?;
    let parsed: IdempotentFile = serde_json::from_str(&text)
        .map_err(|e| Error::BadInput(format!("bad matrix file {}: {e}", path.display())))?;
    let rows = parsed
        .e
        .iter()
        .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    QMat::from_rows(rows)
}

/// Matrix as nested arrays of `"num/den"` strings (row-major).
pub fn qmat_to_json(m: &QMat) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows())
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.cols())
                        .map(|j| serde_json::Value::String(format_rational(m.at(i, j))))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Vector as an array of `"num/den"` strings.
pub fn ratvec_to_json(v: &RatVector) -> serde_json::Value {
    serde_json::Value::Array(
        v.coords()
            .iter()
            .map(|x| serde_json::Value::String(format_rational(x)))
            .collect(),
    )
}

/// Floats in reports: 12 significant digits plus a type tag, so exact and
/// approximate numbers cannot be confused downstream.
pub fn float_to_json(x: f64) -> serde_json::Value {
    serde_json::json!({ "float": format!("{x:.11e}") })
}
