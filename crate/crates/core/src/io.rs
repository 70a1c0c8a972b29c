//! JSON file formats.
//!
//! A matrix is a list of rows; an entry is a number or `[re, im]`.
//! Files: `{"matrix": M}` (or a bare `M`) for isometries, `{"kraus": [M, …]}`,
//! `{"effects": [M, …]}`, `{"branches": [[M, …], …]}`, and circuits as
//! `{"num_qubits": n, "ancillas": […], "gates": […]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{Channel, Instrument, Povm};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::numerics::{c64, CMatrix};
use crate::synth::Isometry;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

type Rows = Vec<Vec<Entry>>;

fn syntax(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

fn rows_to_matrix(rows: Rows) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(schema("matrix is empty"));
    }
    if rows.iter().any(|row| row.len() != c) {
        return Err(schema("matrix rows have different lengths"));
    }
    let mut m = CMatrix::zeros(r, c);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, e) in row.into_iter().enumerate() {
            m[(i, j)] = match e {
                Entry::Real(x) => c64(x, 0.0),
                Entry::Complex([re, im]) => c64(re, im),
            };
        }
    }
    Ok(m)
}

/// Reads a matrix from a JSON value.
pub fn matrix_from_value(v: &Value) -> Result<CMatrix> {
    let rows: Rows = serde_json::from_value(v.clone())
        .map_err(|e| schema(format!("not a matrix: {e}")))?;
    rows_to_matrix(rows)
}

/// Writes real entries as numbers and the others as `[re, im]`.
pub fn matrix_to_value(m: &CMatrix) -> Value {
    let rows: Rows = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 {
                        Entry::Real(z.re)
                    } else {
                        Entry::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect();
    serde_json::to_value(rows).expect("matrix serializes")
}

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(syntax)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| schema(format!("missing \"{key}\"")))
}

fn matrix_list(v: &Value) -> Result<Vec<CMatrix>> {
    v.as_array()
        .ok_or_else(|| schema("expected a list of matrices"))?
        .iter()
        .map(matrix_from_value)
        .collect()
}

/// Matrix of an isometry file, not yet validated.
pub fn read_matrix(text: &str) -> Result<CMatrix> {
    let v = parse(text)?;
    match v.get("matrix") {
        Some(m) => matrix_from_value(m),
        None => matrix_from_value(&v),
    }
}

pub fn read_isometry(text: &str) -> Result<Isometry> {
    Isometry::new(read_matrix(text)?)
}

pub fn read_kraus(text: &str) -> Result<Vec<CMatrix>> {
    matrix_list(field(&parse(text)?, "kraus")?)
}

pub fn read_channel(text: &str) -> Result<Channel> {
    Channel::new(read_kraus(text)?)
}

pub fn read_effects(text: &str) -> Result<Vec<CMatrix>> {
    matrix_list(field(&parse(text)?, "effects")?)
}

pub fn read_povm(text: &str) -> Result<Povm> {
    Povm::new(read_effects(text)?)
}

pub fn read_branches(text: &str) -> Result<Vec<Vec<CMatrix>>> {
    field(&parse(text)?, "branches")?
        .as_array()
        .ok_or_else(|| schema("\"branches\" must be a list"))?
        .iter()
        .map(matrix_list)
        .collect()
}

pub fn read_instrument(text: &str) -> Result<Instrument> {
    Instrument::new(read_branches(text)?)
}

pub fn read_circuit(text: &str) -> Result<Circuit> {
    let v = parse(text)?;
    serde_json::from_value(v).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("invalid circuit") {
            Error::InvalidCircuit(msg)
        } else {
            schema(msg)
        }
    })
}

pub fn write_circuit(c: &Circuit) -> String {
    serde_json::to_string_pretty(c).expect("circuit serializes")
}

pub fn isometry_to_json(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&serde_json::json!({ "matrix": matrix_to_value(m) }))
        .expect("matrix serializes")
}
