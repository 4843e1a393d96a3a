//! JSON documents used for all file I/O.
//!
//! A matrix is `{"rows": m, "cols": n, "entries": [[literal, ...], ...]}`
//! where each literal follows the quaternion grammar, e.g. `"1/2-3*i+k"`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::Quaternion;
use crate::simdecomp::SimDecomposition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&QMatrix> for MatrixDoc {
    fn from(m: &QMatrix) -> Self {
        MatrixDoc {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows()).map(|i| m.row(i).iter().map(Quaternion::to_string).collect()).collect(),
        }
    }
}

impl MatrixDoc {
    pub fn to_matrix(&self) -> Result<QMatrix> {
        if self.entries.len() != self.rows {
            return Err(Error::dims(format!("document declares {} rows but lists {}", self.rows, self.entries.len())));
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::dims(format!(
                    "row {i} has {} entries, document declares {} columns",
                    row.len(),
                    self.cols
                )));
            }
            for (j, lit) in row.iter().enumerate() {
                let q = Quaternion::parse(lit).map_err(|e| match e {
                    Error::Parse { offset, message } => {
                        Error::Parse { offset, message: format!("entry ({i},{j}) {lit:?}: {message}") }
                    }
                    other => other,
                })?;
                data.push(q);
            }
        }
        QMatrix::from_vec(self.rows, self.cols, data)
    }
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    start + column.saturating_sub(1)
}

fn json_error(text: &str, e: serde_json::Error) -> Error {
    Error::Parse { offset: byte_offset(text, e.line(), e.column()), message: e.to_string() }
}

pub fn matrix_from_json(text: &str) -> Result<QMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    doc.to_matrix()
}

pub fn matrix_to_value(m: &QMatrix) -> Value {
    serde_json::to_value(MatrixDoc::from(m)).expect("matrix documents always serialize")
}

pub fn matrix_to_json(m: &QMatrix) -> String {
    serde_json::to_string_pretty(&MatrixDoc::from(m)).expect("matrix documents always serialize")
}

pub fn read_matrix(path: &Path) -> Result<QMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    matrix_from_json(&text)
}

pub fn write_matrix(path: &Path, m: &QMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m) + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Full record of a decomposition: transforms with their inverses, the five
/// structured factors, block sizes and the free core blocks.
pub fn decomposition_to_value(d: &SimDecomposition) -> Value {
    let m = matrix_to_value;
    let c = &d.core;
    json!({
        "dims": d.dims,
        "transforms": {
            "P": m(&d.p), "P_inv": m(&d.p_inv),
            "Q": m(&d.q), "Q_inv": m(&d.q_inv),
            "T1": m(&d.t1), "T1_inv": m(&d.t1_inv),
            "T2": m(&d.t2), "T2_inv": m(&d.t2_inv),
            "V1": m(&d.v1), "V1_inv": m(&d.v1_inv),
            "V2": m(&d.v2), "V2_inv": m(&d.v2_inv),
        },
        "factors": {
            "S_A": m(&d.s_a), "S_B": m(&d.s_b), "S_C": m(&d.s_c),
            "S_D": m(&d.s_d), "S_E": m(&d.s_e),
        },
        "core": {
            "A1": m(&c.a[0]), "A2": m(&c.a[1]), "A3": m(&c.a[2]),
            "A4": m(&c.a[3]), "A5": m(&c.a[4]), "A6": m(&c.a[5]),
            "A7": m(&c.a[6]), "A8": m(&c.a[7]), "A9": m(&c.a[8]),
            "B1": m(&c.b1), "C1": m(&c.c1), "C2": m(&c.c2),
            "D1": m(&c.d1), "E1": m(&c.e1), "E2": m(&c.e2),
        },
    })
}
