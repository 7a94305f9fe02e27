//! JSON formats for operators and projector-tuple manifests.
//!
//! Operator: `{"dim_a": m, "dim_b": n, "matrix": [[[re, im], ...], ...]}`,
//! row-major with `mn` rows of `mn` entries.
//! Manifest: `{"p": [operator, ...], "q": [operator, ...]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteOperator, ComplexMatrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorJson {
    pub fn from_operator(op: &BipartiteOperator) -> Self {
        Self {
            dim_a: op.dim_a(),
            dim_b: op.dim_b(),
            matrix: rows_of(op.matrix()),
        }
    }

    /// Checks shape and Hermiticity.
    pub fn into_operator(self) -> Result<BipartiteOperator> {
        let mat = matrix_from_rows(&self.matrix)?;
        BipartiteOperator::new(self.dim_a, self.dim_b, mat)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestJson {
    pub p: Vec<OperatorJson>,
    pub q: Vec<OperatorJson>,
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    let data = rows
        .iter()
        .flat_map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)))
        .collect();
    ComplexMatrix::from_vec(r, c, data)
}

/// `[[[re, im], ...], ...]`.
pub fn matrix_to_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(rows_of(m)).expect("finite floats serialize")
}

pub fn operator_to_json(op: &BipartiteOperator) -> serde_json::Value {
    serde_json::to_value(OperatorJson::from_operator(op)).expect("finite floats serialize")
}

pub fn operator_from_str(s: &str) -> Result<BipartiteOperator> {
    serde_json::from_str::<OperatorJson>(s)?.into_operator()
}

pub fn manifest_from_str(s: &str) -> Result<(Vec<BipartiteOperator>, Vec<BipartiteOperator>)> {
    let m: ManifestJson = serde_json::from_str(s)?;
    let p = m.p.into_iter().map(OperatorJson::into_operator).collect::<Result<_>>()?;
    let q = m.q.into_iter().map(OperatorJson::into_operator).collect::<Result<_>>()?;
    Ok((p, q))
}

pub fn manifest_to_json(p: &[BipartiteOperator], q: &[BipartiteOperator]) -> serde_json::Value {
    serde_json::to_value(ManifestJson {
        p: p.iter().map(OperatorJson::from_operator).collect(),
        q: q.iter().map(OperatorJson::from_operator).collect(),
    })
    .expect("finite floats serialize")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn load_operator(path: &Path) -> Result<BipartiteOperator> {
    operator_from_str(&read(path)?)
}

pub fn load_manifest(path: &Path) -> Result<(Vec<BipartiteOperator>, Vec<BipartiteOperator>)> {
    manifest_from_str(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn operator_round_trip() {
        let op = fixtures::rho1();
        let s = operator_to_json(&op).to_string();
        assert_eq!(operator_from_str(&s).unwrap(), op);
    }

    #[test]
    fn rejects_non_hermitian() {
        let s = r#"{"dim_a":1,"dim_b":2,"matrix":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(operator_from_str(s), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(operator_from_str("{"), Err(Error::Parse(_))));
        let ragged = r#"{"dim_a":1,"dim_b":2,"matrix":[[[0,0]],[[0,0],[0,0]]]}"#;
        assert!(operator_from_str(ragged).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let p = fixtures::cex_p();
        let q = fixtures::cex_q();
        let s = manifest_to_json(&p, &q).to_string();
        let (p2, q2) = manifest_from_str(&s).unwrap();
        assert_eq!((p2, q2), (p, q));
    }
}
