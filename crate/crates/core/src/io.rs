//! JSON file formats: polyhedral function definitions (exact data as
//! rational strings), matrices and vectors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{SpectralFn, SpectralKind};
use crate::matdecomp::{Matrix, SymMatrix};
use crate::polyfun::rational::{format_rational, format_vec, parse_rational, QVec};
use crate::polyfun::{MaxAffineFn, SymmetryMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceJson {
    pub a: Vec<String>,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub c: Vec<String>,
    pub d: String,
}

fn default_kind() -> SpectralKind {
    SpectralKind::Eigenvalue
}

/// `f(x) = max_i ⟨a_i, x⟩ + b_i` on `{x : ⟨c_j, x⟩ ≤ d_j}`; pieces and
/// constraints are closed under `symmetry_mode` when loaded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default = "default_kind")]
    pub kind: SpectralKind,
    pub symmetry_mode: SymmetryMode,
    pub pieces: Vec<PieceJson>,
    #[serde(default)]
    pub constraints: Vec<ConstraintJson>,
}

fn parse_vec(v: &[String], n: usize) -> Result<QVec> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    v.iter().map(|s| parse_rational(s)).collect()
}

impl FunctionFile {
    pub fn from_function(name: Option<String>, f: &MaxAffineFn, kind: SpectralKind) -> Self {
        FunctionFile {
            name,
            n: f.n,
            kind,
            symmetry_mode: f.symmetry_mode(),
            pieces: f.pieces().iter().map(|(a, b)| PieceJson { a: format_vec(a), b: format_rational(b) }).collect(),
            constraints: f
                .constraints()
                .iter()
                .map(|(c, d)| ConstraintJson { c: format_vec(c), d: format_rational(d) })
                .collect(),
        }
    }

    pub fn to_function(&self) -> Result<MaxAffineFn> {
        let pieces = self.pieces.iter().map(|p| Ok((parse_vec(&p.a, self.n)?, parse_rational(&p.b)?))).collect::<Result<_>>()?;
        let constraints =
            self.constraints.iter().map(|c| Ok((parse_vec(&c.c, self.n)?, parse_rational(&c.d)?))).collect::<Result<_>>()?;
        MaxAffineFn::new(self.n, pieces, constraints, self.symmetry_mode)
    }

    pub fn to_spectral(&self) -> Result<SpectralFn> {
        SpectralFn::new(self.to_function()?, self.kind)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed {what}: {e}")))
}

pub fn load_function(path: &Path) -> Result<FunctionFile> {
    parse_json(&read(path)?, "function file")
}

/// A JSON value given inline or as a path to a file holding it.
pub fn inline_or_file(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

/// Rows of a JSON matrix, rejecting ragged input.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = parse_json(text, "matrix")?;
    Matrix::from_rows(&rows)
}

pub fn parse_symmetric(text: &str) -> Result<SymMatrix> {
    SymMatrix::new(parse_matrix(text)?)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    parse_json(text, "vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn function_round_trip() {
        for name in corpus::FUNCTION_NAMES {
            let f = corpus::function_by_name(name, 3).unwrap();
            let file = FunctionFile::from_function(Some(name.into()), &f, SpectralKind::Eigenvalue);
            let text = serde_json::to_string(&file).unwrap();
            let back: FunctionFile = parse_json(&text, "function").unwrap();
            assert_eq!(back.to_function().unwrap().pieces(), f.pieces());
            assert_eq!(back.to_function().unwrap().constraints(), f.constraints());
        }
    }

    #[test]
    fn minimal_file() {
        let text = r#"{"n": 2, "symmetry_mode": "signed", "pieces": [{"a": ["1", "1"], "b": "0"}]}"#;
        let f: FunctionFile = parse_json(text, "function").unwrap();
        assert_eq!(f.to_function().unwrap().pieces(), corpus::l1(2).pieces());
        let bad = r#"{"n": 2, "symmetry_mode": "signed", "pieces": [{"a": ["1"], "b": "0"}]}"#;
        assert!(parse_json::<FunctionFile>(bad, "function").unwrap().to_function().is_err());
    }

    #[test]
    fn matrices() {
        assert!(parse_symmetric("[[0, 1], [1, 0]]").is_ok());
        assert!(parse_symmetric("[[0, 1, 2], [1, 0, 3]]").is_err());
        assert!(parse_matrix("[[0, 1], [1]]").is_err());
    }
}
