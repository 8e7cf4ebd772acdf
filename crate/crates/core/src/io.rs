//! JSON forms of metrics and directions.
//!
//! ```json
//! {"algebra": "so4", "phi": [[1, 0, ...], ...], "metadata": {...}}
//! ```
//! `algebra` is a built-in name or an inline descriptor; exactly one of
//! `phi` / `psi` must be present.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraDescriptor, LieAlgebra};
use crate::linalg::Matrix;
use crate::metrics::{Direction, MetricForm};

/// Largest accepted matrix dimension in files.
pub const MAX_FILE_DIM: usize = 64;

pub fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> Result<Matrix> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
    }
    for row in rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("non-finite matrix entry".into()));
        }
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Builtin(String),
    Inline(AlgebraDescriptor),
}

impl AlgebraRef {
    pub fn resolve(&self) -> Result<LieAlgebra> {
        match self {
            AlgebraRef::Builtin(name) => LieAlgebra::builtin(name),
            AlgebraRef::Inline(desc) => {
                if desc.dim > MAX_FILE_DIM {
                    return Err(Error::InvalidStructure(format!("dimension {} too large", desc.dim)));
                }
                LieAlgebra::from_descriptor(desc)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub algebra: AlgebraRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A parsed and validated file.
#[derive(Debug, Clone)]
pub enum Loaded {
    Metric(MetricForm),
    Direction(Direction),
}

#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub algebra: LieAlgebra,
    pub content: Loaded,
    pub metadata: Option<serde_json::Value>,
}

impl MatrixFile {
    pub fn metric(algebra: &str, phi: &MetricForm, metadata: Option<serde_json::Value>) -> Self {
        MatrixFile { algebra: AlgebraRef::Builtin(algebra.into()), phi: Some(matrix_to_rows(phi.matrix())), psi: None, metadata }
    }

    pub fn direction(algebra: &str, psi: &Direction, metadata: Option<serde_json::Value>) -> Self {
        MatrixFile { algebra: AlgebraRef::Builtin(algebra.into()), phi: None, psi: Some(matrix_to_rows(psi.matrix())), metadata }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolve the algebra and validate the matrix against it.
    pub fn validate(&self) -> Result<LoadedFile> {
        let algebra = self.algebra.resolve()?;
        let n = algebra.dim();
        let content = match (&self.phi, &self.psi) {
            (Some(rows), None) => Loaded::Metric(MetricForm::new(matrix_from_rows(rows, n)?)?),
            (None, Some(rows)) => Loaded::Direction(Direction::new(matrix_from_rows(rows, n)?)?),
            _ => return Err(Error::Malformed("exactly one of \"phi\" or \"psi\" is required".into())),
        };
        Ok(LoadedFile { algebra, content, metadata: self.metadata.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix file serializes")
    }
}

/// Parse and validate file contents.
pub fn parse_matrix_file(text: &str) -> Result<LoadedFile> {
    MatrixFile::parse(text)?.validate()
}

pub fn load_matrix_file(path: &Path) -> Result<LoadedFile> {
    parse_matrix_file(&std::fs::read_to_string(path)?)
}

/// Parse an algebra reference: a built-in name or a descriptor JSON document.
pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    LieAlgebra::from_json(text)
}

/// Write via a sibling temp file and rename, so readers never see partial output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}
