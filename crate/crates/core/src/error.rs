use thiserror::Error;

/// Errors produced by the curvature toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("t = {t} is outside the path domain: 1 - t*a vanishes or changes sign for eigenvalue a = {eigenvalue}")]
    OutsideDomain { t: f64, eigenvalue: f64 },

    #[error("subspace is not a subalgebra (closure residual {residual:.3e})")]
    NotSubalgebra { residual: f64 },

    #[error("subalgebra is not abelian (bracket residual {residual:.3e})")]
    NotAbelian { residual: f64 },

    #[error("vectors do not commute (|[X,Y]| = {commutator:.3e})")]
    NotCommuting { commutator: f64 },

    #[error("inner product is not bi-invariant (ad-invariance residual {residual:.3e})")]
    NotBiInvariant { residual: f64 },

    #[error("invalid structure constants: {0}")]
    InvalidStructure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("torus block exceeds the 4/3 bound along {direction:?} (margin {margin:.6e})")]
    TorusConstraint { direction: [f64; 2], margin: f64 },

    #[error("operation requires so(4), got algebra {name:?} of dimension {dim}")]
    WrongAlgebra { name: String, dim: usize },

    #[error("no invariant abelian plane found (best residual {best_residual:.3e})")]
    NoInvariantPlane { best_residual: f64 },

    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
