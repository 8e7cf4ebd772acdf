//! Finite-dimensional real Lie algebras given by structure constants, together
//! with a bi-invariant reference inner product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Tolerance for the structural checks (antisymmetry, Jacobi, ad-invariance).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Relative singular-value threshold for null spaces and ranks.
pub const RANK_TOL: f64 = 1e-9;
/// `|[X,Y]| <= COMMUTE_TOL * |X| |Y|` defines a commuting pair everywhere.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Closure tolerance for subalgebra/abelian/ideal flags.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Recognized special structure, used for fast paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraShape {
    So3,
    /// so(3) + so(3) with equal scale; indices 0..3 and 3..6.
    So4,
    General,
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    /// c[i][j][k] flattened at `(i * dim + j) * dim + k`.
    structure: Vec<f64>,
    /// Nonzero constants, for fast brackets.
    terms: Vec<(usize, usize, usize, f64)>,
    h0: Matrix,
    shape: AlgebraShape,
}

/// JSON algebra descriptor: `{"name": ..., "dim": n, "structure": [[[...]]]}`.
/// An optional `h0` matrix may override the identity inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDescriptor {
    pub name: String,
    pub dim: usize,
    pub structure: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Vec<Vec<f64>>>,
}

impl LieAlgebra {
    /// Build and validate an algebra from raw constants and an inner product.
    pub fn new(name: impl Into<String>, dim: usize, structure: Vec<f64>, h0: Matrix) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStructure("dimension must be positive".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: structure.len() });
        }
        if h0.nrows() != dim || h0.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h0.nrows() });
        }
        if structure.iter().any(|c| !c.is_finite()) || h0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidStructure("non-finite entry".into()));
        }
        linalg::check_spd(&h0, STRUCTURE_TOL)?;
        let terms = collect_terms(dim, &structure);
        let mut alg = LieAlgebra {
            name: name.into(),
            dim,
            structure,
            terms,
            h0,
            shape: AlgebraShape::General,
        };
        let scale = 1.0 + alg.structure.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let anti = alg.antisymmetry_residual();
        if anti > STRUCTURE_TOL * scale {
            return Err(Error::InvalidStructure(format!("antisymmetry violated by {anti:.3e}")));
        }
        let jac = alg.jacobi_residual();
        if jac > STRUCTURE_TOL * scale * scale {
            return Err(Error::InvalidStructure(format!("Jacobi identity violated by {jac:.3e}")));
        }
        let adinv = alg.ad_invariance_residual(&alg.h0);
        if adinv > STRUCTURE_TOL * scale * (1.0 + alg.h0.amax()) {
            return Err(Error::NotBiInvariant { residual: adinv });
        }
        alg.shape = detect_shape(&alg);
        Ok(alg)
    }

    pub fn from_descriptor(desc: &AlgebraDescriptor) -> Result<Self> {
        let n = desc.dim;
        if desc.structure.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: desc.structure.len() });
        }
        let mut flat = Vec::with_capacity(n * n * n);
        for plane in &desc.structure {
            if plane.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: plane.len() });
            }
            for row in plane {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: row.len() });
                }
                flat.extend_from_slice(row);
            }
        }
        let h0 = match &desc.h0 {
            None => Matrix::identity(n, n),
            Some(rows) => crate::io::matrix_from_rows(rows, n)?,
        };
        LieAlgebra::new(desc.name.clone(), n, flat, h0)
    }

    pub fn to_descriptor(&self) -> AlgebraDescriptor {
        let n = self.dim;
        let structure = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self.c(i, j, k)).collect()).collect())
            .collect();
        let h0 = if self.h0 == Matrix::identity(n, n) {
            None
        } else {
            Some((0..n).map(|i| (0..n).map(|j| self.h0[(i, j)]).collect()).collect())
        };
        AlgebraDescriptor { name: self.name.clone(), dim: n, structure, h0 }
    }

    /// Parse a JSON descriptor and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let desc: AlgebraDescriptor = serde_json::from_str(text)?;
        if desc.dim > 64 {
            return Err(Error::InvalidStructure(format!("dimension {} too large", desc.dim)));
        }
        Self::from_descriptor(&desc)
    }

    /// Built-in algebra by name (`so3`, `so4`).
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "so3" => Ok(build_so3()),
            "so4" => Ok(build_so4()),
            other => Err(Error::UnknownAlgebra(other.to_string())),
        }
    }

    /// Same brackets, different bi-invariant inner product.
    pub fn with_inner_product(&self, h: Matrix) -> Result<Self> {
        LieAlgebra::new(self.name.clone(), self.dim, self.structure.clone(), h)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> AlgebraShape {
        self.shape
    }

    pub fn h0(&self) -> &Matrix {
        &self.h0
    }

    pub fn has_identity_h0(&self) -> bool {
        self.h0 == Matrix::identity(self.dim, self.dim)
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    /// `[X, Y]` without dimension checks; callers inside the crate guarantee sizes.
    #[inline]
    pub fn bracket_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for &(i, j, k, c) in &self.terms {
            out[k] += c * x[i] * y[j];
        }
        out
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    /// Matrix of `ad_X`; column `j` is `[X, e_j]`.
    pub fn ad_matrix(&self, x: &Vector) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for &(i, j, k, c) in &self.terms {
            m[(k, j)] += c * x[i];
        }
        m
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.h0 * y))
    }

    pub fn norm_sq(&self, x: &Vector) -> f64 {
        self.inner(x, x)
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.norm_sq(x).max(0.0).sqrt()
    }

    pub fn normalize(&self, x: &Vector) -> Result<Vector> {
        let n = self.norm(x);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(x / n)
    }

    /// `|[X,Y]| <= COMMUTE_TOL |X||Y|`.
    pub fn commute(&self, x: &Vector, y: &Vector) -> bool {
        let c = self.norm(&self.bracket_unchecked(x, y));
        c <= COMMUTE_TOL * self.norm(x) * self.norm(y)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Componentwise maximum of the Jacobi sum over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let e: Vec<Vector> = (0..n).map(|i| self.basis_vector(i)).collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.jacobi_sum(&e[i], &e[j], &e[k]);
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }

    pub fn jacobi_sum(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let b = |a: &Vector, c: &Vector| self.bracket_unchecked(a, c);
        b(&b(x, y), z) + b(&b(y, z), x) + b(&b(z, x), y)
    }

    /// Maximum over basis triples of `|g([X,Y],Z) + g(Y,[X,Z])|` for the inner
    /// product with Gram matrix `g`.
    pub fn ad_invariance_residual(&self, g: &Matrix) -> f64 {
        let n = self.dim;
        let e: Vec<Vector> = (0..n).map(|i| self.basis_vector(i)).collect();
        let mut worst = 0.0f64;
        for x in &e {
            let ad = self.ad_matrix(x);
            // g(ad Y, Z) + g(Y, ad Z) for all Y, Z is the matrix ad^T g + g ad
            let m = ad.transpose() * g + g * &ad;
            worst = worst.max(m.amax());
        }
        worst
    }

    /// Orthonormal basis of the centralizer `{Y : [X,Y] = 0}`, starting with `X/|X|`.
    pub fn centralizer_basis(&self, x: &Vector) -> Result<Subspace> {
        self.check_dim(x)?;
        if self.norm(x) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let ad = self.ad_matrix(x);
        let null = linalg::null_space(&ad, RANK_TOL);
        let mut seed = vec![x.clone()];
        seed.extend(null);
        Ok(Subspace::span(self, &seed))
    }

    /// Span of all basis brackets.
    pub fn derived_subalgebra(&self) -> Subspace {
        let n = self.dim;
        let mut v = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                v.push(self.bracket_unchecked(&self.basis_vector(i), &self.basis_vector(j)));
            }
        }
        Subspace::span(self, &v)
    }
}

fn collect_terms(dim: usize, structure: &[f64]) -> Vec<(usize, usize, usize, f64)> {
    let mut terms = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let c = structure[(i * dim + j) * dim + k];
                if c != 0.0 {
                    terms.push((i, j, k, c));
                }
            }
        }
    }
    terms
}

fn so3_constants() -> Vec<f64> {
    let mut c = vec![0.0; 27];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(i * 3 + j) * 3 + k] = 1.0;
        c[(j * 3 + i) * 3 + k] = -1.0;
    }
    c
}

fn detect_shape(alg: &LieAlgebra) -> AlgebraShape {
    let eye = alg.h0 == Matrix::identity(alg.dim, alg.dim);
    if alg.dim == 3 && eye && alg.structure == so3_constants() {
        return AlgebraShape::So3;
    }
    if alg.dim == 6 && eye && alg.structure == direct_sum_constants(3, &so3_constants(), 3, &so3_constants()) {
        return AlgebraShape::So4;
    }
    AlgebraShape::General
}

fn direct_sum_constants(n1: usize, c1: &[f64], n2: usize, c2: &[f64]) -> Vec<f64> {
    let n = n1 + n2;
    let mut c = vec![0.0; n * n * n];
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n1 {
                c[(i * n + j) * n + k] = c1[(i * n1 + j) * n1 + k];
            }
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            for k in 0..n2 {
                c[((n1 + i) * n + n1 + j) * n + n1 + k] = c2[(i * n2 + j) * n2 + k];
            }
        }
    }
    c
}

/// so(3) with `[e1,e2]=e3` cyclically and identity inner product.
pub fn build_so3() -> LieAlgebra {
    LieAlgebra::new("so3", 3, so3_constants(), Matrix::identity(3, 3)).expect("so3 is valid")
}

/// so(4) = so(3) + so(3), equal scale on both factors.
pub fn build_so4() -> LieAlgebra {
    let so3 = build_so3();
    let mut alg = direct_sum(&so3, &so3).expect("so4 is valid");
    alg.name = "so4".into();
    alg
}

/// Direct sum with block structure constants and block-diagonal inner product.
pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> Result<LieAlgebra> {
    let n1 = a.dim;
    let n2 = b.dim;
    let c = direct_sum_constants(n1, &a.structure, n2, &b.structure);
    let mut h = Matrix::zeros(n1 + n2, n1 + n2);
    h.view_mut((0, 0), (n1, n1)).copy_from(&a.h0);
    h.view_mut((n1, n1), (n2, n2)).copy_from(&b.h0);
    LieAlgebra::new(format!("{}+{}", a.name, b.name), n1 + n2, c, h)
}

/// An h0-orthonormal basis of a subspace with cached structural flags.
#[derive(Debug, Clone)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vector>,
    is_subalgebra: bool,
    is_abelian: bool,
    is_ideal: bool,
}

impl Subspace {
    /// Orthonormalize the given vectors (rank threshold `RANK_TOL`) and compute flags.
    pub fn span(alg: &LieAlgebra, vectors: &[Vector]) -> Subspace {
        let basis = linalg::orthonormalize(vectors, alg.h0(), RANK_TOL);
        Self::from_orthonormal(alg, basis)
    }

    fn from_orthonormal(alg: &LieAlgebra, basis: Vec<Vector>) -> Subspace {
        let mut s = Subspace { dim: alg.dim(), basis, is_subalgebra: false, is_abelian: false, is_ideal: false };
        s.recompute_flags(alg);
        s
    }

    pub fn zero(alg: &LieAlgebra) -> Subspace {
        Self::from_orthonormal(alg, Vec::new())
    }

    pub fn whole(alg: &LieAlgebra) -> Subspace {
        let e: Vec<Vector> = (0..alg.dim()).map(|i| alg.basis_vector(i)).collect();
        Self::span(alg, &e)
    }

    /// Span of a set of canonical basis indices.
    pub fn coordinate(alg: &LieAlgebra, indices: &[usize]) -> Subspace {
        let e: Vec<Vector> = indices.iter().map(|&i| alg.basis_vector(i)).collect();
        Self::span(alg, &e)
    }

    pub fn recompute_flags(&mut self, alg: &LieAlgebra) {
        let mut closure = 0.0f64;
        let mut abelian = 0.0f64;
        for (a, x) in self.basis.iter().enumerate() {
            for y in &self.basis[a + 1..] {
                let b = alg.bracket_unchecked(x, y);
                abelian = abelian.max(alg.norm(&b));
                closure = closure.max(alg.norm(&self.reject(alg, &b)));
            }
        }
        let mut ideal = 0.0f64;
        for i in 0..alg.dim() {
            let e = alg.basis_vector(i);
            for x in &self.basis {
                let b = alg.bracket_unchecked(&e, x);
                ideal = ideal.max(alg.norm(&self.reject(alg, &b)));
            }
        }
        self.is_subalgebra = closure <= CLOSURE_TOL;
        self.is_abelian = abelian <= CLOSURE_TOL;
        self.is_ideal = ideal <= CLOSURE_TOL;
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn is_subalgebra(&self) -> bool {
        self.is_subalgebra
    }

    pub fn is_abelian(&self) -> bool {
        self.is_subalgebra && self.is_abelian
    }

    pub fn is_ideal(&self) -> bool {
        self.is_ideal
    }

    /// Largest `|[a,b]^perp|` over basis pairs: how far the span is from closed.
    pub fn closure_residual(&self, alg: &LieAlgebra) -> f64 {
        let mut worst = 0.0f64;
        for (a, x) in self.basis.iter().enumerate() {
            for y in &self.basis[a + 1..] {
                worst = worst.max(alg.norm(&self.reject(alg, &alg.bracket_unchecked(x, y))));
            }
        }
        worst
    }

    pub fn abelian_residual(&self, alg: &LieAlgebra) -> f64 {
        let mut worst = 0.0f64;
        for (a, x) in self.basis.iter().enumerate() {
            for y in &self.basis[a + 1..] {
                worst = worst.max(alg.norm(&alg.bracket_unchecked(x, y)));
            }
        }
        worst
    }

    /// h0-orthogonal projection onto the subspace.
    pub fn project(&self, alg: &LieAlgebra, x: &Vector) -> Vector {
        let mut out = Vector::zeros(x.len());
        for q in &self.basis {
            out += q * alg.inner(q, x);
        }
        out
    }

    /// Component orthogonal to the subspace.
    pub fn reject(&self, alg: &LieAlgebra, x: &Vector) -> Vector {
        x - self.project(alg, x)
    }

    /// Matrix of the orthogonal projection in canonical coordinates.
    pub fn projector(&self, alg: &LieAlgebra) -> Matrix {
        let n = alg.dim();
        let mut p = Matrix::zeros(n, n);
        for j in 0..n {
            let e = alg.basis_vector(j);
            p.set_column(j, &self.project(alg, &e));
        }
        p
    }

    pub fn orthogonal_complement(&self, alg: &LieAlgebra) -> Subspace {
        let mut v = self.basis.clone();
        v.extend((0..alg.dim()).map(|i| alg.basis_vector(i)));
        let all = linalg::orthonormalize(&v, alg.h0(), RANK_TOL);
        let rest = all[self.basis.len()..].to_vec();
        Self::from_orthonormal(alg, rest)
    }

    pub fn contains(&self, alg: &LieAlgebra, x: &Vector, tol: f64) -> bool {
        alg.norm(&self.reject(alg, x)) <= tol * (1.0 + alg.norm(x))
    }
}

/// h0-orthogonal projection; `project(S, X) + project(S^perp, X) = X`.
pub fn project(alg: &LieAlgebra, s: &Subspace, x: &Vector) -> Result<Vector> {
    alg.check_dim(x)?;
    Ok(s.project(alg, x))
}
