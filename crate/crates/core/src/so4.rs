//! so(4) = so(3) + so(3): the catalog of known nonnegatively curved metrics,
//! the singular-eigenvector classifier, the block-basis construction, and the
//! six-tuple identities for commuting pairs `X in g1`, `Y in g2`.
//!
//! Canonical coordinates: indices 0..3 are `A_i = (e_i, 0)`, 3..6 are
//! `B_i = (0, e_i)`.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{puttmann_raw, third_derivative_raw};
use crate::error::{Error, Result};
use crate::lie::{build_so3, build_so4, AlgebraShape, LieAlgebra, Subspace};
use crate::linalg::{self, Matrix, Vector};
use crate::metrics::{Direction, MetricForm};
use crate::report::{AnalysisReport, Verdict, Witness};
use crate::sampling::{self, rng_for};
use crate::variations;

/// Default residual tolerance of the classifier.
pub const CLASSIFIER_TOL: f64 = 1e-8;
/// Singular values of `T_1` below this select the kernel branch.
pub const KERNEL_TOL: f64 = 1e-9;
/// Bisection steps for the zero of `F`.
pub const BISECTION_STEPS: usize = 60;
/// Default tolerance of the six-tuple identity suite.
pub const IDENTITY_TOL: f64 = 1e-8;

pub fn require_so4(alg: &LieAlgebra) -> Result<()> {
    if alg.shape() != AlgebraShape::So4 {
        return Err(Error::WrongAlgebra { name: alg.name().to_string(), dim: alg.dim() });
    }
    Ok(())
}

fn embed(first: &Vector3<f64>, second: &Vector3<f64>) -> Vector {
    Vector::from_iterator(6, first.iter().chain(second.iter()).copied())
}

fn g2_part(z: &Vector) -> Vector3<f64> {
    Vector3::new(z[3], z[4], z[5])
}

/// Flip so the largest-magnitude entry is positive.
fn sign_normalized(v: Vector3<f64>) -> Vector3<f64> {
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

/// Unit vector orthogonal to `u`, built from the coordinate axis least aligned with it.
fn perpendicular(u: &Vector3<f64>) -> Vector3<f64> {
    let k = u.iamin();
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    (e - u * u.dot(&e)).normalize()
}

// ---------------------------------------------------------------------------
// torus form

/// Parameters of the torus-form family: factor scales `c`, `d` and the 2x2
/// block `[[a1, a3], [a3, a2]]` on `span{A3, B1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub c: f64,
    pub d: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Smallest eigenvalue of `diag(4c/3, 4d/3) - block` and its eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub margin: f64,
    pub direction: [f64; 2],
    pub satisfied: bool,
}

impl TorusParams {
    /// The matrix in basis `{A1, A2, A3, B1, B2, B3}`, without validation.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::from_diagonal(&Vector::from_row_slice(&[self.c, self.c, self.a1, self.a2, self.d, self.d]));
        m[(2, 3)] = self.a3;
        m[(3, 2)] = self.a3;
        m
    }

    pub fn constraint(&self) -> ConstraintCheck {
        let gap = Matrix::from_row_slice(2, 2, &[4.0 * self.c / 3.0 - self.a1, -self.a3, -self.a3, 4.0 * self.d / 3.0 - self.a2]);
        let (vals, vecs) = linalg::sorted_eigen(&gap);
        let scale = self.c.abs().max(self.d.abs()).max(1.0);
        ConstraintCheck {
            margin: vals[0],
            direction: [vecs[(0, 0)], vecs[(1, 0)]],
            satisfied: vals[0] >= -1e-12 * scale,
        }
    }

    /// The torus-form metric, validated (SPD block, `c, d > 0`, 4/3 bound).
    pub fn metric(&self) -> Result<MetricForm> {
        if !(self.c > 0.0 && self.d > 0.0) {
            return Err(Error::InvalidParameter(format!("factor scales must be positive (c={}, d={})", self.c, self.d)));
        }
        let block = Matrix::from_row_slice(2, 2, &[self.a1, self.a3, self.a3, self.a2]);
        linalg::check_spd(&block, 0.0)?;
        let check = self.constraint();
        if !check.satisfied {
            return Err(Error::TorusConstraint { direction: check.direction, margin: check.margin });
        }
        MetricForm::new(self.matrix())
    }

    /// The same pattern read as a direction (no constraints).
    pub fn direction(&self) -> Direction {
        Direction::new(self.matrix()).expect("symmetric by construction")
    }
}

pub fn torus_metric(p: &TorusParams) -> Result<MetricForm> {
    p.metric()
}

/// Both sides of the proof-plane identity
/// `k_h(aA1 + bB2, A2 + B3) = 3/4 (|aA3 + bB1|^2_{h~} - |aA3 + bB1|^2_h)`
/// with `h~ = diag(4c/3, 4d/3)` on `span{A3, B1}`.
pub fn proof_plane_sides(p: &TorusParams, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let so4 = build_so4();
    let phi = p.matrix();
    let phi_inv = linalg::inverse(&phi)?;
    let z1 = Vector::from_row_slice(&[alpha, 0.0, 0.0, 0.0, beta, 0.0]);
    let z2 = Vector::from_row_slice(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let k = puttmann_raw(&so4, &phi, &phi_inv, &z1, &z2);
    let tilde = 4.0 / 3.0 * (p.c * alpha * alpha + p.d * beta * beta);
    let h = p.a1 * alpha * alpha + 2.0 * p.a3 * alpha * beta + p.a2 * beta * beta;
    Ok((k, 0.75 * (tilde - h)))
}

/// Plane from the proof-plane family along the worst constraint direction.
/// Negative value certifies a negatively curved plane.
pub fn proof_plane_witness(p: &TorusParams) -> Result<(Vector, Vector, f64)> {
    let dir = p.constraint().direction;
    let (k, _) = proof_plane_sides(p, dir[0], dir[1])?;
    let z1 = Vector::from_row_slice(&[dir[0], 0.0, 0.0, 0.0, dir[1], 0.0]);
    let z2 = Vector::from_row_slice(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    Ok((z1, z2, k))
}

// ---------------------------------------------------------------------------
// S^3-action family

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3Params {
    pub a: f64,
    pub b: f64,
    pub lambda: [f64; 3],
    /// `t_i = lambda_i / (1 + lambda_i)`.
    pub t: [f64; 3],
}

/// Samples and refinement used when gating a lambda triple.
const SO3_GATE_SAMPLES: usize = 64;
const SO3_GATE_STEPS: usize = 40;
/// Nonnegativity tolerance (relative to the largest eigenvalue) for the gate.
pub const SO3_GATE_TOL: f64 = 1e-9;

/// Empirical gate: `diag(lambda)` must be nonnegatively curved on so(3).
pub fn so3_triple_is_valid(lambda: &[f64; 3]) -> Result<bool> {
    if lambda.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Ok(false);
    }
    let phi = MetricForm::from_diagonal(lambda)?;
    let est = variations::min_curvature_estimate(&build_so3(), &phi, SO3_GATE_SAMPLES, SO3_GATE_STEPS, 0)?;
    let scale = lambda.iter().fold(1.0f64, |a, l| a.max(*l));
    Ok(est.value >= -SO3_GATE_TOL * scale * scale)
}

impl S3Params {
    /// Validated parameters: `a, b > 0` and a nonnegatively curved lambda triple.
    pub fn new(a: f64, b: f64, lambda: [f64; 3]) -> Result<Self> {
        let p = Self::unchecked(a, b, lambda);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!("factor scales must be positive (a={a}, b={b})")));
        }
        if !so3_triple_is_valid(&lambda)? {
            return Err(Error::InvalidParameter(format!("lambda triple {lambda:?} is not nonnegatively curved on so(3)")));
        }
        Ok(p)
    }

    pub fn unchecked(a: f64, b: f64, lambda: [f64; 3]) -> Self {
        let t = lambda.map(|l| l / (1.0 + l));
        S3Params { a, b, lambda, t }
    }

    /// Block of `V_i = span{A_i, B_i}`.
    pub fn block(&self, i: usize) -> [[f64; 2]; 2] {
        let (a, b, t) = (self.a, self.b, self.t[i]);
        let s = 1.0 / (a + b);
        let off = s * a * b * (t - 1.0);
        [[s * a * (b + a * t), off], [off, s * b * (a + b * t)]]
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(6, 6);
        for i in 0..3 {
            let blk = self.block(i);
            m[(i, i)] = blk[0][0];
            m[(i, 3 + i)] = blk[0][1];
            m[(3 + i, i)] = blk[1][0];
            m[(3 + i, 3 + i)] = blk[1][1];
        }
        m
    }
}

pub fn s3_metric(p: &S3Params) -> Result<MetricForm> {
    MetricForm::new(p.matrix())
}

/// Block-diagonal `Psi_i = diag(alpha, beta) - 1/(2 lambda_i) [[1,1],[1,1]]` on `V_i`.
pub fn s3_direction(alpha: f64, beta: f64, lambda: &[f64; 3]) -> Result<Direction> {
    let mut m = Matrix::zeros(6, 6);
    for (i, &l) in lambda.iter().enumerate() {
        if l == 0.0 || !l.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda_{} = {l} must be finite and nonzero", i + 1)));
        }
        let k = 1.0 / (2.0 * l);
        m[(i, i)] = alpha - k;
        m[(3 + i, 3 + i)] = beta - k;
        m[(i, 3 + i)] = -k;
        m[(3 + i, i)] = -k;
    }
    Direction::new(m)
}

/// Least-squares fit of a direction to the `s3_direction` pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3Fit {
    pub alpha: f64,
    pub beta: f64,
    /// Fitted `lambda_i`, i.e. `1 / (2 k_i)` for the rank-one weights `k_i`.
    pub lambda: [f64; 3],
    /// Largest entrywise deviation from the fitted pattern.
    pub residual: f64,
}

pub fn fit_s3_pattern(psi: &Matrix) -> Result<S3Fit> {
    if psi.nrows() != 6 || psi.ncols() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, found: psi.nrows() });
    }
    // unknowns (alpha, beta, k1, k2, k3); three equations per block
    let mut a = Matrix::zeros(9, 5);
    let mut rhs = Vector::zeros(9);
    for i in 0..3 {
        let r = 3 * i;
        a[(r, 0)] = 1.0;
        a[(r, 2 + i)] = -1.0;
        rhs[r] = psi[(i, i)];
        a[(r + 1, 1)] = 1.0;
        a[(r + 1, 2 + i)] = -1.0;
        rhs[r + 1] = psi[(3 + i, 3 + i)];
        a[(r + 2, 2 + i)] = -1.0;
        rhs[r + 2] = 0.5 * (psi[(i, 3 + i)] + psi[(3 + i, i)]);
    }
    let sol = a.svd(true, true).solve(&rhs, 1e-14).map_err(|e| Error::InvalidStructure(e.to_string()))?;
    let (alpha, beta) = (sol[0], sol[1]);
    let k = [sol[2], sol[3], sol[4]];
    let fitted = {
        let mut m = Matrix::zeros(6, 6);
        for i in 0..3 {
            m[(i, i)] = alpha - k[i];
            m[(3 + i, 3 + i)] = beta - k[i];
            m[(i, 3 + i)] = -k[i];
            m[(3 + i, i)] = -k[i];
        }
        m
    };
    Ok(S3Fit { alpha, beta, lambda: k.map(|k| 1.0 / (2.0 * k)), residual: (psi - fitted).amax() })
}

// ---------------------------------------------------------------------------
// classifier

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Product,
    TorusForm,
    /// Has a singular eigenvector but is neither a product nor torus form.
    SingularNotTorus,
    NoSingularEigenvector,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::Product => "PRODUCT",
            VerdictKind::TorusForm => "TORUS_FORM",
            VerdictKind::SingularNotTorus => "SINGULAR_NOT_TORUS",
            VerdictKind::NoSingularEigenvector => "NO_SINGULAR_EIGENVECTOR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierVerdict {
    pub kind: VerdictKind,
    /// Adapted basis `{A1, A2, A3, B1, B2, B3}` as canonical coordinates.
    pub basis: Vec<Vec<f64>>,
    pub residuals: BTreeMap<String, f64>,
    pub singular_eigenvectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintCheck>,
}

impl ClassifierVerdict {
    pub fn basis_matrix(&self) -> Matrix {
        let cols: Vec<Vector> = self.basis.iter().map(|c| Vector::from_row_slice(c)).collect();
        linalg::columns_to_matrix(6, &cols)
    }
}

/// Eigenvectors of `psi` lying (within `tol`) in one factor, one per
/// eigen-cluster and factor.
pub fn singular_eigenvectors(psi: &Direction, tol: f64) -> Vec<Vector> {
    let vals = psi.eigenvalues();
    let vecs = psi.eigenvectors();
    let scale = psi.operator_norm().max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..vals.len() {
        match clusters.last_mut() {
            Some(c) if vals[i] - vals[*c.last().unwrap()] <= tol * scale => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let mut found = Vec::new();
    for cluster in clusters {
        let e = linalg::columns_to_matrix(6, &cluster.iter().map(|&i| vecs.column(i).clone_owned()).collect::<Vec<_>>());
        for other in [3usize, 0] {
            // null vectors of the other factor's rows give eigenvectors inside this factor
            let rows = e.rows(other, 3).clone_owned();
            let (gv, gvec) = linalg::sorted_eigen(&(rows.transpose() * &rows));
            if gv[0] <= tol * tol {
                let z = &e * gvec.column(0);
                found.push(z.normalize());
            }
        }
    }
    found
}

fn torus_pattern_residual(m: &Matrix) -> (f64, f64, f64) {
    let c = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let d = 0.5 * (m[(4, 4)] + m[(5, 5)]);
    let mut expected = m.clone();
    for i in 0..6 {
        for j in 0..6 {
            let keep = matches!((i.min(j), i.max(j)), (2, 2) | (2, 3) | (3, 3));
            if !keep {
                expected[(i, j)] = 0.0;
            }
        }
    }
    for (i, v) in [(0, c), (1, c), (4, d), (5, d)] {
        expected[(i, i)] = v;
    }
    ((m - expected).amax(), c, d)
}

/// Classifies a direction on so(4) by its singular eigenvectors.
pub fn classify_direction(alg: &LieAlgebra, psi: &Direction, tol: f64) -> Result<ClassifierVerdict> {
    require_so4(alg)?;
    let m = psi.matrix();
    let singular = singular_eigenvectors(psi, tol);
    let mut residuals = BTreeMap::new();
    let cross = m.view((0, 3), (3, 3)).clone_owned();
    let product_residual = cross.amax();
    residuals.insert("product".to_string(), product_residual);
    let vec_rows = |v: &[Vector]| v.iter().map(|x| x.iter().copied().collect()).collect::<Vec<Vec<f64>>>();
    let identity_basis = (0..6).map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut verdict = ClassifierVerdict {
        kind: VerdictKind::NoSingularEigenvector,
        basis: identity_basis,
        residuals,
        singular_eigenvectors: vec_rows(&singular),
        torus: None,
        constraint: None,
    };
    if product_residual <= tol {
        verdict.kind = VerdictKind::Product;
        return Ok(verdict);
    }
    if singular.is_empty() {
        return Ok(verdict);
    }
    // torus form: the cross block has rank one, u (in g1) = A3, v (in g2) = B1
    let svd = cross.clone().svd(true, true);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let uu = svd.u.as_ref().expect("u");
    let vt = svd.v_t.as_ref().expect("v_t");
    let u = Vector3::new(uu[(0, order[0])], uu[(1, order[0])], uu[(2, order[0])]);
    let v = Vector3::new(vt[(order[0], 0)], vt[(order[0], 1)], vt[(order[0], 2)]);
    let (a3, b1) = (sign_normalized(u), sign_normalized(v));
    let a1 = perpendicular(&a3);
    let a2 = a3.cross(&a1);
    let b2 = perpendicular(&b1);
    let b3 = b1.cross(&b2);
    let z = Vector3::zeros();
    let cols = [embed(&a1, &z), embed(&a2, &z), embed(&a3, &z), embed(&z, &b1), embed(&z, &b2), embed(&z, &b3)];
    let q = linalg::columns_to_matrix(6, &cols);
    let adapted = q.transpose() * m * &q;
    let (res, c, d) = torus_pattern_residual(&adapted);
    verdict.residuals.insert("torus".to_string(), res);
    verdict.residuals.insert("cross_rank2".to_string(), svd.singular_values[order[1]]);
    verdict.basis = vec_rows(&cols);
    if res <= tol * m.amax().max(1.0) {
        verdict.kind = VerdictKind::TorusForm;
        verdict.torus = Some(TorusParams { c, d, a1: adapted[(2, 2)], a2: adapted[(3, 3)], a3: adapted[(2, 3)] });
    } else {
        verdict.kind = VerdictKind::SingularNotTorus;
    }
    Ok(verdict)
}

/// Classifies `I - Phi^{-1}`; for torus form also evaluates the 4/3 bound on `Phi`.
pub fn classify_metric(alg: &LieAlgebra, phi: &MetricForm, tol: f64) -> Result<ClassifierVerdict> {
    require_so4(alg)?;
    let psi = crate::metrics::direction_from_metric(phi)?;
    let mut verdict = classify_direction(alg, &psi, tol)?;
    if verdict.kind == VerdictKind::TorusForm {
        let q = verdict.basis_matrix();
        let adapted = q.transpose() * phi.matrix() * &q;
        let (_, c, d) = torus_pattern_residual(&adapted);
        let params = TorusParams { c, d, a1: adapted[(2, 2)], a2: adapted[(3, 3)], a3: adapted[(2, 3)] };
        verdict.torus = Some(params);
        verdict.constraint = Some(params.constraint());
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// invariant abelian planes and the block basis

/// Abelian plane `span{(u, 0), (0, v)}` with its invariance residual.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPlane {
    pub u: Vector3<f64>,
    pub v: Vector3<f64>,
    pub residual: f64,
}

impl InvariantPlane {
    pub fn subspace(&self, alg: &LieAlgebra) -> Subspace {
        let z = Vector3::zeros();
        Subspace::span(alg, &[embed(&self.u, &z), embed(&z, &self.v)])
    }
}

/// `|(I - P) Psi W|_F` for the plane spanned by `(u,0)`, `(0,v)`.
pub fn plane_residual(psi: &Matrix, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    let (u, v) = (u.normalize(), v.normalize());
    let z = Vector3::zeros();
    let w1 = embed(&u, &z);
    let w2 = embed(&z, &v);
    let mut total = 0.0;
    for w in [&w1, &w2] {
        let pw = psi * w;
        let r = &pw - &w1 * w1.dot(&pw) - &w2 * w2.dot(&pw);
        total += r.norm_squared();
    }
    total.sqrt()
}

fn sphere(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn angles(v: &Vector3<f64>) -> (f64, f64) {
    let v = v.normalize();
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            Vector3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

fn refine_plane(psi: &Matrix, u: Vector3<f64>, v: Vector3<f64>, step: f64) -> InvariantPlane {
    let mut x = {
        let (a, b) = angles(&u);
        let (c, d) = angles(&v);
        [a, b, c, d]
    };
    let eval = |x: &[f64; 4]| plane_residual(psi, &sphere(x[0], x[1]), &sphere(x[2], x[3]));
    let mut best = eval(&x);
    let mut h = step;
    for _ in 0..400 {
        if h < 1e-15 || best == 0.0 {
            break;
        }
        let mut improved = false;
        for k in 0..4 {
            for s in [1.0, -1.0] {
                let mut y = x;
                y[k] += s * h;
                let r = eval(&y);
                if r < best {
                    best = r;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    InvariantPlane { u: sign_normalized(sphere(x[0], x[1])), v: sign_normalized(sphere(x[2], x[3])), residual: best }
}

/// Best plane found: eigenvector pairs first (exact for generic spectra), then
/// a sphere-by-sphere grid with pattern-search refinement.
pub fn search_invariant_plane(alg: &LieAlgebra, psi: &Direction, grid: usize) -> Result<InvariantPlane> {
    require_so4(alg)?;
    let m = psi.matrix();
    let vecs = psi.eigenvectors();
    let mut best: Option<InvariantPlane> = None;
    let offer = |cand: InvariantPlane, best: &mut Option<InvariantPlane>| {
        if best.as_ref().is_none_or(|b| cand.residual < b.residual) {
            *best = Some(cand);
        }
    };
    for i in 0..6 {
        for j in (i + 1)..6 {
            let w = linalg::columns_to_matrix(6, &[vecs.column(i).clone_owned(), vecs.column(j).clone_owned()]);
            let top = |block: Matrix| -> Option<Vector3<f64>> {
                let svd = block.svd(true, false);
                let k = svd.singular_values.imax();
                if svd.singular_values[k] < 1e-6 {
                    return None;
                }
                let u = svd.u.expect("u");
                Some(Vector3::new(u[(0, k)], u[(1, k)], u[(2, k)]))
            };
            if let (Some(u), Some(v)) = (top(w.rows(0, 3).clone_owned()), top(w.rows(3, 3).clone_owned())) {
                let (u, v) = (sign_normalized(u), sign_normalized(v));
                offer(InvariantPlane { u, v, residual: plane_residual(m, &u, &v) }, &mut best);
            }
        }
    }
    if best.as_ref().is_none_or(|b| b.residual > 1e-13 * m.amax().max(1.0)) {
        let pts = fibonacci_sphere(grid.max(4));
        let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(pts.len() * pts.len());
        for (i, u) in pts.iter().enumerate() {
            for (j, v) in pts.iter().enumerate() {
                scored.push((plane_residual(m, u, v), i, j));
            }
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let step = (4.0 * std::f64::consts::PI / grid.max(4) as f64).sqrt();
        for &(_, i, j) in scored.iter().take(8) {
            offer(refine_plane(m, pts[i], pts[j], step), &mut best);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// First-class search: `Some` when the best plane has residual at most `tol`.
pub fn find_invariant_abelian_plane(alg: &LieAlgebra, psi: &Direction, grid: usize, tol: f64) -> Result<Option<InvariantPlane>> {
    let best = search_invariant_plane(alg, psi, grid)?;
    Ok((best.residual <= tol * psi.operator_norm().max(1.0)).then_some(best))
}

/// Coefficients of the nine-parameter block pattern.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Th2Params {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Canonical indices of the block order `{A1, B1, A2, B2, A3, B3}`.
pub const BLOCK_ORDER: [usize; 6] = [0, 3, 1, 4, 2, 5];

impl Th2Params {
    /// `Psi` in canonical coordinates: `<Psi A1, B1> = a3`, `<Psi A2, A3> = lambda`,
    /// `<Psi B2, B3> = mu`, and so on.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(6, 6);
        let mut set = |i: usize, j: usize, x: f64| {
            m[(i, j)] = x;
            m[(j, i)] = x;
        };
        set(0, 0, self.a1);
        set(0, 3, self.a3);
        set(3, 3, self.a2);
        set(1, 1, self.b1);
        set(1, 4, self.b3);
        set(4, 4, self.b2);
        set(2, 2, self.c1);
        set(2, 5, self.c3);
        set(5, 5, self.c2);
        set(1, 2, self.lambda);
        set(4, 5, self.mu);
        m
    }

    /// Read the parameters from a matrix in block order, returning the
    /// largest off-pattern entry as residual.
    pub fn from_block_matrix(m: &Matrix) -> (Self, f64) {
        let p = Th2Params {
            a1: m[(0, 0)],
            a3: m[(0, 1)],
            a2: m[(1, 1)],
            b1: m[(2, 2)],
            b3: m[(2, 3)],
            b2: m[(3, 3)],
            c1: m[(4, 4)],
            c3: m[(4, 5)],
            c2: m[(5, 5)],
            lambda: m[(2, 4)],
            mu: m[(3, 5)],
        };
        let pattern = [(0, 0), (0, 1), (1, 1), (2, 2), (2, 3), (3, 3), (4, 4), (4, 5), (5, 5), (2, 4), (3, 5)];
        let mut residual = 0.0f64;
        for i in 0..6 {
            for j in i..6 {
                if !pattern.contains(&(i, j)) {
                    residual = residual.max(m[(i, j)].abs()).max(m[(j, i)].abs());
                }
            }
        }
        (p, residual)
    }
}

/// Output of the block-basis construction.
#[derive(Debug, Clone)]
pub struct BlockBasis {
    pub a: [Vector; 3],
    pub b: [Vector; 3],
    /// `Psi` in the order `{A1, B1, A2, B2, A3, B3}`.
    pub psi_in_basis: Matrix,
    pub params: Th2Params,
    pub residual: f64,
    /// Whether `T_1` was singular and the kernel branch was taken.
    pub kernel_branch: bool,
}

impl BlockBasis {
    /// Columns `{A1, A2, A3, B1, B2, B3}`.
    pub fn matrix(&self) -> Matrix {
        let cols: Vec<Vector> = self.a.iter().chain(self.b.iter()).cloned().collect();
        linalg::columns_to_matrix(6, &cols)
    }
}

/// Finds an invariant abelian plane, then builds the adapted basis.
pub fn canonical_block_basis(alg: &LieAlgebra, psi: &Direction, tol: f64) -> Result<BlockBasis> {
    let best = search_invariant_plane(alg, psi, 40)?;
    if best.residual > tol * psi.operator_norm().max(1.0) {
        return Err(Error::NoInvariantPlane { best_residual: best.residual });
    }
    canonical_block_basis_from_plane(alg, psi, &best.u, &best.v)
}

/// Basis construction given `A1 = (u, 0)` and `B1 = (0, v)` spanning an
/// invariant abelian plane: `A2` solves `F(A) = <T1 A, T1 R A> = 0` by bisection,
/// `A3 = A1 x A2`, and `B2, B3` follow from the images under `T1`.
pub fn canonical_block_basis_from_plane(alg: &LieAlgebra, psi: &Direction, u: &Vector3<f64>, v: &Vector3<f64>) -> Result<BlockBasis> {
    require_so4(alg)?;
    let m = psi.matrix();
    let u = sign_normalized(u.normalize());
    let v = sign_normalized(v.normalize());
    let z = Vector3::zeros();
    let t1 = |a: &Vector3<f64>| g2_part(&(m * embed(a, &z)));
    let p = perpendicular(&u);
    let q = u.cross(&p);
    let at = |theta: f64| p * theta.cos() + q * theta.sin();

    let tp = t1(&p);
    let tq = t1(&q);
    let tm = nalgebra::Matrix3x2::from_columns(&[tp, tq]);
    let sv = tm.svd(false, true);
    let (smax, smin) = (sv.singular_values.max(), sv.singular_values.min());
    let kernel_branch = smin < KERNEL_TOL;

    let (a2, b2) = if !kernel_branch {
        let f = |theta: f64| {
            let a = at(theta);
            t1(&a).dot(&t1(&u.cross(&a)))
        };
        let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
        let f_lo = f(lo);
        let theta = if f_lo == 0.0 {
            0.0
        } else {
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let a2 = sign_normalized(at(theta));
        let b2 = sign_normalized(t1(&a2).normalize());
        (a2, b2)
    } else if smax < KERNEL_TOL {
        (p, sign_normalized(perpendicular(&v)))
    } else {
        // kernel direction of T1 within V1
        let vt = sv.v_t.expect("v_t");
        let k = sv.singular_values.imin();
        let a2 = sign_normalized(p * vt[(k, 0)] + q * vt[(k, 1)]);
        let a3 = u.cross(&a2);
        let b3 = t1(&a3).normalize();
        (a2, sign_normalized(b3.cross(&v)))
    };
    let a3 = u.cross(&a2);
    let b3 = v.cross(&b2);
    let a = [embed(&u, &z), embed(&a2, &z), embed(&a3, &z)];
    let b = [embed(&z, &v), embed(&z, &b2), embed(&z, &b3)];
    let ordered = [&a[0], &b[0], &a[1], &b[1], &a[2], &b[2]];
    let qm = linalg::columns_to_matrix(6, &ordered.iter().map(|c| (*c).clone()).collect::<Vec<_>>());
    let psi_in_basis = qm.transpose() * m * &qm;
    let (params, residual) = Th2Params::from_block_matrix(&psi_in_basis);
    Ok(BlockBasis { a, b, psi_in_basis, params, residual, kernel_branch })
}

// ---------------------------------------------------------------------------
// six-tuples

/// `delta = (1/6) kappa'''(0)` for `X = sum alpha_i A_i`, `Y = sum beta_i B_i`
/// under the direction assembled from `params`.
pub fn six_tuple(params: &Th2Params, alphas: [f64; 3], betas: [f64; 3]) -> f64 {
    let so4 = build_so4();
    let x = Vector::from_row_slice(&[alphas[0], alphas[1], alphas[2], 0.0, 0.0, 0.0]);
    let y = Vector::from_row_slice(&[0.0, 0.0, 0.0, betas[0], betas[1], betas[2]]);
    third_derivative_raw(&so4, &params.matrix(), &x, &y)
}

type Tuple = ([f64; 3], [f64; 3]);

const fn tup(t: [f64; 6]) -> Tuple {
    ([t[0], t[1], t[2]], [t[3], t[4], t[5]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `b3 = 0`.
    B3Zero,
    /// `c3 = 0`.
    C3Zero,
}

/// One identity: a signed sum of six-tuples equals a closed-form right side
/// under the branch assumption plus extra parameter constraints.
pub struct SixTupleIdentity {
    pub name: &'static str,
    pub branch: Branch,
    pub terms: Vec<(f64, Tuple)>,
    pub constrain: fn(&mut Th2Params),
    pub rhs: fn(&Th2Params) -> f64,
}

impl SixTupleIdentity {
    pub fn lhs(&self, p: &Th2Params) -> f64 {
        self.terms.iter().map(|(w, (a, b))| w * six_tuple(p, *a, *b)).sum()
    }

    /// Applies the branch and the extra constraints to a raw draw.
    pub fn prepare(&self, mut p: Th2Params) -> Th2Params {
        match self.branch {
            Branch::B3Zero => p.b3 = 0.0,
            Branch::C3Zero => p.c3 = 0.0,
        }
        (self.constrain)(&mut p);
        p
    }
}

fn none(_: &mut Th2Params) {}

fn sq(x: f64) -> f64 {
    x * x
}

/// The identities used in the singular-eigenvector argument, in both branches.
/// Six-tuples are normalized as `delta = (1/6) kappa'''(0)`.
pub fn th1_identities() -> Vec<SixTupleIdentity> {
    let one = |t: [f64; 6]| vec![(1.0, tup(t))];
    let pair = |s: [f64; 6], t: [f64; 6]| vec![(1.0, tup(s)), (1.0, tup(t))];
    vec![
        SixTupleIdentity {
            name: "[0,1,1,1,0,0] = c3^2(a2-b2) + 4a3^2 lambda",
            branch: Branch::B3Zero,
            terms: one([0., 1., 1., 1., 0., 0.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.a2 - p.b2) + 4.0 * sq(p.a3) * p.lambda,
        },
        SixTupleIdentity {
            name: "[0,-1,1,1,0,0] = c3^2(a2-b2) - 4a3^2 lambda",
            branch: Branch::B3Zero,
            terms: one([0., -1., 1., 1., 0., 0.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.a2 - p.b2) - 4.0 * sq(p.a3) * p.lambda,
        },
        SixTupleIdentity {
            name: "[0,0,1,0,1,0] + [0,0,1,0,0,1] = c3^2(b2-a2)",
            branch: Branch::B3Zero,
            terms: pair([0., 0., 1., 0., 1., 0.], [0., 0., 1., 0., 0., 1.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.b2 - p.a2),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,1,1] = c3^2(a1-b1) + 4a3^2 mu",
            branch: Branch::B3Zero,
            terms: one([1., 0., 0., 0., 1., 1.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.a1 - p.b1) + 4.0 * sq(p.a3) * p.mu,
        },
        SixTupleIdentity {
            name: "[1,0,0,0,-1,1] = c3^2(a1-b1) - 4a3^2 mu",
            branch: Branch::B3Zero,
            terms: one([1., 0., 0., 0., -1., 1.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.a1 - p.b1) - 4.0 * sq(p.a3) * p.mu,
        },
        SixTupleIdentity {
            name: "[0,1,0,0,1,0] + [0,1,0,0,0,1] = c3^2(b1-a1)",
            branch: Branch::B3Zero,
            terms: pair([0., 1., 0., 0., 1., 0.], [0., 1., 0., 0., 0., 1.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.b1 - p.a1),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,1,0] + [1,0,0,0,0,1] = c3^2(a1-b1)",
            branch: Branch::B3Zero,
            terms: pair([1., 0., 0., 0., 1., 0.], [1., 0., 0., 0., 0., 1.]),
            constrain: none,
            rhs: |p| sq(p.c3) * (p.a1 - p.b1),
        },
        SixTupleIdentity {
            name: "[0,1,0,1,0,0] = a3^2(b1-c1)",
            branch: Branch::B3Zero,
            terms: one([0., 1., 0., 1., 0., 0.]),
            constrain: none,
            rhs: |p| sq(p.a3) * (p.b1 - p.c1),
        },
        SixTupleIdentity {
            name: "[0,0,1,1,0,0] = -a3^2(b1-c1) when a2 = b2",
            branch: Branch::B3Zero,
            terms: one([0., 0., 1., 1., 0., 0.]),
            constrain: |p| p.b2 = p.a2,
            rhs: |p| -sq(p.a3) * (p.b1 - p.c1),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,1,0] = a3^2(b2-c2)",
            branch: Branch::B3Zero,
            terms: one([1., 0., 0., 0., 1., 0.]),
            constrain: none,
            rhs: |p| sq(p.a3) * (p.b2 - p.c2),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,0,1] = -a3^2(b2-c2) when a1 = b1",
            branch: Branch::B3Zero,
            terms: one([1., 0., 0., 0., 0., 1.]),
            constrain: |p| p.b1 = p.a1,
            rhs: |p| -sq(p.a3) * (p.b2 - p.c2),
        },
        SixTupleIdentity {
            name: "[1,1,1,1,1,1] + [1,1,1,1,1,-1] = 2a3^2 c3 on the reduced family",
            branch: Branch::B3Zero,
            terms: pair([1., 1., 1., 1., 1., 1.], [1., 1., 1., 1., 1., -1.]),
            constrain: reduced_family,
            rhs: |p| 2.0 * sq(p.a3) * p.c3,
        },
        SixTupleIdentity {
            name: "[1,1,1,-1,1,1] + [1,1,1,1,-1,1] = -2a3^2 c3 on the reduced family",
            branch: Branch::B3Zero,
            terms: pair([1., 1., 1., -1., 1., 1.], [1., 1., 1., 1., -1., 1.]),
            constrain: reduced_family,
            rhs: |p| -2.0 * sq(p.a3) * p.c3,
        },
        SixTupleIdentity {
            name: "[0,1,1,1,0,0] = b3^2(a2-c2) + 4a3^2 lambda",
            branch: Branch::C3Zero,
            terms: one([0., 1., 1., 1., 0., 0.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.a2 - p.c2) + 4.0 * sq(p.a3) * p.lambda,
        },
        SixTupleIdentity {
            name: "[0,-1,1,1,0,0] = b3^2(a2-c2) - 4a3^2 lambda",
            branch: Branch::C3Zero,
            terms: one([0., -1., 1., 1., 0., 0.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.a2 - p.c2) - 4.0 * sq(p.a3) * p.lambda,
        },
        SixTupleIdentity {
            name: "[0,0,1,0,1,0] + [0,0,1,0,0,1] = b3^2(c1-a1)",
            branch: Branch::C3Zero,
            terms: pair([0., 0., 1., 0., 1., 0.], [0., 0., 1., 0., 0., 1.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.c1 - p.a1),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,1,1] = b3^2(a1-c1) + 4a3^2 mu",
            branch: Branch::C3Zero,
            terms: one([1., 0., 0., 0., 1., 1.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.a1 - p.c1) + 4.0 * sq(p.a3) * p.mu,
        },
        SixTupleIdentity {
            name: "[1,0,0,0,-1,1] = b3^2(a1-c1) - 4a3^2 mu",
            branch: Branch::C3Zero,
            terms: one([1., 0., 0., 0., -1., 1.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.a1 - p.c1) - 4.0 * sq(p.a3) * p.mu,
        },
        SixTupleIdentity {
            name: "[1,0,0,0,1,0] + [1,0,0,0,0,1] = b3^2(a1-c1)",
            branch: Branch::C3Zero,
            terms: pair([1., 0., 0., 0., 1., 0.], [1., 0., 0., 0., 0., 1.]),
            constrain: none,
            rhs: |p| sq(p.b3) * (p.a1 - p.c1),
        },
        SixTupleIdentity {
            name: "[1,0,0,0,0,1] = -a3^2(b2-c2)",
            branch: Branch::C3Zero,
            terms: one([1., 0., 0., 0., 0., 1.]),
            constrain: none,
            rhs: |p| -sq(p.a3) * (p.b2 - p.c2),
        },
        SixTupleIdentity {
            name: "[0,0,1,1,0,0] = -a3^2(b1-c1)",
            branch: Branch::C3Zero,
            terms: one([0., 0., 1., 1., 0., 0.]),
            constrain: none,
            rhs: |p| -sq(p.a3) * (p.b1 - p.c1),
        },
    ]
}

/// `lambda = mu = 0`, `a1 = b1 = c1`, `a2 = b2 = c2`.
fn reduced_family(p: &mut Th2Params) {
    p.lambda = 0.0;
    p.mu = 0.0;
    p.b1 = p.a1;
    p.c1 = p.a1;
    p.b2 = p.a2;
    p.c2 = p.a2;
}

pub fn random_th2_params(rng: &mut impl Rng) -> Th2Params {
    let v = sampling::gaussian_vector(11, rng);
    Th2Params {
        a1: v[0],
        a2: v[1],
        a3: v[2],
        b1: v[3],
        b2: v[4],
        b3: v[5],
        c1: v[6],
        c2: v[7],
        c3: v[8],
        lambda: v[9],
        mu: v[10],
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn identity_holds(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Checks `identities` over `draws` random parameter sets; `rhs_offset` is
/// added to every right side (a sensitivity control).
pub fn verify_identities(identities: &[SixTupleIdentity], draws: usize, seed: u64, tol: f64, rhs_offset: f64) -> AnalysisReport {
    let mut report = AnalysisReport::new(tol, seed);
    report.samples = draws;
    for (k, id) in identities.iter().enumerate() {
        let mut worst = 0.0f64;
        for d in 0..draws as u64 {
            let mut rng = rng_for(seed, d);
            let p = id.prepare(random_th2_params(&mut rng));
            let lhs = id.lhs(&p);
            let rhs = (id.rhs)(&p) + rhs_offset;
            let gap = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
            worst = worst.max(gap);
            if !identity_holds(lhs, rhs, tol) {
                let x = Vector::from_row_slice(&[p.a1, p.a2, p.a3, p.b1, p.b2, p.b3]);
                let y = Vector::from_row_slice(&[p.c1, p.c2, p.c3, p.lambda, p.mu, k as f64]);
                report.push_witness(Witness::new(&x, &y, None, -gap, id.name));
            }
        }
        report.measure(&format!("max_gap[{}]", id.name), worst);
    }
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    report
}

/// The full identity suite at the default tolerance.
pub fn verify_th1_identities(draws: usize, seed: u64) -> AnalysisReport {
    verify_identities(&th1_identities(), draws, seed, IDENTITY_TOL, 0.0)
}

// ---------------------------------------------------------------------------
// catalog

/// A known nonnegatively curved metric with its construction parameters.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub family: &'static str,
    pub name: String,
    pub metric: MetricForm,
    pub params: serde_json::Value,
}

fn rotation3(rng: &mut impl Rng) -> Matrix {
    let mut q = sampling::orthogonal_matrix(3, rng);
    if q.determinant() < 0.0 {
        let c = -q.column(0).clone_owned();
        q.set_column(0, &c);
    }
    q
}

/// Automorphism `diag(R1, R2)` of so(4) with `R1, R2` in SO(3).
fn factor_rotation(r1: &Matrix, r2: &Matrix) -> Matrix {
    let mut q = Matrix::zeros(6, 6);
    q.view_mut((0, 0), (3, 3)).copy_from(r1);
    q.view_mut((3, 3), (3, 3)).copy_from(r2);
    q
}

fn conjugate(q: &Matrix, m: &Matrix) -> Matrix {
    linalg::symmetrize(&(q * m * q.transpose()))
}

/// Random nonnegatively curved eigenvalue triple for so(3) (near-round, gated).
pub fn random_so3_triple(rng: &mut impl Rng) -> Result<[f64; 3]> {
    loop {
        let scale = rng.gen_range(0.5..2.0);
        let lambda = [0, 1, 2].map(|_| scale * rng.gen_range(1.0..1.3));
        if so3_triple_is_valid(&lambda)? {
            return Ok(lambda);
        }
    }
}

pub fn random_torus_params(rng: &mut impl Rng) -> TorusParams {
    let c: f64 = rng.gen_range(0.5..2.0);
    let d: f64 = rng.gen_range(0.5..2.0);
    // block = D^{1/2} R diag(k) R^T D^{1/2} with k <= 1 stays below diag(4c/3, 4d/3)
    let k1 = rng.gen_range(0.3..0.95);
    let k2 = rng.gen_range(0.3..0.95);
    let th: f64 = rng.gen_range(0.3..1.2);
    let (s, co) = th.sin_cos();
    let r = Matrix::from_row_slice(2, 2, &[co, -s, s, co]);
    let dh = Matrix::from_diagonal(&Vector::from_row_slice(&[(4.0 * c / 3.0).sqrt(), (4.0 * d / 3.0).sqrt()]));
    let blk = &dh * &r * Matrix::from_diagonal(&Vector::from_row_slice(&[k1, k2])) * r.transpose() * &dh;
    TorusParams { c, d, a1: blk[(0, 0)], a2: blk[(1, 1)], a3: blk[(0, 1)] }
}

/// `per_family` members of each of the product, torus and S^3 families, each
/// conjugated by a random automorphism of so(4).
pub fn catalog(seed: u64, per_family: usize) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for i in 0..per_family {
        let mut rng = rng_for(seed, i as u64);
        let l1 = random_so3_triple(&mut rng)?;
        let l2 = random_so3_triple(&mut rng)?;
        let (r1, r2) = (rotation3(&mut rng), rotation3(&mut rng));
        let mut m = Matrix::zeros(6, 6);
        m.view_mut((0, 0), (3, 3)).copy_from(&conjugate(&r1, &Matrix::from_diagonal(&Vector::from_row_slice(&l1))));
        m.view_mut((3, 3), (3, 3)).copy_from(&conjugate(&r2, &Matrix::from_diagonal(&Vector::from_row_slice(&l2))));
        out.push(CatalogEntry {
            family: "product",
            name: format!("product_{i:02}"),
            metric: MetricForm::new(m)?,
            params: serde_json::json!({"family": "product", "lambda1": l1, "lambda2": l2}),
        });
    }
    for i in 0..per_family {
        let mut rng = rng_for(seed.wrapping_add(1), i as u64);
        let p = random_torus_params(&mut rng);
        let q = factor_rotation(&rotation3(&mut rng), &rotation3(&mut rng));
        let phi = p.metric()?;
        out.push(CatalogEntry {
            family: "torus",
            name: format!("torus_{i:02}"),
            metric: MetricForm::new(conjugate(&q, phi.matrix()))?,
            params: serde_json::json!({"family": "torus", "params": p}),
        });
    }
    for i in 0..per_family {
        let mut rng = rng_for(seed.wrapping_add(2), i as u64);
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(0.5..2.0);
        let lambda = random_so3_triple(&mut rng)?;
        let p = S3Params::new(a, b, lambda)?;
        let r = rotation3(&mut rng);
        let q = factor_rotation(&r, &r);
        out.push(CatalogEntry {
            family: "s3",
            name: format!("s3_{i:02}"),
            metric: MetricForm::new(conjugate(&q, &p.matrix()))?,
            params: serde_json::json!({"family": "s3", "params": p}),
        });
    }
    Ok(out)
}

/// Expected classifier kind of a catalog family.
pub fn expected_kind(family: &str) -> Option<VerdictKind> {
    match family {
        "product" => Some(VerdictKind::Product),
        "torus" => Some(VerdictKind::TorusForm),
        "s3" => Some(VerdictKind::NoSingularEigenvector),
        _ => None,
    }
}
