//! Unnormalized sectional curvature of left-invariant metrics and the
//! curvature variation `kappa(t)` along inverse-linear paths.
//!
//! Two independent routes compute the curvature: the closed bracket formula
//! of Püttmann ([`puttmann_curvature`]) and a Levi-Civita connection built
//! from the Koszul formula ([`koszul_oracle`]). The `_raw` entry points take an
//! arbitrary endomorphism self-adjoint for the algebra's reference inner
//! product, which is what lets the bi-invariant shift checks work against
//! inner products other than the identity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, COMMUTE_TOL};
use crate::linalg::{self, Matrix, Vector};
use crate::metrics::{self, Direction, MetricForm};

/// Püttmann's four-term formula for `k_h(Z1, Z2)` where `h = h0(Phi ., .)`.
pub fn puttmann_raw(alg: &LieAlgebra, phi: &Matrix, phi_inv: &Matrix, z1: &Vector, z2: &Vector) -> f64 {
    let br = |a: &Vector, b: &Vector| alg.bracket_unchecked(a, b);
    let pz1 = phi * z1;
    let pz2 = phi * z2;
    let z12 = br(z1, z2);
    let t1 = 0.5 * alg.inner(&(br(&pz1, z2) + br(z1, &pz2)), &z12);
    let t2 = 0.75 * alg.inner(&(phi * &z12), &z12);
    let w = br(z1, &pz2) + br(z2, &pz1);
    let t3 = 0.25 * alg.inner(&w, &(phi_inv * &w));
    let t4 = alg.inner(&br(z1, &pz1), &(phi_inv * br(z2, &pz2)));
    t1 - t2 + t3 - t4
}

pub fn puttmann_curvature(alg: &LieAlgebra, phi: &MetricForm, z1: &Vector, z2: &Vector) -> Result<f64> {
    check_metric(alg, phi)?;
    alg.check_dim(z1)?;
    alg.check_dim(z2)?;
    Ok(puttmann_raw(alg, phi.matrix(), &phi.inverse(), z1, z2))
}

/// Levi-Civita connection of a left-invariant metric, stored as the table
/// `nabla[i][j] = nabla_{e_i} e_j`.
pub struct LeviCivita<'a> {
    alg: &'a LieAlgebra,
    table: Vec<Vec<Vector>>,
}

impl<'a> LeviCivita<'a> {
    /// `gram` is the Gram matrix `g_ij = h(e_i, e_j)`.
    pub fn new(alg: &'a LieAlgebra, gram: &Matrix) -> Result<Self> {
        let n = alg.dim();
        let ginv = linalg::inverse(gram)?;
        let h = |x: &Vector, y: &Vector| x.dot(&(gram * y));
        let e: Vec<Vector> = (0..n).map(|i| alg.basis_vector(i)).collect();
        let mut table = vec![vec![Vector::zeros(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                // h(nabla_X Y, Z) = 1/2 (h([X,Y],Z) - h([Y,Z],X) + h([Z,X],Y))
                let xy = alg.bracket_unchecked(&e[i], &e[j]);
                let mut w = Vector::zeros(n);
                for k in 0..n {
                    let yz = alg.bracket_unchecked(&e[j], &e[k]);
                    let zx = alg.bracket_unchecked(&e[k], &e[i]);
                    w[k] = 0.5 * (h(&xy, &e[k]) - h(&yz, &e[i]) + h(&zx, &e[j]));
                }
                table[i][j] = &ginv * w;
            }
        }
        Ok(LeviCivita { alg, table })
    }

    pub fn covariant(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.alg.dim();
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] != 0.0 {
                    out += &self.table[i][j] * (x[i] * y[j]);
                }
            }
        }
        out
    }

    /// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
    pub fn curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let xy = self.alg.bracket_unchecked(x, y);
        self.covariant(x, &self.covariant(y, z)) - self.covariant(y, &self.covariant(x, z)) - self.covariant(&xy, z)
    }
}

/// Independent oracle: `h(R(Z1,Z2)Z2, Z1)` from the Koszul connection.
pub fn koszul_oracle(alg: &LieAlgebra, phi: &MetricForm, z1: &Vector, z2: &Vector) -> Result<f64> {
    check_metric(alg, phi)?;
    alg.check_dim(z1)?;
    alg.check_dim(z2)?;
    koszul_raw(alg, phi.matrix(), z1, z2)
}

pub fn koszul_raw(alg: &LieAlgebra, phi: &Matrix, z1: &Vector, z2: &Vector) -> Result<f64> {
    // h(X,Y) = h0(Phi X, Y) = X^T Phi^T H0 Y
    let gram = phi.transpose() * alg.h0();
    let lc = LeviCivita::new(alg, &gram)?;
    let r = lc.curvature(z1, z2, z2);
    Ok(r.dot(&(&gram * z1)))
}

fn check_metric(alg: &LieAlgebra, phi: &MetricForm) -> Result<()> {
    if phi.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: phi.dim() });
    }
    Ok(())
}

fn check_direction(alg: &LieAlgebra, psi: &Direction) -> Result<()> {
    if psi.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: psi.dim() });
    }
    Ok(())
}

/// `kappa(t)`: curvature for `h_t` of the twisted plane `{Phi_t^{-1} X, Phi_t^{-1} Y}`.
pub fn kappa(alg: &LieAlgebra, psi: &Direction, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    check_direction(alg, psi)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    let phi_t = metrics::path_at(psi, t)?;
    let inv = metrics::path_inverse_at(psi, t);
    Ok(puttmann_raw(alg, phi_t.matrix(), &inv, &(&inv * x), &(&inv * y)))
}

/// Same as [`kappa`] for an arbitrary endomorphism; no domain checks beyond invertibility.
pub fn kappa_raw(alg: &LieAlgebra, psi: &Matrix, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    let n = alg.dim();
    let inv = Matrix::identity(n, n) - psi * t;
    let phi_t = linalg::inverse(&inv)?;
    Ok(puttmann_raw(alg, &phi_t, &inv, &(&inv * x), &(&inv * y)))
}

/// Coefficients of `kappa(t) = alpha + beta t + gamma t^2 + delta t^3 - 3/4 t^4 |D|_{h_t}^2`
/// together with the intermediate brackets.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(serialize_with = "ser_vec")]
    pub d: Vector,
    #[serde(serialize_with = "ser_vec")]
    pub a: Vector,
    #[serde(serialize_with = "ser_vec")]
    pub b: Vector,
    #[serde(serialize_with = "ser_vec")]
    pub c: Vector,
}

fn ser_vec<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

impl CurvatureCoefficients {
    /// Closed form at `t`; `phi_t` is the matrix of `h_t`.
    pub fn evaluate_with(&self, alg: &LieAlgebra, phi_t: &Matrix, t: f64) -> f64 {
        let t2 = t * t;
        self.alpha + self.beta * t + self.gamma * t2 + self.delta * t2 * t
            - 0.75 * t2 * t2 * alg.inner(&(phi_t * &self.d), &self.d)
    }

    pub fn evaluate(&self, alg: &LieAlgebra, psi: &Direction, t: f64) -> Result<f64> {
        let phi_t = metrics::path_at(psi, t)?;
        Ok(self.evaluate_with(alg, phi_t.matrix(), t))
    }

    /// Truncated power series `alpha + ... + delta t^3 - 3/4 sum_{n=4}^{terms+3} t^n <Psi^{n-4} D, D>`.
    pub fn series_partial_sum(&self, alg: &LieAlgebra, psi: &Matrix, t: f64, terms: usize) -> f64 {
        let t2 = t * t;
        let mut total = self.alpha + self.beta * t + self.gamma * t2 + self.delta * t2 * t;
        let mut pd = self.d.clone();
        let mut tn = t2 * t2;
        for _ in 0..terms {
            total -= 0.75 * tn * alg.inner(&pd, &self.d);
            pd = psi * pd;
            tn *= t;
        }
        total
    }

    pub fn cubic_part(&self, t: f64) -> f64 {
        self.alpha + self.beta * t + self.gamma * t * t + self.delta * t * t * t
    }
}

/// Coefficient formulas for an arbitrary endomorphism, inner product from `alg`.
pub fn coefficients_raw(alg: &LieAlgebra, psi: &Matrix, x: &Vector, y: &Vector) -> CurvatureCoefficients {
    let br = |a: &Vector, b: &Vector| alg.bracket_unchecked(a, b);
    let ip = |a: &Vector, b: &Vector| alg.inner(a, b);
    let px = psi * x;
    let py = psi * y;
    let xy = br(x, y);
    let a = br(&px, y) + br(x, &py);
    let b = br(&px, &py);
    let c = br(&px, y) + br(&py, x);
    let p_xy = psi * &xy;
    let p2_xy = psi * &p_xy;
    let p3_xy = psi * &p2_xy;
    let pa = psi * &a;
    let d = &p2_xy - &pa + &b;
    let pxx = br(&px, x);
    let pyy = br(&py, y);

    let alpha = 0.25 * ip(&xy, &xy);
    let beta = -0.75 * ip(&p_xy, &xy);
    let gamma = -0.75 * ip(&p_xy, &p_xy) + 1.5 * ip(&p_xy, &a) - 0.5 * ip(&xy, &b) - 0.25 * ip(&a, &a)
        + 0.25 * ip(&c, &c)
        - ip(&pxx, &pyy);
    let delta = -0.75 * ip(&p3_xy, &xy) + 1.5 * ip(&p2_xy, &a) - 1.5 * ip(&p_xy, &b) - 0.75 * ip(&pa, &a)
        - 0.25 * ip(&(psi * &c), &c)
        + ip(&(psi * &pxx), &pyy)
        + ip(&a, &b);
    CurvatureCoefficients { alpha, beta, gamma, delta, d, a, b, c }
}

pub fn kappa_coefficients(alg: &LieAlgebra, psi: &Direction, x: &Vector, y: &Vector) -> Result<CurvatureCoefficients> {
    check_direction(alg, psi)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    Ok(coefficients_raw(alg, psi.matrix(), x, y))
}

fn require_commuting(alg: &LieAlgebra, x: &Vector, y: &Vector) -> Result<()> {
    let comm = alg.norm(&alg.bracket_unchecked(x, y));
    if comm > COMMUTE_TOL * alg.norm(x) * alg.norm(y) {
        return Err(Error::NotCommuting { commutator: comm });
    }
    Ok(())
}

/// Five-term formula for `(1/6) kappa'''(0)` of a commuting pair, arbitrary endomorphism.
pub fn third_derivative_raw(alg: &LieAlgebra, psi: &Matrix, x: &Vector, y: &Vector) -> f64 {
    let br = |a: &Vector, b: &Vector| alg.bracket_unchecked(a, b);
    let ip = |a: &Vector, b: &Vector| alg.inner(a, b);
    let px = psi * x;
    let py = psi * y;
    let x_py = br(x, &py);
    let px_y = br(&px, y);
    ip(&(&x_py + &px_y), &br(&px, &py)) + ip(&br(&px, x), &(psi * br(&py, y)))
        - ip(&x_py, &(psi * &x_py))
        - ip(&x_py, &(psi * &px_y))
        - ip(&px_y, &(psi * &px_y))
}

/// `(1/6) kappa'''(0)` for a commuting pair.
pub fn third_derivative_commuting(alg: &LieAlgebra, psi: &Direction, x: &Vector, y: &Vector) -> Result<f64> {
    check_direction(alg, psi)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    require_commuting(alg, x, y)?;
    Ok(third_derivative_raw(alg, psi.matrix(), x, y))
}

/// `|[X, Psi Y] + [Psi X, Y]|^2` for a commuting pair: the leading coefficient
/// of the untwisted plane `{X, Y}`. With unnormalized curvature of `h_t` the
/// actual second derivative is half of this, `untwisted_kappa(t) = t^2 |v|^2 / 4 + O(t^3)`.
pub fn untwisted_second_derivative(alg: &LieAlgebra, psi: &Direction, x: &Vector, y: &Vector) -> Result<f64> {
    check_direction(alg, psi)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    require_commuting(alg, x, y)?;
    let m = psi.matrix();
    let v = alg.bracket_unchecked(x, &(m * y)) + alg.bracket_unchecked(&(m * x), y);
    Ok(alg.norm_sq(&v))
}

/// Curvature of the untwisted plane `{X, Y}` for `h_t`.
pub fn untwisted_kappa(alg: &LieAlgebra, psi: &Direction, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    let phi_t = metrics::path_at(psi, t)?;
    puttmann_curvature(alg, &phi_t, x, y)
}
