//! Left-invariant metrics as endomorphisms relative to the bi-invariant
//! reference metric, and inverse-linear paths `Phi_t = (I - t Psi)^{-1}`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Symmetry tolerance for metric and direction matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `path_at` rejects `t` whenever some `1 - t a_i` is at most this.
pub const POLE_GUARD: f64 = 1e-12;

/// A left-invariant metric `h(X,Y) = h0(Phi X, Y)`; `Phi` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricForm {
    phi: Matrix,
}

impl MetricForm {
    pub fn new(phi: Matrix) -> Result<Self> {
        linalg::check_spd(&phi, SYMMETRY_TOL)?;
        Ok(MetricForm { phi: linalg::symmetrize(&phi) })
    }

    pub fn identity(dim: usize) -> Self {
        MetricForm { phi: Matrix::identity(dim, dim) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(&Vector::from_row_slice(diag)))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn inverse(&self) -> Matrix {
        linalg::symmetrize(&linalg::inverse(&self.phi).expect("positive definite"))
    }

    /// `|Z|_h^2 = <Phi Z, Z>`.
    pub fn norm_sq(&self, z: &Vector) -> f64 {
        z.dot(&(&self.phi * z))
    }

    pub fn into_matrix(self) -> Matrix {
        self.phi
    }
}

/// A self-adjoint endomorphism `Psi` generating `Phi_t = (I - t Psi)^{-1}`,
/// with its spectral decomposition cached.
#[derive(Debug, Clone)]
pub struct Direction {
    psi: Matrix,
    eigvals: Vector,
    eigvecs: Matrix,
}

impl PartialEq for Direction {
    fn eq(&self, other: &Self) -> bool {
        self.psi == other.psi
    }
}

impl Direction {
    pub fn new(psi: Matrix) -> Result<Self> {
        if !psi.is_square() {
            return Err(Error::DimensionMismatch { expected: psi.nrows(), found: psi.ncols() });
        }
        if psi.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("non-finite entry in direction".into()));
        }
        let asym = linalg::asymmetry(&psi);
        if asym > SYMMETRY_TOL * (1.0 + psi.amax()) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let psi = linalg::symmetrize(&psi);
        let (eigvals, eigvecs) = linalg::sorted_eigen(&psi);
        Ok(Direction { psi, eigvals, eigvecs })
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(Matrix::zeros(dim, dim)).expect("zero is symmetric")
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(&Vector::from_row_slice(diag)))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.psi.nrows()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &Vector {
        &self.eigvals
    }

    /// Eigenvectors as columns matching `eigenvalues`.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigvecs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigvals[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigvals[self.eigvals.len() - 1]
    }

    pub fn operator_norm(&self) -> f64 {
        self.eigvals.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Orthonormal basis of the eigenspace of the smallest eigenvalue. Eigenvalues
    /// within `tol * max(1, |a0|)` of the smallest count as equal.
    pub fn smallest_eigenspace(&self, tol: f64) -> Vec<Vector> {
        let a0 = self.min_eigenvalue();
        let gate = tol * a0.abs().max(1.0);
        (0..self.eigvals.len())
            .filter(|&i| self.eigvals[i] - a0 <= gate)
            .map(|i| self.eigvecs.column(i).clone_owned())
            .collect()
    }

    /// Canonical representative of `{b Psi + a I : b > 0}`: smallest eigenvalue
    /// shifted to zero and scaled to unit operator norm (zero if `Psi` is scalar).
    pub fn canonical(&self) -> Direction {
        let n = self.dim();
        let shifted = &self.psi - Matrix::identity(n, n) * self.min_eigenvalue();
        let spread = self.max_eigenvalue() - self.min_eigenvalue();
        if spread <= 1e-12 * (1.0 + self.operator_norm()) {
            return Direction::zero(n);
        }
        Direction::new(shifted / spread).expect("symmetric")
    }
}

/// Open interval of valid `t` for an inverse-linear path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDomain {
    pub lower: f64,
    pub upper: f64,
}

impl PathDomain {
    pub fn contains(&self, t: f64) -> bool {
        t > self.lower && t < self.upper
    }

    /// `n` evenly spaced points covering the central `fraction` of the domain,
    /// with infinite ends replaced by `+-cap`.
    pub fn span_points(&self, n: usize, fraction: f64, cap: f64) -> Vec<f64> {
        let lo = if self.lower.is_finite() { self.lower } else { -cap };
        let hi = if self.upper.is_finite() { self.upper } else { cap };
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo) * fraction;
        let (a, b) = (mid - half, mid + half);
        if n == 1 {
            return vec![mid];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

/// `{t : 1 - t a_i > 0 for all eigenvalues a_i}`. Eigenvalues at rounding
/// level (relative to the operator norm) count as zero.
pub fn domain_of(psi: &Direction) -> PathDomain {
    let noise = 1e-14 * (1.0 + psi.operator_norm());
    let amax = psi.max_eigenvalue();
    let amin = psi.min_eigenvalue();
    let upper = if amax > noise { 1.0 / amax } else { f64::INFINITY };
    let lower = if amin < -noise { 1.0 / amin } else { f64::NEG_INFINITY };
    PathDomain { lower, upper }
}

/// `Phi_t = (I - t Psi)^{-1}`.
pub fn path_at(psi: &Direction, t: f64) -> Result<MetricForm> {
    let n = psi.dim();
    let mut diag = Vector::zeros(n);
    for (i, &a) in psi.eigvals.iter().enumerate() {
        let s = 1.0 - t * a;
        if !(s > POLE_GUARD) {
            return Err(Error::OutsideDomain { t, eigenvalue: a });
        }
        diag[i] = 1.0 / s;
    }
    let v = &psi.eigvecs;
    let phi = v * Matrix::from_diagonal(&diag) * v.transpose();
    Ok(MetricForm { phi: linalg::symmetrize(&phi) })
}

/// `I - t Psi`, the inverse of `path_at`.
pub fn path_inverse_at(psi: &Direction, t: f64) -> Matrix {
    let n = psi.dim();
    Matrix::identity(n, n) - psi.matrix() * t
}

/// `Psi = I - Phi^{-1}`, so that `path_at(Psi, 1) = Phi`.
pub fn direction_from_metric(phi: &MetricForm) -> Result<Direction> {
    let n = phi.dim();
    Direction::new(Matrix::identity(n, n) - phi.inverse())
}

/// Reparametrization relating the paths of `Psi` and `Psi + a I`:
/// `scale(s) * Phi~(s) = Phi(t_of(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reparametrization {
    pub shift: f64,
}

impl Reparametrization {
    pub fn t_of(&self, s: f64) -> f64 {
        s / (1.0 - s * self.shift)
    }

    pub fn scale(&self, s: f64) -> f64 {
        1.0 - s * self.shift
    }
}

pub fn shift_direction(psi: &Direction, a: f64) -> (Direction, Reparametrization) {
    let n = psi.dim();
    let shifted = Direction::new(psi.matrix() + Matrix::identity(n, n) * a).expect("symmetric");
    (shifted, Reparametrization { shift: a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_row_slice(d))
    }

    #[test]
    fn direction_from_simple_metrics() {
        let psi = direction_from_metric(&MetricForm::identity(3)).unwrap();
        assert_eq!(psi.matrix(), &Matrix::zeros(3, 3));
        let psi = direction_from_metric(&MetricForm::from_diagonal(&[2.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((psi.matrix() - diag(&[0.5, 0.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn path_examples() {
        let zero = Direction::zero(3);
        for t in [-5.0, 0.0, 3.0] {
            assert_eq!(path_at(&zero, t).unwrap().matrix(), &Matrix::identity(3, 3));
        }
        let shrink = Direction::from_diagonal(&[-1.0, 0.0, 0.0]).unwrap();
        assert!((path_at(&shrink, 1.0).unwrap().matrix() - diag(&[0.5, 1.0, 1.0])).amax() < 1e-15);
        let pole = Direction::from_diagonal(&[0.5]).unwrap();
        match path_at(&pole, 2.0) {
            Err(Error::OutsideDomain { eigenvalue, .. }) => assert_eq!(eigenvalue, 0.5),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn domain_examples() {
        let d = domain_of(&Direction::from_diagonal(&[-1.0, 0.0]).unwrap());
        assert_eq!((d.lower, d.upper), (-1.0, f64::INFINITY));
        let d = domain_of(&Direction::from_diagonal(&[1.0]).unwrap());
        assert_eq!((d.lower, d.upper), (f64::NEG_INFINITY, 1.0));
        let d = domain_of(&Direction::from_diagonal(&[-2.0, 3.0]).unwrap());
        assert_eq!(d.lower, -0.5);
        assert!((d.upper - 1.0 / 3.0).abs() < 1e-16);
        let d = domain_of(&Direction::zero(2));
        assert!(d.lower.is_infinite() && d.upper.is_infinite());
    }

    #[test]
    fn shift_examples() {
        let (shifted, rp) = shift_direction(&Direction::zero(3), 1.0);
        let s = 0.5;
        assert_eq!(rp.t_of(s), 1.0);
        assert_eq!(rp.scale(s), 0.5);
        let lhs = path_at(&shifted, s).unwrap().matrix() * rp.scale(s);
        assert!((lhs - Matrix::identity(3, 3)).amax() < 1e-15);

        let (same, rp) = shift_direction(&Direction::from_diagonal(&[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(same.matrix(), &diag(&[1.0, 2.0]));
        assert_eq!((rp.t_of(0.3), rp.scale(0.3)), (0.3, 1.0));

        let psi = Direction::from_diagonal(&[1.0, -1.0]).unwrap();
        let (shifted, rp) = shift_direction(&psi, 2.0);
        let s = 0.25;
        let lhs = path_at(&shifted, s).unwrap().matrix() * rp.scale(s);
        let rhs = path_at(&psi, rp.t_of(s)).unwrap();
        assert!((lhs - rhs.matrix()).amax() < 1e-12);
    }

    #[test]
    fn canonical_representative() {
        let psi = Direction::from_diagonal(&[-1.0, 1.0, 3.0]).unwrap();
        let c = psi.canonical();
        assert!((c.matrix() - diag(&[0.0, 0.5, 1.0])).amax() < 1e-15);
        let scaled = Direction::new(psi.matrix() * 7.0 + Matrix::identity(3, 3) * 2.0).unwrap();
        assert!((scaled.canonical().matrix() - c.matrix()).amax() < 1e-14);
        let scalar = Direction::new(Matrix::identity(3, 3) * 4.0).unwrap();
        assert_eq!(scalar.canonical().matrix(), &Matrix::zeros(3, 3));
    }

    #[test]
    fn rejects_bad_inputs() {
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(Direction::new(asym.clone()), Err(Error::NotSymmetric { .. })));
        assert!(MetricForm::new(asym).is_err());
        assert!(matches!(MetricForm::from_diagonal(&[1.0, -1.0]), Err(Error::NotPositiveDefinite { .. })));
    }
}
