//! Small dense helpers on top of nalgebra. Every matrix here is at most a few
//! dozen entries wide, so clarity wins over blocking or allocation tricks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Symmetric entrywise asymmetry `max |m_ij - m_ji|`.
pub fn asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

struct Eigen {
    eigenvalues: Vector,
    eigenvectors: Matrix,
}

/// Cyclic Jacobi rotations. nalgebra's QR-based `SymmetricEigen` can stall on
/// nearly diagonal input with close eigenvalues (reconstruction errors ~1e-5
/// observed); Jacobi is backward stable to a few ulps at the sizes used here.
fn jacobi_eigen(m: &Matrix) -> (Vector, Matrix) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n, n);
    let tiny = 1e-3 * f64::EPSILON * m.norm();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tiny {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending
/// and eigenvectors as matching columns.
pub fn sorted_eigen(m: &Matrix) -> (Vector, Matrix) {
    let (eigenvalues, eigenvectors) = jacobi_eigen(&symmetrize(m));
    let eig = Eigen { eigenvalues, eigenvectors };
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        // sign convention: largest-magnitude entry positive
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (k, x)| if x.abs() > acc.1 + 1e-12 { (k, x.abs()) } else { acc });
        if v[imax] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    sorted_eigen(m).0[0]
}

/// Require a symmetric positive-definite matrix.
pub fn check_spd(m: &Matrix, sym_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let asym = asymmetry(m);
    if asym > sym_tol * (1.0 + m.amax()) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let lo = min_eigenvalue(m);
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo });
    }
    Ok(())
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    m.clone().try_inverse().ok_or(Error::Singular)
}

/// Gram-Schmidt with respect to the inner product `gram` (x^T gram y), dropping
/// vectors whose residual norm falls below `rel_tol` times the largest input norm.
pub fn orthonormalize(vectors: &[Vector], gram: &Matrix, rel_tol: f64) -> Vec<Vector> {
    let scale = vectors
        .iter()
        .map(|v| v.dot(&(gram * v)).max(0.0).sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut out: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&(gram * &w));
                w -= q * c;
            }
        }
        let norm = w.dot(&(gram * &w)).max(0.0).sqrt();
        if norm > rel_tol * scale {
            out.push(w / norm);
        }
    }
    out
}

pub fn columns_to_matrix(dim: usize, cols: &[Vector]) -> Matrix {
    let mut m = Matrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormal basis of the null space of `m`: right singular vectors whose
/// singular value is at most `rel_tol` times the largest one.
pub fn null_space(m: &Matrix, rel_tol: f64) -> Vec<Vector> {
    let n = m.ncols();
    // pad to square so the SVD returns a full set of right singular vectors
    let rows = m.nrows().max(n);
    let mut sq = Matrix::zeros(rows, n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thresh = rel_tol * smax;
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thresh)
        .map(|i| vt.row(i).transpose())
        .collect()
}

/// Frobenius norm.
pub fn fro(m: &Matrix) -> f64 {
    m.norm()
}

/// Operator 2-norm of a symmetric matrix.
pub fn sym_op_norm(m: &Matrix) -> f64 {
    let (vals, _) = sorted_eigen(m);
    vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_accurate_on_nearly_diagonal_clusters() {
        let mut m = Matrix::from_diagonal(&Vector::from_row_slice(&[0.241, 0.6094, -2.799, 0.6783, 0.6932, 0.7077]));
        m[(1, 2)] = 5e-5;
        m[(2, 1)] = 5e-5;
        m[(3, 5)] = 1e-12;
        m[(5, 3)] = 1e-12;
        let (l, v) = sorted_eigen(&m);
        let rec = &v * Matrix::from_diagonal(&l) * v.transpose();
        assert!((rec - &m).amax() < 1e-14);
        assert!((v.transpose() * &v - Matrix::identity(6, 6)).amax() < 1e-14);
    }

    #[test]
    fn eigen_sorted_ascending() {
        let m = Matrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = sorted_eigen(&m);
        assert_eq!(vals.as_slice(), &[-1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let g = Matrix::identity(3, 3);
        let v = vec![
            Vector::from_vec(vec![1.0, 0.0, 0.0]),
            Vector::from_vec(vec![2.0, 0.0, 0.0]),
            Vector::from_vec(vec![1.0, 1.0, 0.0]),
        ];
        let q = orthonormalize(&v, &g, 1e-9);
        assert_eq!(q.len(), 2);
        assert!(q[0].dot(&q[1]).abs() < 1e-15);
    }

    #[test]
    fn spd_check_rejects_indefinite() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(check_spd(&m, 1e-12), Err(Error::NotPositiveDefinite { .. })));
    }
}
