//! Seeded randomness. Every sample draws from its own stream derived from
//! `(seed, index)`, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, Matrix, Vector};

pub type SampleRng = ChaCha8Rng;

/// Generator for sample `index` under `seed`.
pub fn rng_for(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector(n: usize, rng: &mut impl Rng) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform unit vector (Euclidean).
pub fn unit_vector(n: usize, rng: &mut impl Rng) -> Vector {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Symmetric matrix with independent standard normal entries (GOE-like).
pub fn symmetric_matrix(n: usize, rng: &mut impl Rng) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    linalg::symmetrize(&m)
}

/// Haar-ish orthogonal matrix from QR of a Gaussian matrix.
pub fn orthogonal_matrix(n: usize, rng: &mut impl Rng) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    let mut q = q.clone_owned();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let c = -q.column(j).clone_owned();
            q.set_column(j, &c);
        }
    }
    q
}

/// Symmetric positive-definite matrix with eigenvalues uniform in `[lo, hi]`.
pub fn spd_matrix(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Matrix {
    let q = orthogonal_matrix(n, rng);
    let d = Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(lo..=hi)));
    linalg::symmetrize(&(&q * Matrix::from_diagonal(&d) * q.transpose()))
}
