//! Cheeger deformations, subalgebra shrink/enlarge families, the
//! infinitesimal-nonnegativity analyzer, rigidity scans, and the identities
//! relating paths from different bi-invariant starting metrics.

use rayon::prelude::*;

use crate::curvature::{self, coefficients_raw, puttmann_raw, third_derivative_raw};
use crate::error::{Error, Result};
use crate::lie::{AlgebraShape, LieAlgebra, Subspace, CLOSURE_TOL, COMMUTE_TOL};
use crate::linalg::{self, Matrix, Vector};
use crate::metrics::{self, Direction, MetricForm};
use crate::report::{AnalysisReport, SampleRow, Verdict, Witness};
use crate::sampling::{self, rng_for};

/// Default tolerance for nonnegativity verdicts on unit orthonormal pairs.
pub const NONNEG_TOL: f64 = 1e-9;
/// `|D|` above this with `|delta| <= tol` violates the second clause.
pub const D_GATE: f64 = 1e-6;
/// Eigenvalues this close (relative) to the smallest one span `p_0`.
pub const EIGENSPACE_TOL: f64 = 1e-8;
/// Attempts per commuting pair before the general sampler gives up on it.
const PAIR_ATTEMPTS: usize = 16;

/// `A^t = A^0 (I + t A^0)^{-1}`.
pub fn cheeger_evolve(a0: &Matrix, t: f64) -> Result<Matrix> {
    if !a0.is_square() {
        return Err(Error::DimensionMismatch { expected: a0.nrows(), found: a0.ncols() });
    }
    let n = a0.nrows();
    let m = Matrix::identity(n, n) + a0 * t;
    let lu = m.lu();
    if lu.determinant().abs() <= 1e-14 {
        return Err(Error::Singular);
    }
    let inv = lu.try_inverse().ok_or(Error::Singular)?;
    Ok(linalg::symmetrize(&(a0 * inv)))
}

fn require_subalgebra(s: &Subspace, alg: &LieAlgebra) -> Result<()> {
    if !s.is_subalgebra() {
        return Err(Error::NotSubalgebra { residual: s.closure_residual(alg) });
    }
    Ok(())
}

fn require_abelian(s: &Subspace, alg: &LieAlgebra) -> Result<()> {
    require_subalgebra(s, alg)?;
    if !s.is_abelian() {
        return Err(Error::NotAbelian { residual: s.abelian_residual(alg) });
    }
    Ok(())
}

/// `Psi = -proj_S`: vectors tangent to the subgroup shrink as `t` grows.
pub fn shrink_direction(alg: &LieAlgebra, s: &Subspace) -> Result<Direction> {
    require_subalgebra(s, alg)?;
    Direction::new(-s.projector(alg))
}

/// `Psi = +proj_S`: the opposite variation, enlarging `S`.
pub fn enlarge_direction(alg: &LieAlgebra, s: &Subspace) -> Result<Direction> {
    require_subalgebra(s, alg)?;
    Direction::new(s.projector(alg))
}

fn require_below_one(t: f64) -> Result<()> {
    if !(t < 1.0) {
        return Err(Error::OutsideDomain { t, eigenvalue: 1.0 });
    }
    Ok(())
}

/// Closed form `1/4 |[X,Y]|^2 - 3/4 |[X,Y]^S|^2 t/(1-t)` for an abelian `S`.
pub fn abelian_enlarge_kappa(alg: &LieAlgebra, s: &Subspace, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    require_abelian(s, alg)?;
    require_below_one(t)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    let xy = alg.bracket_unchecked(x, y);
    Ok(0.25 * alg.norm_sq(&xy) - 0.75 * alg.norm_sq(&s.project(alg, &xy)) * t / (1.0 - t))
}

/// Series for enlarging a (possibly non-abelian) subalgebra `S`.
pub fn nonabelian_enlarge_kappa(alg: &LieAlgebra, s: &Subspace, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    require_subalgebra(s, alg)?;
    require_below_one(t)?;
    alg.check_dim(x)?;
    alg.check_dim(y)?;
    let xh = s.project(alg, x);
    let yh = s.project(alg, y);
    let xm = x - &xh;
    let ym = y - &yh;
    let xy = alg.bracket_unchecked(x, y);
    let b2 = alg.norm_sq(&alg.bracket_unchecked(&xh, &yh));
    let mixed = alg.norm_sq(&s.project(alg, &alg.bracket_unchecked(&xm, &ym)));
    let t2 = t * t;
    Ok(0.25 * alg.norm_sq(&xy) - 0.75 * alg.norm_sq(&s.project(alg, &xy)) * t + 0.75 * b2 * t2 - 0.25 * b2 * t2 * t
        - 0.75 * mixed * t2 / (1.0 - t))
}

/// Checks `|Z|^2_{h_t} <= 4/3 |Z|^2` on unit `Z` in the derived subalgebra for
/// the enlargement of an abelian `S`. The exact maximizer (top eigenvector of
/// the compressed form) is always included alongside the random samples.
pub fn max_abelian_expansion_check(alg: &LieAlgebra, s: &Subspace, t: f64, samples: usize, seed: u64) -> Result<AnalysisReport> {
    max_abelian_expansion_check_tol(alg, s, t, samples, seed, NONNEG_TOL)
}

pub fn max_abelian_expansion_check_tol(
    alg: &LieAlgebra,
    s: &Subspace,
    t: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AnalysisReport> {
    require_abelian(s, alg)?;
    require_below_one(t)?;
    let psi = enlarge_direction(alg, s)?;
    let phi_t = metrics::path_at(&psi, t)?;
    let derived = alg.derived_subalgebra();
    let mut report = AnalysisReport::new(tol, seed);
    let bound = 4.0 / 3.0;
    let r = derived.rank();
    if r == 0 {
        report.verdict = Verdict::Pass;
        report.measure("max_expansion", 0.0);
        return Ok(report);
    }
    let basis = linalg::columns_to_matrix(alg.dim(), derived.basis());
    let expansion = |z: &Vector| phi_t.norm_sq(z) / alg.norm_sq(z);

    let mut candidates: Vec<Vector> = (0..samples as u64)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            &basis * sampling::unit_vector(r, &mut rng)
        })
        .collect();
    let compressed = basis.transpose() * alg.h0() * phi_t.matrix() * &basis;
    let (_, vecs) = linalg::sorted_eigen(&compressed);
    candidates.push(&basis * vecs.column(r - 1));

    let mut worst = f64::NEG_INFINITY;
    for z in &candidates {
        let e = expansion(z);
        worst = worst.max(e);
        let margin = bound - e;
        if margin < -tol {
            report.push_witness(Witness::new(z, z, Some(t), margin, "expansion"));
        }
    }
    report.samples = candidates.len();
    report.measure("max_expansion", worst);
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Estimated `sup |[X^S, Y^S]| / |[X, Y]|`; infinite when some commuting pair
/// has `[X^S, Y^S] != 0`.
#[derive(Debug, Clone)]
pub struct RatioEstimate {
    pub sup: f64,
    pub witness: Option<(Vector, Vector)>,
}

pub fn bracket_ratio_sup(alg: &LieAlgebra, s: &Subspace, samples: usize, seed: u64) -> RatioEstimate {
    let n = alg.dim();
    let mut best = RatioEstimate { sup: 0.0, witness: None };
    let consider = |x: Vector, y: Vector, best: &mut RatioEstimate| {
        let num = alg.norm(&alg.bracket_unchecked(&s.project(alg, &x), &s.project(alg, &y)));
        let den = alg.norm(&alg.bracket_unchecked(&x, &y));
        let ratio = if den <= COMMUTE_TOL * alg.norm(&x) * alg.norm(&y) {
            if num > 1e-9 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            num / den
        };
        if ratio > best.sup {
            best.sup = ratio;
            best.witness = Some((x, y));
        }
    };
    for i in 0..samples as u64 {
        let mut rng = rng_for(seed, i);
        let x = sampling::unit_vector(n, &mut rng);
        let y = sampling::unit_vector(n, &mut rng);
        consider(x, y, &mut best);
    }
    for pair in sample_commuting_pairs(alg, samples, seed.wrapping_add(0x9e37_79b9)) {
        consider(pair.x, pair.y, &mut best);
        if best.sup.is_infinite() {
            break;
        }
    }
    best
}

/// Unit, h0-orthogonal commuting vectors.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    pub x: Vector,
    pub y: Vector,
    pub commutator_norm: f64,
}

impl CommutingPair {
    /// Orthonormalize `(x, y)` and check that they commute.
    pub fn new(alg: &LieAlgebra, x: &Vector, y: &Vector) -> Result<Self> {
        alg.check_dim(x)?;
        alg.check_dim(y)?;
        let q = linalg::orthonormalize(&[x.clone(), y.clone()], alg.h0(), 1e-12);
        if q.len() < 2 {
            return Err(Error::ZeroVector);
        }
        let comm = alg.norm(&alg.bracket_unchecked(&q[0], &q[1]));
        if comm > COMMUTE_TOL {
            return Err(Error::NotCommuting { commutator: comm });
        }
        Ok(CommutingPair { x: q[0].clone(), y: q[1].clone(), commutator_norm: comm })
    }
}

fn so4_pair(rng: &mut sampling::SampleRng) -> (Vector, Vector) {
    let u = sampling::unit_vector(3, rng);
    let v = sampling::unit_vector(3, rng);
    let theta: f64 = rand::Rng::gen_range(rng, 0.0..std::f64::consts::TAU);
    let (a, b) = (theta.cos(), theta.sin());
    let (c, d) = (-b, a);
    let mut x = Vector::zeros(6);
    let mut y = Vector::zeros(6);
    for k in 0..3 {
        x[k] = a * u[k];
        x[3 + k] = b * v[k];
        y[k] = c * u[k];
        y[3 + k] = d * v[k];
    }
    (x, y)
}

/// Deterministic sample of commuting pairs. so(4) uses the explicit
/// parametrization `X = (a u, b v)`, `Y = (c u, d v)` with `(a,b) ⊥ (c,d)`;
/// other algebras draw `Y` from the centralizer of a random `X`.
pub fn sample_commuting_pairs(alg: &LieAlgebra, n: usize, seed: u64) -> Vec<CommutingPair> {
    (0..n as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng_for(seed, i);
            if alg.shape() == AlgebraShape::So4 {
                let (x, y) = so4_pair(&mut rng);
                let comm = alg.norm(&alg.bracket_unchecked(&x, &y));
                return Some(CommutingPair { x, y, commutator_norm: comm });
            }
            for _ in 0..PAIR_ATTEMPTS {
                let x = alg.normalize(&sampling::gaussian_vector(alg.dim(), &mut rng)).ok()?;
                let cent = alg.centralizer_basis(&x).ok()?;
                if cent.rank() < 2 {
                    continue;
                }
                let rest = &cent.basis()[1..];
                let coeffs = sampling::unit_vector(rest.len(), &mut rng);
                let mut y = Vector::zeros(alg.dim());
                for (q, c) in rest.iter().zip(coeffs.iter()) {
                    y += q * *c;
                }
                if let Ok(pair) = CommutingPair::new(alg, &x, &y) {
                    return Some(pair);
                }
            }
            None
        })
        .collect()
}

/// Samples commuting pairs and tests `delta >= 0` and `delta = 0 => D = 0`.
pub fn infinitesimal_nonnegativity_report(alg: &LieAlgebra, psi: &Direction, samples: usize, tol: f64, seed: u64) -> AnalysisReport {
    let pairs = sample_commuting_pairs(alg, samples, seed);
    nonnegativity_over_pairs(alg, psi.matrix(), &pairs, tol, seed)
}

pub fn nonnegativity_over_pairs(alg: &LieAlgebra, psi: &Matrix, pairs: &[CommutingPair], tol: f64, seed: u64) -> AnalysisReport {
    let mut report = AnalysisReport::new(tol, seed);
    report.samples = pairs.len();
    if pairs.is_empty() {
        report.verdict = Verdict::Inconclusive;
        return report;
    }
    let rows: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|p| {
            let delta = third_derivative_raw(alg, psi, &p.x, &p.y);
            let d = coefficients_raw(alg, psi, &p.x, &p.y).d;
            (delta, alg.norm(&d))
        })
        .collect();
    let mut min_delta = f64::INFINITY;
    for (i, (p, &(delta, d_norm))) in pairs.iter().zip(rows.iter()).enumerate() {
        report.table.push(SampleRow { index: i as u64, delta, d_norm });
        min_delta = min_delta.min(delta);
        if delta < -tol {
            report.push_witness(Witness::new(&p.x, &p.y, Some(0.0), delta, "delta"));
        } else if delta.abs() <= tol && d_norm > D_GATE {
            report.push_witness(Witness::new(&p.x, &p.y, Some(0.0), -d_norm, "D"));
        }
    }
    report.measure("min_delta", min_delta);
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    report
}

/// Shared scan: `X` in `p0`, `Y` in the centralizer of `X`, measure the
/// component of `[X, map Y]` orthogonal to `p0`.
fn rigidity_scan(alg: &LieAlgebra, p0: &[Vector], map: &Matrix, samples: usize, tol: f64, seed: u64, kind: &str) -> AnalysisReport {
    let mut report = AnalysisReport::new(tol, seed);
    let p0_space = Subspace::span(alg, p0);
    let r = p0_space.rank();
    report.measure("p0_dim", r as f64);
    if r == alg.dim() {
        report.samples = 0;
        report.verdict = Verdict::Pass;
        report.measure("max_residual", 0.0);
        return report;
    }
    let basis = linalg::columns_to_matrix(alg.dim(), p0_space.basis());
    let results: Vec<Option<(Vector, Vector, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let x = &basis * sampling::unit_vector(r, &mut rng);
            let cent = alg.centralizer_basis(&x).ok()?;
            let cb = linalg::columns_to_matrix(alg.dim(), cent.basis());
            let y = cb * sampling::unit_vector(cent.rank(), &mut rng);
            let w = alg.bracket_unchecked(&x, &(map * &y));
            let residual = alg.norm(&p0_space.reject(alg, &w));
            Some((x, y, residual))
        })
        .collect();
    let mut max_residual = 0.0f64;
    for (x, y, residual) in results.into_iter().flatten() {
        report.samples += 1;
        max_residual = max_residual.max(residual);
        if residual > tol {
            report.push_witness(Witness::new(&x, &y, None, -residual, kind));
        }
    }
    report.measure("max_residual", max_residual);
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    report
}

/// For `X` in the smallest eigenspace of `Psi` and `[X,Y] = 0`, checks `[X, Psi Y]` stays in it.
pub fn lemma_k_check(alg: &LieAlgebra, psi: &Direction, samples: usize, tol: f64, seed: u64) -> AnalysisReport {
    let p0 = psi.smallest_eigenspace(EIGENSPACE_TOL);
    rigidity_scan(alg, &p0, psi.matrix(), samples, tol, seed, "lemma_k")
}

/// Global version for a metric: `[X, Phi^{-1} Y]` must stay in the smallest eigenspace of `Phi`.
pub fn global_rigidity_check(alg: &LieAlgebra, phi: &MetricForm, samples: usize, tol: f64, seed: u64) -> Result<AnalysisReport> {
    if phi.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: phi.dim() });
    }
    let (vals, vecs) = linalg::sorted_eigen(phi.matrix());
    let gate = EIGENSPACE_TOL * vals[0].abs().max(1.0);
    let p0: Vec<Vector> = (0..vals.len())
        .filter(|&i| vals[i] - vals[0] <= gate)
        .map(|i| vecs.column(i).clone_owned())
        .collect();
    Ok(rigidity_scan(alg, &p0, &phi.inverse(), samples, tol, seed, "global_rigidity"))
}

/// A plane found by the curvature minimizer.
#[derive(Debug, Clone)]
pub struct PlaneWitness {
    pub z1: Vector,
    pub z2: Vector,
    pub value: f64,
}

fn orthonormal_pair(alg: &LieAlgebra, a: &Vector, b: &Vector) -> Option<(Vector, Vector)> {
    let q = linalg::orthonormalize(&[a.clone(), b.clone()], alg.h0(), 1e-12);
    (q.len() == 2).then(|| (q[0].clone(), q[1].clone()))
}

fn plane_normals(alg: &LieAlgebra, z1: &Vector, z2: &Vector) -> Vec<Vector> {
    let mut v = vec![z1.clone(), z2.clone()];
    v.extend((0..alg.dim()).map(|i| alg.basis_vector(i)));
    linalg::orthonormalize(&v, alg.h0(), 1e-9).split_off(2)
}

/// Coordinate descent over tangent moves of an orthonormal pair, step halving on stalls.
fn refine_plane(alg: &LieAlgebra, phi: &Matrix, phi_inv: &Matrix, z1: Vector, z2: Vector, steps: usize) -> PlaneWitness {
    let k = |a: &Vector, b: &Vector| puttmann_raw(alg, phi, phi_inv, a, b);
    let mut best = k(&z1, &z2);
    let (mut z1, mut z2) = (z1, z2);
    let mut h = 0.25;
    for _ in 0..steps {
        let mut improved = false;
        for n in plane_normals(alg, &z1, &z2) {
            for which in 0..2 {
                for sign in [1.0, -1.0] {
                    let (a, b) = if which == 0 { (&z1 + &n * (sign * h), z2.clone()) } else { (z1.clone(), &z2 + &n * (sign * h)) };
                    if let Some((a, b)) = orthonormal_pair(alg, &a, &b) {
                        let val = k(&a, &b);
                        if val < best {
                            best = val;
                            z1 = a;
                            z2 = b;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    PlaneWitness { z1, z2, value: best }
}

/// Minimum of the unnormalized curvature over sampled h0-orthonormal pairs,
/// each refined by coordinate descent on the pair manifold.
pub fn min_curvature_estimate(alg: &LieAlgebra, phi: &MetricForm, samples: usize, refine_steps: usize, seed: u64) -> Result<PlaneWitness> {
    if phi.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: phi.dim() });
    }
    if alg.dim() < 2 {
        return Err(Error::InvalidParameter("need at least two dimensions for a plane".into()));
    }
    let phi_m = phi.matrix();
    let phi_inv = phi.inverse();
    let n = alg.dim();
    let best = (0..samples.max(1) as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng_for(seed, i);
            let a = sampling::gaussian_vector(n, &mut rng);
            let b = sampling::gaussian_vector(n, &mut rng);
            let (z1, z2) = orthonormal_pair(alg, &a, &b)?;
            Some((i, refine_plane(alg, phi_m, &phi_inv, z1, z2, refine_steps)))
        })
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, w)| w);
    best.ok_or_else(|| Error::InvalidParameter("no valid planes sampled".into()))
}

/// An so(4) metric violating global rigidity: `Phi^{-1}` is the identity except
/// `[A1, A1] = 2` and a coupling `0.3` between `A2` and `B2`, which mixes the
/// smallest eigenspace with its complement.
pub fn mixing_counterexample() -> MetricForm {
    let mut inv = Matrix::identity(6, 6);
    inv[(0, 0)] = 2.0;
    inv[(1, 4)] = 0.3;
    inv[(4, 1)] = 0.3;
    MetricForm::new(linalg::symmetrize(&linalg::inverse(&inv).expect("invertible"))).expect("positive definite")
}

/// Checks that `m` is symmetric positive definite and ad-invariant for `alg`.
pub fn validate_biinvariant(alg: &LieAlgebra, m: &Matrix) -> Result<()> {
    if m.nrows() != alg.dim() || m.ncols() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: m.nrows() });
    }
    linalg::check_spd(m, 1e-12)?;
    let residual = alg.ad_invariance_residual(m);
    if residual > CLOSURE_TOL * (1.0 + m.amax()) {
        return Err(Error::NotBiInvariant { residual });
    }
    Ok(())
}

/// `Upsilon = I - Theta^{-1}` for the same target metric seen from `h1 = h0(M.,.)`;
/// equals `I - (I - Psi) M`.
pub fn shifted_direction(psi: &Matrix, m: &Matrix) -> Matrix {
    let n = psi.nrows();
    Matrix::identity(n, n) - (Matrix::identity(n, n) - psi) * m
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Identity tolerance for the bi-invariant shift checks.
pub const SHIFT_TOL: f64 = 1e-9;

/// Verifies `D^Upsilon_{X,Y} = D^Psi_{MX,MY}` and `delta^{Upsilon,h1}_{X,Y} =
/// delta^{Psi,h0}_{MX,MY}` for a commuting pair; for scalar `M = lambda I`
/// also the kappa identity at `t in {0, 0.2, 0.5}`.
pub fn biinvariant_shift_check(alg: &LieAlgebra, m: &Matrix, psi: &Direction, pair: &CommutingPair) -> Result<AnalysisReport> {
    biinvariant_shift_check_tol(alg, m, psi, pair, SHIFT_TOL)
}

pub fn biinvariant_shift_check_tol(alg: &LieAlgebra, m: &Matrix, psi: &Direction, pair: &CommutingPair, tol: f64) -> Result<AnalysisReport> {
    validate_biinvariant(alg, m)?;
    if !alg.has_identity_h0() {
        return Err(Error::InvalidParameter("reference algebra must use the identity inner product".into()));
    }
    let h1 = alg.with_inner_product(m.clone())?;
    let ups = shifted_direction(psi.matrix(), m);
    let (x, y) = (&pair.x, &pair.y);
    let (mx, my) = (m * x, m * y);

    let lhs = coefficients_raw(&h1, &ups, x, y);
    let rhs = coefficients_raw(alg, psi.matrix(), &mx, &my);
    let lhs_delta = third_derivative_raw(&h1, &ups, x, y);
    let rhs_delta = third_derivative_raw(alg, psi.matrix(), &mx, &my);

    let scale = 1.0f64.max(lhs.d.amax()).max(rhs.d.amax());
    let d_gap = (&lhs.d - &rhs.d).amax() / scale;
    let delta_gap = rel_gap(lhs_delta, rhs_delta).max(rel_gap(lhs.delta, rhs.delta));

    let mut report = AnalysisReport::new(tol, 0);
    report.samples = 1;
    report.measure("d_residual", d_gap);
    report.measure("delta_residual", delta_gap);
    if d_gap > tol {
        report.push_witness(Witness::new(x, y, None, -d_gap, "D_identity"));
    }
    if delta_gap > tol {
        report.push_witness(Witness::new(x, y, None, -delta_gap, "delta_identity"));
    }
    if let Some(lambda) = scalar_multiple(m) {
        let mut worst = 0.0f64;
        for t in [0.0, 0.2, 0.5] {
            let (l, r) = scalar_shift_kappa_sides(alg, lambda, psi, x, y, t)?;
            let gap = rel_gap(l, r);
            worst = worst.max(gap);
            if gap > tol {
                report.push_witness(Witness::new(x, y, Some(t), -gap, "kappa_identity"));
            }
        }
        report.measure("kappa_residual", worst);
    }
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// `Some(lambda)` when `m = lambda I`.
pub fn scalar_multiple(m: &Matrix) -> Option<f64> {
    let n = m.nrows();
    let lambda = m[(0, 0)];
    let scalar = Matrix::identity(n, n) * lambda;
    ((m - scalar).amax() <= 1e-15 * lambda.abs().max(1.0)).then_some(lambda)
}

/// Both sides of `(lambda / (1 - (1-lambda) t))^3 kappa^{Upsilon,h1}_{X,Y}(t)
/// = kappa^{Psi,h0}_{lambda X, lambda Y}(lambda t / (1 - (1-lambda) t))`.
/// `X`, `Y` need not commute.
pub fn scalar_shift_kappa_sides(alg: &LieAlgebra, lambda: f64, psi: &Direction, x: &Vector, y: &Vector, t: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {lambda} must be positive")));
    }
    let n = alg.dim();
    let m = Matrix::identity(n, n) * lambda;
    let ups = shifted_direction(psi.matrix(), &m);
    // h_t relative to h0 is M (I - t Upsilon)^{-1}; the twisted plane is (I - t Upsilon){X, Y}
    let inv = Matrix::identity(n, n) - &ups * t;
    let phi1 = linalg::inverse(&inv)?;
    let metric = &m * &phi1;
    linalg::check_spd(&linalg::symmetrize(&metric), 1e-9)?;
    let k1 = puttmann_raw(alg, &metric, &linalg::inverse(&metric)?, &(&inv * x), &(&inv * y));
    let denom = 1.0 - (1.0 - lambda) * t;
    let lhs = (lambda / denom).powi(3) * k1;
    let s = lambda * t / denom;
    let rhs = curvature::kappa(alg, psi, &(x * lambda), &(y * lambda), s)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_so3, build_so4};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn diag(d: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_row_slice(d))
    }

    fn diagonal_subalgebra(g: &LieAlgebra) -> Subspace {
        Subspace::span(g, &[v(&[1., 0., 0., 1., 0., 0.]), v(&[0., 1., 0., 0., 1., 0.]), v(&[0., 0., 1., 0., 0., 1.])])
    }

    #[test]
    fn cheeger_examples() {
        let a = cheeger_evolve(&diag(&[1.0, 0.5]), 1.0).unwrap();
        assert!((a - diag(&[0.5, 1.0 / 3.0])).amax() < 1e-15);
        let a0 = diag(&[2.0, 0.25]);
        assert_eq!(cheeger_evolve(&a0, 0.0).unwrap(), a0);
        let a = cheeger_evolve(&diag(&[0.5]), 3.0).unwrap();
        assert!((a[(0, 0)] - 0.2).abs() < 1e-15);
        assert!(matches!(cheeger_evolve(&diag(&[-1.0]), 1.0), Err(Error::Singular)));
    }

    #[test]
    fn shrink_direction_examples() {
        let g = build_so4();
        let g1 = Subspace::coordinate(&g, &[0, 1, 2]);
        let psi = shrink_direction(&g, &g1).unwrap();
        assert!((psi.matrix() - diag(&[-1., -1., -1., 0., 0., 0.])).amax() < 1e-15);
        let g3 = build_so3();
        let psi = shrink_direction(&g3, &Subspace::coordinate(&g3, &[2])).unwrap();
        assert!((psi.matrix() - diag(&[0., 0., -1.])).amax() < 1e-15);
        let dom = metrics::domain_of(&shrink_direction(&g, &diagonal_subalgebra(&g)).unwrap());
        assert!((dom.lower + 1.0).abs() < 1e-12 && dom.upper.is_infinite());
        let bad = Subspace::coordinate(&g, &[0, 1]);
        assert!(matches!(shrink_direction(&g, &bad), Err(Error::NotSubalgebra { .. })));
    }

    #[test]
    fn abelian_enlargement_examples() {
        let g = build_so3();
        let s = Subspace::coordinate(&g, &[2]);
        let (e1, e2) = (g.basis_vector(0), g.basis_vector(1));
        assert!(abelian_enlarge_kappa(&g, &s, &e1, &e2, 0.25).unwrap().abs() < 1e-15);
        assert_eq!(abelian_enlarge_kappa(&g, &s, &e1, &e2, 0.0).unwrap(), 0.25);
        let val = abelian_enlarge_kappa(&g, &s, &e1, &e2, 0.3).unwrap();
        let direct = curvature::kappa(&g, &enlarge_direction(&g, &s).unwrap(), &e1, &e2, 0.3).unwrap();
        assert!((val + 0.0714285714).abs() < 1e-9);
        assert!((val - direct).abs() < 1e-12);
        assert!(matches!(abelian_enlarge_kappa(&g, &s, &e1, &e2, 1.0), Err(Error::OutsideDomain { .. })));
        let g4 = build_so4();
        let g1 = Subspace::coordinate(&g4, &[0, 1, 2]);
        assert!(matches!(
            abelian_enlarge_kappa(&g4, &g1, &g4.basis_vector(0), &g4.basis_vector(1), 0.1),
            Err(Error::NotAbelian { .. })
        ));
    }

    #[test]
    fn nonabelian_series_matches_direct_kappa() {
        let g = build_so4();
        let g1 = Subspace::coordinate(&g, &[0, 1, 2]);
        let x = v(&[1., 0., 0., 1., 0., 0.]);
        let y = v(&[0., 1., 0., 0., 1., 0.]);
        let psi = enlarge_direction(&g, &g1).unwrap();
        let series = nonabelian_enlarge_kappa(&g, &g1, &x, &y, 0.1).unwrap();
        let direct = curvature::kappa(&g, &psi, &x, &y, 0.1).unwrap();
        assert!((series - direct).abs() < 1e-9);
        assert_eq!(nonabelian_enlarge_kappa(&g, &g1, &x, &y, 0.0).unwrap(), 0.25 * g.norm_sq(&g.bracket_unchecked(&x, &y)));
        // abelian degeneration
        let g3 = build_so3();
        let s = Subspace::coordinate(&g3, &[2]);
        let (a, b) = (v(&[0.3, 1.0, 0.2]), v(&[1.0, -0.4, 0.7]));
        for t in [-0.5, 0.2, 0.6] {
            let lhs = nonabelian_enlarge_kappa(&g3, &s, &a, &b, t).unwrap();
            let rhs = abelian_enlarge_kappa(&g3, &s, &a, &b, t).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn abelian_expansion_bound() {
        let g = build_so3();
        let s = Subspace::coordinate(&g, &[2]);
        let r = max_abelian_expansion_check(&g, &s, 0.25, 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.measurements["max_expansion"] - 4.0 / 3.0).abs() < 1e-12);
        let r = max_abelian_expansion_check(&g, &s, 0.3, 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.worst().unwrap();
        assert!((w.x[2].abs() - 1.0).abs() < 1e-12);
        assert!((4.0 / 3.0 - w.value - 1.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn central_abelian_subalgebra_expands_freely() {
        let r1 = LieAlgebra::new("r1", 1, vec![0.0], Matrix::identity(1, 1)).unwrap();
        let u2 = crate::lie::direct_sum(&r1, &build_so3()).unwrap();
        let center = Subspace::coordinate(&u2, &[0]);
        for t in [0.0, 0.5, 0.9, 0.999] {
            assert_eq!(max_abelian_expansion_check(&u2, &center, t, 100, 4).unwrap().verdict, Verdict::Pass);
        }
    }

    #[test]
    fn bracket_ratio_examples() {
        let g = build_so4();
        let torus = Subspace::coordinate(&g, &[2, 3]);
        assert_eq!(bracket_ratio_sup(&g, &torus, 200, 0).sup, 0.0);
        let g1 = Subspace::coordinate(&g, &[0, 1, 2]);
        let est = bracket_ratio_sup(&g, &g1, 500, 0);
        assert!(est.sup <= 1.0 + 1e-12 && est.sup > 0.5);
        let diag_est = bracket_ratio_sup(&g, &diagonal_subalgebra(&g), 200, 0);
        assert!(diag_est.sup.is_infinite());
        // the textbook witness
        let x = v(&[1., 0., 0., 0., 0., 0.]);
        let y = v(&[0., 0., 0., 0., 1., 0.]);
        let d = diagonal_subalgebra(&g);
        assert!(g.bracket_unchecked(&x, &y).norm() == 0.0);
        assert!(g.bracket_unchecked(&d.project(&g, &x), &d.project(&g, &y)).norm() > 0.1);
    }

    #[test]
    fn commuting_pair_sampler() {
        assert!(sample_commuting_pairs(&build_so3(), 20, 0).is_empty());
        let g = build_so4();
        let pairs = sample_commuting_pairs(&g, 100, 5);
        assert_eq!(pairs.len(), 100);
        for p in &pairs {
            assert!(p.commutator_norm <= 1e-10);
            assert!((g.norm(&p.x) - 1.0).abs() < 1e-12 && (g.norm(&p.y) - 1.0).abs() < 1e-12);
            assert!(g.inner(&p.x, &p.y).abs() < 1e-12);
        }
        let again = sample_commuting_pairs(&g, 100, 5);
        assert_eq!(pairs[17].x, again[17].x);
        // a general (non fast-path) copy of so4 still finds pairs
        let general = g.with_inner_product(Matrix::identity(6, 6) * 2.0).unwrap();
        let pairs = sample_commuting_pairs(&general, 10, 1);
        assert_eq!(pairs.len(), 10);
        for p in &pairs {
            assert!(general.commute(&p.x, &p.y));
        }
    }

    #[test]
    fn nonnegativity_examples() {
        let g = build_so4();
        let d = diagonal_subalgebra(&g);
        let shrink = shrink_direction(&g, &d).unwrap();
        let r = infinitesimal_nonnegativity_report(&g, &shrink, 500, NONNEG_TOL, 1);
        assert_eq!(r.verdict, Verdict::Pass);
        let expand = enlarge_direction(&g, &d).unwrap();
        let r = infinitesimal_nonnegativity_report(&g, &expand, 500, NONNEG_TOL, 1);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.worst().unwrap().value < -NONNEG_TOL);
        let scalar = Direction::new(Matrix::identity(6, 6) * 0.7).unwrap();
        assert_eq!(infinitesimal_nonnegativity_report(&g, &scalar, 300, NONNEG_TOL, 2).verdict, Verdict::Pass);
        let r = infinitesimal_nonnegativity_report(&build_so3(), &Direction::zero(3), 10, NONNEG_TOL, 0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn lemma_k_examples() {
        let g = build_so4();
        let g1 = Subspace::coordinate(&g, &[0, 1, 2]);
        let psi = shrink_direction(&g, &g1).unwrap();
        assert_eq!(lemma_k_check(&g, &psi, 300, 1e-9, 0).verdict, Verdict::Pass);
        assert_eq!(lemma_k_check(&g, &Direction::zero(6), 10, 1e-9, 0).verdict, Verdict::Pass);
        // the expansion of the diagonal is not infinitesimally nonnegative and fails lemma k
        let expand = enlarge_direction(&g, &diagonal_subalgebra(&g)).unwrap();
        let lk = lemma_k_check(&g, &expand, 300, 1e-9, 0);
        let nn = infinitesimal_nonnegativity_report(&g, &expand, 300, NONNEG_TOL, 0);
        if lk.verdict == Verdict::Fail {
            assert_eq!(nn.verdict, Verdict::Fail);
        }
    }

    #[test]
    fn global_rigidity_examples() {
        let g = build_so4();
        assert_eq!(global_rigidity_check(&g, &MetricForm::identity(6), 10, 1e-9, 0).unwrap().verdict, Verdict::Pass);
        let r = global_rigidity_check(&g, &mixing_counterexample(), 200, 1e-9, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.worst().unwrap();
        assert!((w.x[0].abs() - 1.0).abs() < 1e-12);
        // the witness Y = (0, e2) from the construction also fails
        let x = g.basis_vector(0);
        let y = g.basis_vector(4);
        let inv = mixing_counterexample().inverse();
        let w = g.bracket_unchecked(&x, &(&inv * &y));
        assert!((w[2].abs() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn min_curvature_examples() {
        let g = build_so4();
        let w = min_curvature_estimate(&g, &MetricForm::identity(6), 50, 30, 0).unwrap();
        assert!(w.value >= -1e-12 && w.value < 1e-6, "value {}", w.value);
        let g3 = build_so3();
        let w = min_curvature_estimate(&g3, &MetricForm::from_diagonal(&[1.0, 1.0, 2.0]).unwrap(), 50, 50, 0).unwrap();
        assert!(w.value <= -0.5 + 1e-9, "value {}", w.value);
        let boundary = metrics::path_at(&Direction::from_diagonal(&[0.0, 0.0, 1.0]).unwrap(), 0.25).unwrap();
        let w = min_curvature_estimate(&g3, &boundary, 50, 50, 0).unwrap();
        assert!(w.value.abs() < 1e-6, "value {}", w.value);
    }

    #[test]
    fn shift_identities() {
        let g = build_so4();
        let psi = Direction::new(sampling::symmetric_matrix(6, &mut rng_for(3, 0)) * 0.3).unwrap();
        let pair = sample_commuting_pairs(&g, 1, 9).remove(0);
        let r = biinvariant_shift_check(&g, &Matrix::identity(6, 6), &psi, &pair).unwrap();
        assert!(r.passed());
        assert!(r.measurements["d_residual"] < 1e-15);
        let m = diag(&[2., 2., 2., 1., 1., 1.]);
        assert!(biinvariant_shift_check(&g, &m, &psi, &pair).unwrap().passed());
        let r = biinvariant_shift_check(&g, &(Matrix::identity(6, 6) * 1.5), &psi, &pair).unwrap();
        assert!(r.passed() && r.measurements.contains_key("kappa_residual"));
        let bad = diag(&[2., 1., 1., 1., 1., 1.]);
        assert!(matches!(biinvariant_shift_check(&g, &bad, &psi, &pair), Err(Error::NotBiInvariant { .. })));
    }
}
