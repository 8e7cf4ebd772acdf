//! The `verify` suites. Each draws from its own seeded streams and returns an
//! [`AnalysisReport`]; suites run in parallel but are reported in list order.

use rayon::prelude::*;
use serde::Serialize;

use curvlab_core::curvature::{self, kappa, kappa_coefficients, koszul_oracle, puttmann_curvature};
use curvlab_core::lie::{build_so3, build_so4, Subspace};
use curvlab_core::metrics::{self, path_at, shift_direction, Direction, MetricForm};
use curvlab_core::oracle::{relative_gap, richardson};
use curvlab_core::report::{AnalysisReport, Verdict, Witness};
use curvlab_core::sampling::{gaussian_vector, orthogonal_matrix, rng_for, spd_matrix, symmetric_matrix};
use curvlab_core::so4::{self, TorusParams};
use curvlab_core::variations;
use curvlab_core::{Matrix, Result, Vector};

use rand::Rng;

/// Inputs shared by every suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteContext {
    pub seed: u64,
    pub samples: usize,
    /// Replaces each suite's own tolerance when set.
    pub tol: Option<f64>,
}

impl SuiteContext {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Independent seed for sub-stream `k` of a suite.
    fn stream(&self, k: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
    }

    fn scaled(&self, divisor: usize) -> usize {
        (self.samples / divisor).max(1)
    }
}

pub struct Suite {
    pub name: &'static str,
    pub run: fn(&SuiteContext) -> Result<AnalysisReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<AnalysisReport>,
}

pub fn all() -> Vec<Suite> {
    vec![
        Suite { name: "oracle_equivalence", run: oracle_equivalence },
        Suite { name: "closed_form", run: closed_form },
        Suite { name: "commuting_cubic", run: commuting_cubic },
        Suite { name: "abelian_expansion", run: abelian_expansion },
        Suite { name: "cheeger_evolution", run: cheeger_evolution },
        Suite { name: "reparametrization", run: reparametrization },
        Suite { name: "six_tuples", run: six_tuples },
        Suite { name: "torus_boundary", run: torus_boundary },
        Suite { name: "s3_family", run: s3_family },
        Suite { name: "shift_identities", run: shift_identities },
        Suite { name: "rigidity", run: rigidity },
        Suite { name: "catalog_consistency", run: catalog_consistency },
    ]
}

pub fn run_all(ctx: &SuiteContext) -> Vec<SuiteOutcome> {
    all()
        .par_iter()
        .map(|s| match (s.run)(ctx) {
            Ok(report) => SuiteOutcome { name: s.name, verdict: report.verdict, error: None, report: Some(report) },
            Err(e) => SuiteOutcome { name: s.name, verdict: Verdict::Fail, error: Some(e.to_string()), report: None },
        })
        .collect()
}

fn finish(mut report: AnalysisReport, samples: usize) -> AnalysisReport {
    report.samples = samples;
    report.verdict = if report.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    report
}

fn random_direction(n: usize, seed: u64, i: u64, scale: f64) -> Direction {
    Direction::new(symmetric_matrix(n, &mut rng_for(seed, i)) * scale).expect("symmetric")
}

fn zero6() -> Vector {
    Vector::zeros(6)
}

fn oracle_equivalence(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-9);
    let mut report = AnalysisReport::new(tol, ctx.seed);
    for (k, alg) in [build_so3(), build_so4()].into_iter().enumerate() {
        let n = alg.dim();
        let seed = ctx.stream(k as u64);
        let mut worst = 0.0f64;
        for i in 0..ctx.samples as u64 {
            let mut rng = rng_for(seed, i);
            let phi = MetricForm::new(spd_matrix(n, 0.3, 3.0, &mut rng))?;
            let z1 = gaussian_vector(n, &mut rng);
            let z2 = gaussian_vector(n, &mut rng);
            let p = puttmann_curvature(&alg, &phi, &z1, &z2)?;
            let q = koszul_oracle(&alg, &phi, &z1, &z2)?;
            let gap = relative_gap(p, q);
            worst = worst.max(gap);
            if gap > tol {
                report.push_witness(Witness::new(&z1, &z2, None, -gap, alg.name()));
            }
        }
        report.measure(&format!("max_rel_dev[{}]", alg.name()), worst);
    }
    Ok(finish(report, 2 * ctx.samples))
}

fn closed_form(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-8);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let draws = ctx.scaled(10);
    let mut worst = 0.0f64;
    for i in 0..draws as u64 {
        let psi = random_direction(6, ctx.stream(0), i, 0.5);
        let mut rng = rng_for(ctx.stream(1), i);
        let x = gaussian_vector(6, &mut rng);
        let y = gaussian_vector(6, &mut rng);
        let c = kappa_coefficients(&alg, &psi, &x, &y)?;
        for t in metrics::domain_of(&psi).span_points(20, 0.9, 10.0) {
            let direct = kappa(&alg, &psi, &x, &y, t)?;
            let closed = c.evaluate(&alg, &psi, t)?;
            let gap = (direct - closed).abs() / (1.0 + direct.abs());
            worst = worst.max(gap);
            if gap > tol {
                report.push_witness(Witness::new(&x, &y, Some(t), -gap, "closed_form"));
            }
        }
    }
    report.measure("max_scaled_gap", worst);
    Ok(finish(report, draws * 20))
}

fn commuting_cubic(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let zero_tol = ctx.tol(1e-10);
    let fd_tol = ctx.tol(1e-5);
    let alg = build_so4();
    let mut report = AnalysisReport::new(zero_tol, ctx.seed);
    let pairs = variations::sample_commuting_pairs(&alg, ctx.samples, ctx.stream(0));
    let (mut low, mut five_gap, mut fd_gap) = (0.0f64, 0.0f64, 0.0f64);
    for (i, p) in pairs.iter().enumerate() {
        let psi = random_direction(6, ctx.stream(1), i as u64, 1.0);
        let c = kappa_coefficients(&alg, &psi, &p.x, &p.y)?;
        let l = c.alpha.abs().max(c.beta.abs()).max(c.gamma.abs());
        low = low.max(l);
        if l > zero_tol {
            report.push_witness(Witness::new(&p.x, &p.y, None, -l, "low_order"));
        }
        let five = curvature::third_derivative_commuting(&alg, &psi, &p.x, &p.y)?;
        let g = (five - c.delta).abs() / (1.0 + c.delta.abs());
        five_gap = five_gap.max(g);
        if g > zero_tol {
            report.push_witness(Witness::new(&p.x, &p.y, None, -g, "five_term"));
        }
        let f = |t: f64| kappa(&alg, &psi, &p.x, &p.y, t).unwrap_or(f64::NAN);
        let fd = richardson(&f, 0.0, 1e-3, 3) / 6.0;
        let g = relative_gap(fd, five);
        fd_gap = fd_gap.max(g);
        if !(g <= fd_tol) {
            report.push_witness(Witness::new(&p.x, &p.y, None, -g, "finite_difference"));
        }
    }
    report.measure("max_low_order", low);
    report.measure("max_five_term_gap", five_gap);
    report.measure("max_fd_gap", fd_gap);
    Ok(finish(report, pairs.len()))
}

fn abelian_expansion(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-9);
    let alg = build_so3();
    let s = Subspace::coordinate(&alg, &[2]);
    let psi = variations::enlarge_direction(&alg, &s)?;
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let at_bound = variations::min_curvature_estimate(&alg, &path_at(&psi, 0.25)?, ctx.samples, 40, ctx.stream(0))?;
    report.measure("min_curvature[t=1/4]", at_bound.value);
    if at_bound.value < -tol {
        report.push_witness(Witness::new(&at_bound.z1, &at_bound.z2, Some(0.25), at_bound.value, "below_bound"));
    }
    let beyond = variations::min_curvature_estimate(&alg, &path_at(&psi, 0.3)?, ctx.samples, 40, ctx.stream(1))?;
    report.measure("min_curvature[t=0.3]", beyond.value);
    // closed form on {e1, e2}: 1/4 - 3/4 * 0.3/0.7
    let closed = variations::abelian_enlarge_kappa(&alg, &s, &alg.basis_vector(0), &alg.basis_vector(1), 0.3)?;
    report.measure("closed_form[t=0.3]", closed);
    if !(beyond.value <= -0.07) {
        report.push_witness(Witness::new(&beyond.z1, &beyond.z2, Some(0.3), -(beyond.value + 0.07).abs(), "missing_negative_plane"));
    }
    let exp = variations::max_abelian_expansion_check_tol(&build_so4(), &Subspace::coordinate(&build_so4(), &[2]), 0.25, ctx.samples, ctx.stream(2), tol)?;
    report.measure("max_expansion[so4,t=1/4]", exp.measurements.get("max_expansion").copied().unwrap_or(f64::NAN));
    for w in exp.witnesses {
        report.push_witness(w);
    }
    Ok(finish(report, 2 * ctx.samples))
}

fn cheeger_evolution(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-12);
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let draws = ctx.scaled(4);
    let mut worst = 0.0f64;
    for i in 0..draws as u64 {
        let mut rng = rng_for(ctx.stream(0), i);
        let n = rng.gen_range(2..=6);
        let lambdas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
        let t = rng.gen_range(0.0..4.0);
        let a0 = Matrix::from_diagonal(&Vector::from_iterator(n, lambdas.iter().map(|l| 1.0 / l)));
        let at = variations::cheeger_evolve(&a0, t)?;
        let expect = Matrix::from_diagonal(&Vector::from_iterator(n, lambdas.iter().map(|l| 1.0 / (l + t))));
        let g = (&at - expect).amax();
        worst = worst.max(g);
        if g > tol {
            report.push_witness(Witness::new(&Vector::from_vec(lambdas.clone()), &Vector::zeros(n), Some(t), -g, "diagonal"));
        }
        let a0 = spd_matrix(n, 0.2, 3.0, &mut rng);
        let at = variations::cheeger_evolve(&a0, t)?;
        let lhs = curvlab_core::linalg::inverse(&at)?;
        let rhs = curvlab_core::linalg::inverse(&a0)? + Matrix::identity(n, n) * t;
        let g = (&lhs - &rhs).amax() / rhs.amax().max(1.0);
        worst = worst.max(g);
        // inversion roundoff grows with the condition number
        if g > tol * 100.0 {
            report.push_witness(Witness::new(&a0.diagonal(), &Vector::zeros(n), Some(t), -g, "inverse_linear"));
        }
    }
    report.measure("max_gap", worst);
    Ok(finish(report, 2 * draws))
}

fn reparametrization(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-12);
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let draws = ctx.scaled(10);
    let mut worst = 0.0f64;
    for i in 0..draws as u64 {
        let mut rng = rng_for(ctx.stream(0), i);
        let n = 6;
        let q = orthogonal_matrix(n, &mut rng);
        let eig = Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(-3.0..0.0)));
        let psi = Direction::new(curvlab_core::linalg::symmetrize(&(&q * Matrix::from_diagonal(&eig) * q.transpose())))?;
        let a = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.2..1.0) };
        let (shifted, rep) = shift_direction(&psi, a);
        for k in 1..=9 {
            let s = k as f64 / 10.0;
            let lhs = path_at(&shifted, s)?.matrix() * rep.scale(s);
            let rhs = path_at(&psi, rep.t_of(s))?;
            let g = (lhs - rhs.matrix()).amax();
            worst = worst.max(g);
            if g > tol {
                report.push_witness(Witness::new(&eig, &Vector::from_element(1, a), Some(s), -g, "reparametrization"));
            }
        }
    }
    report.measure("max_gap", worst);
    Ok(finish(report, draws * 9))
}

fn six_tuples(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let draws = ctx.samples.min(100);
    let mut report = so4::verify_identities(&so4::th1_identities(), draws, ctx.stream(0), ctx.tol(so4::IDENTITY_TOL), 0.0);
    // sensitivity control: a shifted right side must be caught
    let control = so4::verify_identities(&so4::th1_identities(), draws.min(5), ctx.stream(1), ctx.tol(so4::IDENTITY_TOL), 1e-3);
    report.measure("control_detected", if control.verdict == Verdict::Fail { 1.0 } else { 0.0 });
    if control.verdict != Verdict::Fail {
        report.push_witness(Witness::new(&zero6(), &zero6(), None, -1.0, "control_not_detected"));
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

fn torus_boundary(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-9);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let mut rng = rng_for(ctx.stream(0), 0);
    let draws = ctx.scaled(100).min(4);
    for i in 0..draws as u64 {
        let (c, d) = if i == 0 { (1.0, 1.0) } else { (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)) };
        let boundary = TorusParams { c, d, a1: 4.0 * c / 3.0, a2: 4.0 * d / 3.0, a3: 0.0 };
        let est = variations::min_curvature_estimate(&alg, &boundary.metric()?, ctx.samples, 50, ctx.stream(1 + i))?;
        report.measure(&format!("boundary_min[{i}]"), est.value);
        if !(est.value >= -tol && est.value <= 1e-6) {
            report.push_witness(Witness::new(&est.z1, &est.z2, None, -est.value.abs(), "boundary"));
        }
        let inflated = TorusParams { a1: 1.05 * boundary.a1, a2: 1.05 * boundary.a2, ..boundary };
        let (z1, z2, k) = so4::proof_plane_witness(&inflated)?;
        report.measure(&format!("inflated_witness[{i}]"), k);
        if !(k <= -1e-3) {
            report.push_witness(Witness::new(&z1, &z2, None, -(k + 1e-3).abs(), "inflated"));
        }
    }
    Ok(finish(report, draws))
}

fn s3_family(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-9);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let draws = ctx.scaled(4).min(50);
    let mut worst = 0.0f64;
    for i in 0..draws as u64 {
        let mut rng = rng_for(ctx.stream(0), i);
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(0.5..2.0);
        let lambda = so4::random_so3_triple(&mut rng)?;
        let phi = so4::s3_metric(&so4::S3Params::new(a, b, lambda)?)?;
        let psi = metrics::direction_from_metric(&phi)?;
        let fit = so4::fit_s3_pattern(psi.matrix())?;
        worst = worst.max(fit.residual);
        let params = Vector::from_row_slice(&[a, b, lambda[0], lambda[1], lambda[2]]);
        if fit.residual > tol {
            report.push_witness(Witness::new(&params, &Vector::zeros(1), None, -fit.residual, "pattern_fit"));
        }
        let v = so4::classify_metric(&alg, &phi, so4::CLASSIFIER_TOL)?;
        if v.kind != so4::VerdictKind::NoSingularEigenvector {
            report.push_witness(Witness::new(&params, &Vector::zeros(1), None, -1.0, "classified_singular"));
        }
    }
    report.measure("max_fit_residual", worst);
    Ok(finish(report, draws))
}

fn shift_identities(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(variations::SHIFT_TOL);
    let kappa_tol = ctx.tol(1e-8);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let draws = ctx.scaled(2);
    let pairs = variations::sample_commuting_pairs(&alg, draws, ctx.stream(0));
    let (mut d_worst, mut delta_worst, mut k_worst) = (0.0f64, 0.0f64, 0.0f64);
    for (i, pair) in pairs.iter().enumerate() {
        let mut rng = rng_for(ctx.stream(1), i as u64);
        let (p, q) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let m = Matrix::from_diagonal(&Vector::from_row_slice(&[p, p, p, q, q, q]));
        let psi = random_direction(6, ctx.stream(2), i as u64, 0.3);
        let r = variations::biinvariant_shift_check_tol(&alg, &m, &psi, pair, tol)?;
        d_worst = d_worst.max(r.measurements["d_residual"]);
        delta_worst = delta_worst.max(r.measurements["delta_residual"]);
        for w in r.witnesses {
            report.push_witness(w);
        }
        // scalar M: kappa identity, including non-commuting pairs
        let lambda = rng.gen_range(0.5..1.5);
        let (x, y) = if i % 2 == 0 {
            (gaussian_vector(6, &mut rng), gaussian_vector(6, &mut rng))
        } else {
            (pair.x.clone(), pair.y.clone())
        };
        for t in [0.0, 0.2, 0.5] {
            let (l, r) = variations::scalar_shift_kappa_sides(&alg, lambda, &psi, &x, &y, t)?;
            let g = relative_gap(l, r);
            k_worst = k_worst.max(g);
            if g > kappa_tol {
                report.push_witness(Witness::new(&x, &y, Some(t), -g, "kappa_identity"));
            }
        }
    }
    report.measure("max_d_residual", d_worst);
    report.measure("max_delta_residual", delta_worst);
    report.measure("max_kappa_residual", k_worst);
    Ok(finish(report, pairs.len()))
}

fn rigidity(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(1e-9);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let entries = so4::catalog(ctx.stream(0), 2)?;
    for (i, e) in entries.iter().enumerate() {
        let psi = metrics::direction_from_metric(&e.metric)?;
        let lk = variations::lemma_k_check(&alg, &psi, ctx.samples, tol, ctx.stream(10 + i as u64));
        let gr = variations::global_rigidity_check(&alg, &e.metric, ctx.samples, tol, ctx.stream(20 + i as u64))?;
        for (what, r) in [("lemma_k", lk), ("global", gr)] {
            report.measure(&format!("{what}_max_residual[{}]", e.name), r.measurements.get("max_residual").copied().unwrap_or(0.0));
            for w in r.witnesses {
                report.push_witness(Witness { kind: format!("{}:{}", e.name, w.kind), ..w });
            }
        }
    }
    // the counterexample must be rejected, with a witness
    let bad = variations::global_rigidity_check(&alg, &variations::mixing_counterexample(), ctx.samples, tol, ctx.stream(1))?;
    report.measure("counterexample_witnesses", bad.witnesses.len() as f64);
    if bad.verdict != Verdict::Fail || bad.witnesses.is_empty() {
        report.push_witness(Witness::new(&zero6(), &zero6(), None, -1.0, "counterexample_accepted"));
    }
    Ok(finish(report, entries.len() + 1))
}

fn catalog_consistency(ctx: &SuiteContext) -> Result<AnalysisReport> {
    let tol = ctx.tol(variations::NONNEG_TOL);
    let alg = build_so4();
    let mut report = AnalysisReport::new(tol, ctx.seed);
    let entries = so4::catalog(ctx.stream(0), 2)?;
    for (i, e) in entries.iter().enumerate() {
        let psi = metrics::direction_from_metric(&e.metric)?;
        let nn = variations::infinitesimal_nonnegativity_report(&alg, &psi, ctx.samples, tol, ctx.stream(10 + i as u64));
        report.measure(&format!("min_delta[{}]", e.name), nn.measurements.get("min_delta").copied().unwrap_or(f64::NAN));
        if nn.verdict != Verdict::Pass {
            let w = nn.worst().cloned().unwrap_or_else(|| Witness::new(&zero6(), &zero6(), None, -1.0, "inconclusive"));
            report.push_witness(Witness { kind: format!("{}:nonnegativity", e.name), ..w });
        }
        let v = so4::classify_metric(&alg, &e.metric, so4::CLASSIFIER_TOL)?;
        if Some(v.kind) != so4::expected_kind(e.family) {
            report.push_witness(Witness::new(&zero6(), &zero6(), None, -1.0, &format!("{}:classified_{}", e.name, v.kind)));
        }
    }
    Ok(finish(report, entries.len()))
}
