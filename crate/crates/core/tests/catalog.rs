//! The so(4) catalog: every member is nonnegatively curved, passes the
//! rigidity scans, and generates an infinitesimally nonnegative direction.

use curvlab_core::lie::build_so4;
use curvlab_core::metrics::direction_from_metric;
use curvlab_core::report::Verdict;
use curvlab_core::so4::{self, catalog, TorusParams};
use curvlab_core::variations::{
    global_rigidity_check, infinitesimal_nonnegativity_report, lemma_k_check, min_curvature_estimate, NONNEG_TOL,
};

#[test]
fn catalog_members_are_nonnegative_and_rigid() {
    let g = build_so4();
    for entry in catalog(7, 2).unwrap() {
        let est = min_curvature_estimate(&g, &entry.metric, 300, 40, 1).unwrap();
        assert!(est.value >= -1e-9, "{}: {}", entry.name, est.value);
        assert!(global_rigidity_check(&g, &entry.metric, 300, 1e-9, 2).unwrap().passed(), "{}", entry.name);
        let psi = direction_from_metric(&entry.metric).unwrap();
        assert!(lemma_k_check(&g, &psi, 300, 1e-9, 3).passed(), "{}", entry.name);
        let r = infinitesimal_nonnegativity_report(&g, &psi, 1000, NONNEG_TOL, 4);
        assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", entry.name, r.worst());
    }
}

#[test]
fn families_decompose_into_invariant_abelian_planes() {
    let torus = TorusParams { c: 1.1, d: 0.8, a1: 1.0, a2: 0.9, a3: 0.2 }.metric().unwrap();
    let phi = torus.matrix();
    // {A1, B2}, {A2, B3}, {A3, B1}
    for (i, j) in [(0, 4), (1, 5), (2, 3)] {
        let u = nalgebra::Vector3::from_fn(|k, _| if k == i { 1.0 } else { 0.0 });
        let v = nalgebra::Vector3::from_fn(|k, _| if k + 3 == j { 1.0 } else { 0.0 });
        assert!(so4::plane_residual(phi, &u, &v) < 1e-12);
    }
    let s3 = so4::S3Params::new(1.3, 0.6, [1.0, 1.1, 1.2]).unwrap();
    let m = s3.matrix();
    for i in 0..3 {
        let e = nalgebra::Vector3::from_fn(|k, _| if k == i { 1.0 } else { 0.0 });
        assert!(so4::plane_residual(&m, &e, &e) < 1e-12);
    }
}

#[test]
fn torus_boundary_is_flat_and_inflation_is_negative() {
    let g = build_so4();
    let boundary = TorusParams { c: 1.0, d: 1.0, a1: 4.0 / 3.0, a2: 4.0 / 3.0, a3: 0.0 };
    let est = min_curvature_estimate(&g, &boundary.metric().unwrap(), 300, 50, 0).unwrap();
    assert!(est.value >= -1e-9 && est.value <= 1e-6, "{}", est.value);
    let inflated = TorusParams { a1: 1.05 * 4.0 / 3.0, a2: 1.05 * 4.0 / 3.0, ..boundary };
    assert!(inflated.metric().is_err());
    let (_, _, k) = so4::proof_plane_witness(&inflated).unwrap();
    assert!(k <= -1e-3);
    let phi = curvlab_core::MetricForm::new(inflated.matrix()).unwrap();
    assert!(min_curvature_estimate(&g, &phi, 300, 50, 0).unwrap().value <= k + 1e-12);
}

#[test]
fn classifier_round_trip_on_th2_forms() {
    let g = build_so4();
    let mut rng = curvlab_core::sampling::rng_for(9, 0);
    for _ in 0..20 {
        let mut p = so4::random_th2_params(&mut rng);
        p.b3 = 0.0;
        p.lambda = 0.0;
        p.mu = 0.0;
        p.c3 = 0.0;
        // b3 = c3 = 0 leaves only the (A1, B1) coupling: torus-like singular structure
        let psi = curvlab_core::Direction::new(p.matrix()).unwrap();
        let v = so4::classify_direction(&g, &psi, so4::CLASSIFIER_TOL).unwrap();
        assert!(matches!(v.kind, so4::VerdictKind::TorusForm | so4::VerdictKind::SingularNotTorus));
        assert!(!v.singular_eigenvectors.is_empty());
    }
}
