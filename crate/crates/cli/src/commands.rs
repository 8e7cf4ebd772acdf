//! The five commands. Each returns the rendered report and an exit code;
//! writing it out is left to [`crate::run`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use curvlab_core::io::{self, Loaded, MatrixFile};
use curvlab_core::lie::{build_so3, build_so4, LieAlgebra};
use curvlab_core::metrics::{self, Direction, MetricForm};
use curvlab_core::oracle::relative_gap;
use curvlab_core::report::{AnalysisReport, Verdict, Witness};
use curvlab_core::sampling::{gaussian_vector, rng_for, spd_matrix, symmetric_matrix};
use curvlab_core::so4::{self, ClassifierVerdict};
use curvlab_core::variations;
use curvlab_core::curvature::{koszul_raw, puttmann_raw};

use crate::config::{Format, RunConfig};
use crate::suites::{self, SuiteContext, SuiteOutcome};
use crate::{CliError, Output, EXIT_FAIL, EXIT_PASS, SCHEMA_VERSION};

/// Every JSON report: version, command and resolved config, then the body.
#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    schema: u32,
    command: &'static str,
    config: &'a RunConfig,
    verdict: Verdict,
    #[serde(flatten)]
    body: B,
}

fn envelope<B: Serialize>(cfg: &RunConfig, verdict: Verdict, body: B) -> String {
    let resolved = cfg.resolved();
    let env = Envelope { schema: SCHEMA_VERSION, command: cfg.command.name(), config: &resolved, verdict, body };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    text
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

/// Resolves `--algebra` (`so3`, `so4` or a descriptor path).
pub fn resolve_algebra(spec: &str) -> Result<LieAlgebra, CliError> {
    match spec {
        "so3" => Ok(build_so3()),
        "so4" => Ok(build_so4()),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read algebra {path}: {e}")))?;
            Ok(io::parse_algebra(&text)?)
        }
    }
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct VerifyBody {
    suites: Vec<SuiteOutcome>,
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let ctx = SuiteContext { seed: cfg.seed, samples: cfg.samples(), tol: cfg.tol };
    let outcomes = suites::run_all(&ctx);
    let verdict = if outcomes.iter().all(|o| o.verdict == Verdict::Pass) { Verdict::Pass } else { Verdict::Fail };
    let summary: Vec<String> = outcomes
        .iter()
        .map(|o| match &o.error {
            Some(e) => format!("{} {} ({e})", o.verdict, o.name),
            None => format!("{} {}", o.verdict, o.name),
        })
        .collect();
    let text = match cfg.format {
        Format::Json => envelope(cfg, verdict, VerifyBody { suites: outcomes }),
        Format::Csv => csv_text(
            &["suite", "verdict", "samples", "witnesses", "worst"],
            outcomes
                .iter()
                .map(|o| {
                    let r = o.report.as_ref();
                    vec![
                        o.name.to_string(),
                        o.verdict.to_string(),
                        r.map_or(0, |r| r.samples).to_string(),
                        r.map_or(0, |r| r.witnesses.len()).to_string(),
                        r.and_then(|r| r.worst()).map_or(String::new(), |w| fmt_f(w.value)),
                    ]
                })
                .collect(),
        ),
    };
    let code = if verdict == Verdict::Pass { EXIT_PASS } else { EXIT_FAIL };
    Ok(Output { text, summary, code })
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct AnalyzeBody {
    algebra: String,
    input_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ClassifierVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    invariant_planes: Vec<PlaneRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_curvature: Option<PlaneRecord>,
    checks: BTreeMap<&'static str, AnalysisReport>,
}

#[derive(Serialize)]
struct PlaneRecord {
    u: Vec<f64>,
    v: Vec<f64>,
    value: f64,
}

pub fn analyze(cfg: &RunConfig) -> Result<Output, CliError> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("analyze needs --input".into()))?;
    let loaded = io::load_matrix_file(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let alg = loaded.algebra;
    let tol = cfg.tol.unwrap_or(variations::NONNEG_TOL);
    let samples = cfg.samples();
    let (phi, psi, input_kind): (Option<MetricForm>, Direction, &'static str) = match loaded.content {
        Loaded::Metric(phi) => {
            let psi = metrics::direction_from_metric(&phi)?;
            (Some(phi), psi, "metric")
        }
        Loaded::Direction(psi) => (None, psi, "direction"),
    };

    let mut checks = BTreeMap::new();
    checks.insert("lemma_k", variations::lemma_k_check(&alg, &psi, samples, tol, cfg.seed));
    checks.insert("nonnegativity", variations::infinitesimal_nonnegativity_report(&alg, &psi, samples, tol, cfg.seed));
    let mut min_curvature = None;
    if let Some(phi) = &phi {
        checks.insert("global_rigidity", variations::global_rigidity_check(&alg, phi, samples, tol, cfg.seed)?);
        let est = variations::min_curvature_estimate(&alg, phi, samples, 40, cfg.seed)?;
        min_curvature = Some(PlaneRecord { u: est.z1.iter().copied().collect(), v: est.z2.iter().copied().collect(), value: est.value });
    }

    let (mut classification, mut invariant_planes) = (None, Vec::new());
    if so4::require_so4(&alg).is_ok() {
        let v = so4::classify_direction(&alg, &psi, cfg.tol.unwrap_or(so4::CLASSIFIER_TOL))?;
        classification = Some(v);
        if let Some(p) = so4::find_invariant_abelian_plane(&alg, &psi, 40, so4::CLASSIFIER_TOL.sqrt())? {
            invariant_planes.push(PlaneRecord { u: p.u.iter().copied().collect(), v: p.v.iter().copied().collect(), value: p.residual });
        }
    }

    let mut summary: Vec<String> = checks.iter().map(|(k, r)| format!("{} {k}", r.verdict)).collect();
    if let Some(c) = &classification {
        summary.push(format!("kind {}", c.kind));
    }
    let verdict = if checks.values().all(|r| r.verdict == Verdict::Pass) { Verdict::Pass } else { Verdict::Fail };
    let text = match cfg.format {
        Format::Json => envelope(
            cfg,
            verdict,
            AnalyzeBody {
                algebra: alg.name().to_string(),
                input_kind,
                metadata: loaded.metadata,
                classification,
                invariant_planes,
                min_curvature,
                checks,
            },
        ),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = checks
                .iter()
                .map(|(k, r)| vec![k.to_string(), r.verdict.to_string(), r.worst().map_or(String::new(), |w| fmt_f(w.value))])
                .collect();
            if let Some(c) = &classification {
                rows.push(vec!["classification".into(), c.kind.to_string(), String::new()]);
            }
            if let Some(m) = &min_curvature {
                rows.push(vec!["min_curvature".into(), String::new(), fmt_f(m.value)]);
            }
            csv_text(&["check", "verdict", "value"], rows)
        }
    };
    // analysis completed: verdicts live in the report
    Ok(Output { text, summary, code: EXIT_PASS })
}

// ---------------------------------------------------------------------------
// search

#[derive(Serialize)]
struct Survivor {
    index: u64,
    kind: Option<String>,
    min_delta: f64,
    psi: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SearchBody {
    algebra: String,
    draws: usize,
    survivors: Vec<Survivor>,
    kinds: BTreeMap<String, usize>,
}

/// Pairs tested per candidate direction.
const SEARCH_PAIRS: usize = 300;

pub fn search(cfg: &RunConfig) -> Result<Output, CliError> {
    let alg = resolve_algebra(cfg.algebra.as_deref().unwrap_or("so4"))?;
    let n = alg.dim();
    let tol = cfg.tol.unwrap_or(variations::NONNEG_TOL);
    let draws = cfg.samples();
    let classify = so4::require_so4(&alg).is_ok();
    let found: Vec<Option<Survivor>> = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let raw = Direction::new(symmetric_matrix(n, &mut rng_for(cfg.seed, i))).ok()?;
            let psi = raw.canonical();
            let r = variations::infinitesimal_nonnegativity_report(&alg, &psi, SEARCH_PAIRS, tol, cfg.seed.wrapping_add(i));
            if r.verdict != Verdict::Pass {
                return None;
            }
            let kind = classify
                .then(|| so4::classify_direction(&alg, &psi, so4::CLASSIFIER_TOL).ok().map(|v| v.kind.to_string()))
                .flatten();
            Some(Survivor {
                index: i,
                kind,
                min_delta: r.measurements.get("min_delta").copied().unwrap_or(f64::NAN),
                psi: io::matrix_to_rows(psi.matrix()),
            })
        })
        .collect();
    let survivors: Vec<Survivor> = found.into_iter().flatten().collect();
    let mut kinds = BTreeMap::new();
    for s in &survivors {
        *kinds.entry(s.kind.clone().unwrap_or_else(|| "UNCLASSIFIED".into())).or_insert(0) += 1;
    }
    let summary = vec![format!("{} of {draws} draws survived", survivors.len())];
    let text = match cfg.format {
        Format::Json => envelope(cfg, Verdict::Pass, SearchBody { algebra: alg.name().to_string(), draws, survivors, kinds }),
        Format::Csv => csv_text(
            &["index", "kind", "min_delta"],
            survivors
                .iter()
                .map(|s| vec![s.index.to_string(), s.kind.clone().unwrap_or_default(), fmt_f(s.min_delta)])
                .collect(),
        ),
    };
    Ok(Output { text, summary, code: EXIT_PASS })
}

// ---------------------------------------------------------------------------
// catalog

#[derive(Serialize)]
struct CatalogRecord {
    name: String,
    family: &'static str,
    file: String,
    kind: String,
    expected: String,
}

#[derive(Serialize)]
struct CatalogBody {
    entries: Vec<CatalogRecord>,
}

/// Directory written when `--out` is absent.
pub const DEFAULT_CATALOG_DIR: &str = "catalog";

pub fn catalog(cfg: &RunConfig) -> Result<Output, CliError> {
    let dir: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CATALOG_DIR));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let alg = build_so4();
    let entries = so4::catalog(cfg.seed, cfg.samples())?;
    let mut records = Vec::new();
    let mut ok = true;
    for e in &entries {
        let file = format!("{}.json", e.name);
        let meta = serde_json::json!({"name": e.name, "family": e.family, "seed": cfg.seed, "params": e.params});
        let doc = MatrixFile::metric("so4", &e.metric, Some(meta));
        let mut text = doc.to_json();
        text.push('\n');
        io::write_atomic(&dir.join(&file), &text)?;
        let kind = so4::classify_metric(&alg, &e.metric, so4::CLASSIFIER_TOL)?.kind;
        let expected = so4::expected_kind(e.family);
        ok &= expected == Some(kind);
        records.push(CatalogRecord {
            name: e.name.clone(),
            family: e.family,
            file,
            kind: kind.to_string(),
            expected: expected.map_or(String::new(), |k| k.to_string()),
        });
    }
    let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    let summary = vec![format!("{} files in {}", records.len(), dir.display())];
    let text = match cfg.format {
        Format::Json => envelope(cfg, verdict, CatalogBody { entries: records }),
        Format::Csv => csv_text(
            &["name", "family", "file", "kind"],
            records.iter().map(|r| vec![r.name.clone(), r.family.to_string(), r.file.clone(), r.kind.clone()]).collect(),
        ),
    };
    let index = dir.join(match cfg.format {
        Format::Json => "index.json",
        Format::Csv => "index.csv",
    });
    io::write_atomic(&index, &text)?;
    Ok(Output { text, summary, code: if ok { EXIT_PASS } else { EXIT_FAIL } })
}

// ---------------------------------------------------------------------------
// oracle

#[derive(Serialize)]
struct OracleRow {
    algebra: String,
    draws: usize,
    max_rel_dev: f64,
    witness: Option<Witness>,
}

#[derive(Serialize)]
struct OracleBody {
    tolerance: f64,
    results: Vec<OracleRow>,
}

pub fn oracle(cfg: &RunConfig) -> Result<Output, CliError> {
    let algebras = match &cfg.algebra {
        Some(spec) => vec![resolve_algebra(spec)?],
        None => vec![build_so3(), build_so4()],
    };
    let tol = cfg.tol.unwrap_or(1e-9);
    let draws = cfg.samples();
    let mut results = Vec::new();
    for (k, alg) in algebras.iter().enumerate() {
        let n = alg.dim();
        let seed = cfg.seed.wrapping_add(k as u64);
        let h0_inv = alg.h0().clone().try_inverse().ok_or_else(|| CliError::Input("singular reference inner product".into()))?;
        let gaps: Vec<(f64, Witness)> = (0..draws as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(seed, i);
                // H0^{-1} S is self-adjoint for h0 whenever S is symmetric positive definite
                let phi = &h0_inv * spd_matrix(n, 0.3, 3.0, &mut rng);
                let phi_inv = phi.clone().try_inverse().expect("positive definite");
                let z1 = gaussian_vector(n, &mut rng);
                let z2 = gaussian_vector(n, &mut rng);
                let p = puttmann_raw(alg, &phi, &phi_inv, &z1, &z2);
                let q = koszul_raw(alg, &phi, &z1, &z2).unwrap_or(f64::NAN);
                let gap = relative_gap(p, q);
                (gap, Witness::new(&z1, &z2, None, -gap, "puttmann_vs_koszul"))
            })
            .collect();
        let (max_rel_dev, witness) = gaps
            .into_iter()
            .fold((0.0f64, None), |(m, w), (g, wit)| if !(g <= m) { (g, Some(wit)) } else { (m, w) });
        results.push(OracleRow { algebra: alg.name().to_string(), draws, max_rel_dev, witness: witness.filter(|_| !(max_rel_dev <= tol)) });
    }
    let ok = results.iter().all(|r| r.max_rel_dev <= tol);
    let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    let summary = results.iter().map(|r| format!("{} max relative deviation {:e} over {} draws", r.algebra, r.max_rel_dev, r.draws)).collect();
    let text = match cfg.format {
        Format::Json => envelope(cfg, verdict, OracleBody { tolerance: tol, results }),
        Format::Csv => csv_text(
            &["algebra", "draws", "max_rel_dev"],
            results.iter().map(|r| vec![r.algebra.clone(), r.draws.to_string(), fmt_f(r.max_rel_dev)]).collect(),
        ),
    };
    Ok(Output { text, summary, code: if ok { EXIT_PASS } else { EXIT_FAIL } })
}
