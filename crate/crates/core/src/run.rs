//! Command dispatch and the built-in invariant suite.
//!
//! `run` takes a validated [`RunConfig`], executes the requested command and
//! returns a self-contained JSON report (plus an SVG diagram when the
//! command involves loops). `selftest` runs the named invariants T1–T4,
//! V1–V4, C1–C3, S1–S4 with a given seed and reports one row per invariant.

use crate::cohomology::{check_cocycle, same_class, solve_coboundary};
use crate::config::{ConfigError, Job, RunConfig};
use crate::curve::{CurveModel, HyperellipticCurve};
use crate::exact::GaussianRational;
use crate::linalg::Mat2;
use crate::path::{compose, pair_loop, LoopPath};
use crate::quadrature;
use crate::report::{complex_json, envelope, integrator_json, mat2_json, monodromy_json};
use crate::rng::SplitMix64;
use crate::span::{
    conjugate_triple, injectivity_verdict, noether_scan, product_matrix_exact, random_exact_connection,
    random_sl2_exact, rauch_check, ExactConnection, RankMode,
};
use crate::svg::emit_svg;
use crate::transport::{
    irreducible, monodromy, transport_chain, ConnectionForm, IntegratorConfig, TransportError,
};
use crate::variation::{cocycle_from_direction, finite_difference_oracle, TangentDirection};
use num_complex::Complex64;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Invalid configuration; maps to exit code 2.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Numerical failure during execution; maps to exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<TransportError> for RunError {
    fn from(e: TransportError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<crate::span::SpanError> for RunError {
    fn from(e: crate::span::SpanError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<crate::path::PathError> for RunError {
    fn from(e: crate::path::PathError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Value,
    pub svg: Option<String>,
}

/// Parses, validates and runs a JSON config in one go.
pub fn run_json_str(text: &str) -> Result<RunOutcome, RunError> {
    let cfg = RunConfig::from_json_str(text)?;
    run(&cfg)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let command = cfg.command.as_str();
    match &cfg.job {
        Job::Monodromy { curve, conn, loops } => {
            let mut rows = Vec::new();
            let mut mats = Vec::new();
            let mut max_det = 0.0f64;
            for (label, l) in loops {
                let r = monodromy(curve, conn, l, &cfg.integrator)?;
                max_det = max_det.max(r.det_defect);
                mats.push(r.matrix);
                rows.push(monodromy_json(label, &r));
            }
            let results = json!({
                "monodromies": rows,
                "irreducible": irreducible(&mats),
                "max_det_defect": max_det,
            });
            let svg = emit_svg(curve, &loops.iter().map(|(_, l)| l.clone()).collect::<Vec<_>>());
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: Some(svg),
            })
        }
        Job::Derivative {
            curve,
            conn,
            direction,
            loops,
        } => {
            let dir = TangentDirection::new(direction.clone());
            let cocycle = cocycle_from_direction(curve, conn, &dir, loops, &cfg.integrator)?;
            let mut rows = Vec::new();
            for (label, l) in loops {
                let entry = &cocycle.entries[label];
                let fd = finite_difference_oracle(curve, conn, &dir, l, cfg.fd_eps, &cfg.integrator)?;
                let rho_dot = entry.eta * entry.rho;
                let oracle_defect = (rho_dot - fd).frobenius();
                rows.push(json!({
                    "label": label,
                    "loop_hash": l.hash_hex(),
                    "rho": mat2_json(&entry.rho),
                    "rho_dot": mat2_json(&rho_dot),
                    "eta": mat2_json(&entry.eta),
                    "fd_oracle": mat2_json(&fd),
                    "oracle_defect": oracle_defect,
                    "err_estimate": entry.err_estimate,
                }));
            }
            let results = json!({
                "base_point": complex_json(cocycle.base_point),
                "sheet": cocycle.start_sheet,
                "fd_eps": cfg.fd_eps,
                "reducible_warning": cocycle.reducible_warning,
                "trace_defect": cocycle.trace_defect(),
                "loops": rows,
                "cfg": integrator_json(&cfg.integrator),
            });
            let svg = emit_svg(curve, &loops.iter().map(|(_, l)| l.clone()).collect::<Vec<_>>());
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: Some(svg),
            })
        }
        Job::Injectivity { model, conn } => {
            let report = injectivity_verdict(model, &conn.clone().into(), cfg.mode)?;
            let mut results = json!({
                "rank_products": report.rank_products,
                "dim_qd": report.dim_qd,
                "injective": report.injective,
                "mode": match report.mode {
                    RankMode::ExactGaussianRational => "exact",
                    RankMode::FloatSvd => "float",
                },
                "hyperelliptic_bound": report.hyperelliptic_bound,
            });
            if let Some(sv) = &report.singular_values {
                results["singular_values"] = json!(sv);
            }
            if let Some(pivots) = &report.pivots {
                results["pivots"] = json!(pivots);
                // full exact matrix for offline audit
                let rows = product_matrix_exact(model, conn)?;
                let matrix: Vec<Vec<[String; 2]>> = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| {
                                let (re, im) = e.to_string_pair();
                                [re, im]
                            })
                            .collect()
                    })
                    .collect();
                results["matrix"] = json!(matrix);
            }
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: None,
            })
        }
        Job::RauchScan { genus, trials } => {
            let report = rauch_check(*genus, *trials, cfg.seed)?;
            let rows: Vec<Value> = report
                .trials
                .iter()
                .map(|t| {
                    json!({
                        "trial": t.trial,
                        "valid_basis": t.valid_basis,
                        "rank": t.rank,
                        "pass": t.pass,
                    })
                })
                .collect();
            let results = json!({
                "genus": report.genus,
                "expected_rank": report.expected_rank,
                "trials": rows,
                "all_pass": report.all_pass,
            });
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: None,
            })
        }
        Job::NoetherScan { model, trials } => {
            let report = noether_scan(model, *trials, cfg.seed)?;
            let rows: Vec<Value> = report
                .trials
                .iter()
                .map(|t| {
                    json!({
                        "trial": t.trial,
                        "rank_exact": t.rank_exact,
                        "rank_float": t.rank_float,
                        "full_rank": t.full_rank,
                    })
                })
                .collect();
            let results = json!({
                "trials": rows,
                "full_rank_fraction": report.full_rank_fraction,
                "modes_agree": report.modes_agree,
            });
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: None,
            })
        }
        Job::Selftest => {
            let rows = selftest(cfg.seed);
            let all_pass = rows.iter().all(|r| r.pass);
            let results = json!({
                "invariants": rows.iter().map(invariant_json).collect::<Vec<_>>(),
                "all_pass": all_pass,
            });
            Ok(RunOutcome {
                report: envelope(command, cfg.seed, &cfg.echo, results),
                svg: None,
            })
        }
    }
}

/// One row of the selftest table.
#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: &'static str,
    pub detail: String,
    pub defect: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn invariant_json(r: &InvariantResult) -> Value {
    json!({
        "name": r.name,
        "detail": r.detail,
        "defect": r.defect,
        "threshold": r.threshold,
        "pass": r.pass,
    })
}

fn row(name: &'static str, detail: impl Into<String>, defect: f64, threshold: f64) -> InvariantResult {
    InvariantResult {
        name,
        detail: detail.into(),
        defect,
        threshold,
        pass: defect <= threshold,
    }
}

/// The genus-2 reference curve `y² = x⁶ − 1`.
pub fn reference_curve() -> (HyperellipticCurve, CurveModel) {
    let mut p = vec![Complex64::ZERO; 7];
    p[0] = Complex64::new(-1.0, 0.0);
    p[6] = Complex64::new(1.0, 0.0);
    let model = CurveModel::hyperelliptic(&p).expect("reference curve is squarefree");
    let h = model.as_hyperelliptic().unwrap().clone();
    (h, model)
}

/// Seeded random connection with Gaussian-rational coefficients, both exact
/// and lowered forms.
pub fn random_connection_pair(
    model: &CurveModel,
    rng: &mut SplitMix64,
) -> (ExactConnection, ConnectionForm) {
    let exact = random_exact_connection(model, rng, 100);
    let float = exact.to_float();
    (exact, float)
}

/// Adjacent-pair generator loops `(0,1), (1,2), …` at the default basepoint.
pub fn generator_loops(curve: &HyperellipticCurve, count: usize) -> Vec<(String, LoopPath)> {
    let base = curve.default_base();
    (0..count)
        .map(|k| {
            let l = pair_loop(curve, k, k + 1, base, 1).expect("generator loop construction");
            (format!("g{k}"), l)
        })
        .collect()
}

/// Runs the named invariant suites and returns one row per invariant.
pub fn selftest(seed: u64) -> Vec<InvariantResult> {
    let mut rows = Vec::new();
    let (curve, model) = reference_curve();
    let mut rng = SplitMix64::new(seed);
    let (_, conn) = random_connection_pair(&model, &mut rng);
    let scale = |v: &ConnectionForm| v.scaled(Complex64::new(0.02, 0.0));
    // keep the reference connection moderate so exponentials stay tame
    let conn = scale(&conn);
    let cfg = IntegratorConfig::default();
    let loops = generator_loops(&curve, 5);

    rows.push(t1_unimodularity(&curve, &conn, &loops, &cfg));
    rows.push(t2_homomorphism(&curve, &conn, &loops, &cfg));
    rows.push(t3_homotopy(&curve, &conn, &loops, &cfg, seed));
    rows.push(t4_tolerance_scaling(&curve, &conn, &loops));
    rows.extend(variation_invariants(&curve, &model, &conn, &loops, &cfg, seed));
    rows.extend(cohomology_invariants(&curve, &model, &conn, &loops, &cfg, seed));
    rows.extend(span_invariants(seed));
    rows
}

fn t1_unimodularity(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
) -> InvariantResult {
    let mut worst = 0.0f64;
    let mut threshold = 1e-9f64;
    for (_, l) in loops {
        match monodromy(curve, conn, l, cfg) {
            Ok(r) => {
                worst = worst.max(r.det_defect);
                threshold = threshold.max(100.0 * r.err_estimate);
            }
            Err(e) => return row("T1", format!("integration failed: {e}"), f64::INFINITY, 1e-9),
        }
    }
    row(
        "T1",
        "unimodularity |det ρ − 1| within max(1e-9, 100·err)",
        worst,
        threshold,
    )
}

fn t2_homomorphism(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
) -> InvariantResult {
    let defect = homomorphism_defect(curve, conn, loops, cfg).unwrap_or(f64::INFINITY);
    row(
        "T2",
        "monodromy is a homomorphism on generator pairs",
        defect,
        1e-8,
    )
}

/// Max defect of ρ(γ₁γ₂) = ρ(γ₁)·ρ(γ₂) over consecutive generator pairs,
/// plus a squared loop.
pub fn homomorphism_defect(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
) -> Result<f64, TransportError> {
    let mut worst = 0.0f64;
    let mats: Vec<Mat2> = loops
        .iter()
        .map(|(_, l)| monodromy(curve, conn, l, cfg).map(|r| r.matrix))
        .collect::<Result<_, _>>()?;
    for k in 0..loops.len().saturating_sub(1) {
        let composite = compose(curve, &[loops[k].1.clone(), loops[k + 1].1.clone()])?;
        let m12 = monodromy(curve, conn, &composite, cfg)?.matrix;
        worst = worst.max((m12 - mats[k] * mats[k + 1]).frobenius());
    }
    if let Some((_, first)) = loops.first() {
        let squared = compose(curve, &[first.clone(), first.clone()])?;
        let m2 = monodromy(curve, conn, &squared, cfg)?.matrix;
        worst = worst.max((m2 - mats[0] * mats[0]).frobenius());
    }
    Ok(worst)
}

fn t3_homotopy(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
    seed: u64,
) -> InvariantResult {
    let mut rng = SplitMix64::for_trial(seed, 0xBEEF);
    let mut worst = 0.0f64;
    for (_, l) in loops.iter().take(2) {
        let reference = match monodromy(curve, conn, l, cfg) {
            Ok(r) => r.matrix,
            Err(e) => return row("T3", format!("integration failed: {e}"), f64::INFINITY, 1e-8),
        };
        for _ in 0..3 {
            let jittered = l.jittered_vertices(&mut rng, 0.19, true);
            let lj = match LoopPath::from_vertices(curve, jittered, l.start_sheet()) {
                Ok(lj) => lj,
                Err(e) => return row("T3", format!("jittered loop rejected: {e}"), f64::INFINITY, 1e-8),
            };
            match monodromy(curve, conn, &lj, cfg) {
                Ok(r) => worst = worst.max((r.matrix - reference).frobenius()),
                Err(e) => return row("T3", format!("integration failed: {e}"), f64::INFINITY, 1e-8),
            }
        }
    }
    row(
        "T3",
        "monodromy is stable under vertex jitter below 0.2·clearance",
        worst,
        1e-8,
    )
}

fn t4_tolerance_scaling(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
) -> InvariantResult {
    // halving rel_tol must not grow the T1/T2 defects by more than 10x, and
    // the defect at 1e-13 must not exceed the one at 1e-10
    let tols = [1e-10, 5e-11, 2.5e-11, 1e-13];
    let pair = &loops[..2.min(loops.len())];
    let mut defects = Vec::new();
    for tol in tols {
        let cfg = IntegratorConfig::with_rel_tol(tol);
        let mut d = 0.0f64;
        for (_, l) in pair {
            match monodromy(curve, conn, l, &cfg) {
                Ok(r) => d = d.max(r.det_defect),
                Err(e) => return row("T4", format!("integration failed: {e}"), f64::INFINITY, 10.0),
            }
        }
        if let Ok(h) = homomorphism_defect(curve, conn, pair, &cfg) {
            d = d.max(h);
        }
        defects.push(d.max(1e-16));
    }
    let mut worst_ratio = 0.0f64;
    for w in defects.windows(2) {
        worst_ratio = worst_ratio.max(w[1] / w[0]);
    }
    let converged = defects[tols.len() - 1] <= defects[0];
    let detail = format!(
        "defects at rel_tol {:?}: {:?}; convergence {}",
        tols, defects, converged
    );
    let mut result = row("T4", detail, worst_ratio, 10.0);
    result.pass = result.pass && converged;
    result
}

fn variation_invariants(
    curve: &HyperellipticCurve,
    model: &CurveModel,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
    seed: u64,
) -> Vec<InvariantResult> {
    let mut rows = Vec::new();
    let mut rng = SplitMix64::for_trial(seed, 0xD1CE);
    let (_, dir_raw) = random_connection_pair(model, &mut rng);
    let dir = TangentDirection::new(dir_raw.scaled(Complex64::new(0.05, 0.0)));

    // V1: cocycle identity on generator pairs with composites
    let v1 = (|| -> Result<f64, RunError> {
        let mut labelled: Vec<(String, LoopPath)> = loops[..3.min(loops.len())].to_vec();
        let mut pairs = Vec::new();
        let mut composites = Vec::new();
        for k in 0..labelled.len().saturating_sub(1) {
            let label = format!("c{k}");
            let composite = compose(curve, &[labelled[k].1.clone(), labelled[k + 1].1.clone()])?;
            composites.push((label.clone(), composite));
            pairs.push((labelled[k].0.clone(), labelled[k + 1].0.clone(), label));
        }
        labelled.extend(composites);
        let cocycle = cocycle_from_direction(curve, conn, &dir, &labelled, cfg)?;
        check_cocycle(&cocycle, &pairs).map_err(|e| RunError::Numerical(e.to_string()))
    })();
    rows.push(match v1 {
        Ok(d) => row("V1", "cocycle identity on generator pairs", d, 1e-7),
        Err(e) => row("V1", format!("failed: {e}"), f64::INFINITY, 1e-7),
    });

    // V2: complex linearity in the direction
    let v2 = (|| -> Result<f64, RunError> {
        let mut rng2 = SplitMix64::for_trial(seed, 0x11A);
        let (_, d2_raw) = random_connection_pair(model, &mut rng2);
        let dir2 = TangentDirection::new(d2_raw.scaled(Complex64::new(0.05, 0.0)));
        let s1 = Complex64::new(0.6, -0.4);
        let s2 = Complex64::new(-0.3, 0.8);
        let combo = TangentDirection::new(
            ConnectionForm::zero(model)
                .add_scaled(&dir.a_dot, s1)
                .add_scaled(&dir2.a_dot, s2),
        );
        let pair = &loops[..2.min(loops.len())];
        let c1 = cocycle_from_direction(curve, conn, &dir, pair, cfg)?;
        let c2 = cocycle_from_direction(curve, conn, &dir2, pair, cfg)?;
        let cc = cocycle_from_direction(curve, conn, &combo, pair, cfg)?;
        let mut worst = 0.0f64;
        for (label, entry) in &cc.entries {
            let lin = c1.eta(label).unwrap().scale(s1) + c2.eta(label).unwrap().scale(s2);
            worst = worst.max((entry.eta - lin).frobenius());
        }
        Ok(worst)
    })();
    rows.push(match v2 {
        Ok(d) => row("V2", "cocycle is complex-linear in the direction", d, 1e-8),
        Err(e) => row("V2", format!("failed: {e}"), f64::INFINITY, 1e-8),
    });

    // V3: gauge directions solve to their generating matrix
    let v3 = (|| -> Result<f64, RunError> {
        let t0 = Mat2::traceless(
            Complex64::new(0.21, -0.13),
            Complex64::new(-0.32, 0.41),
            Complex64::new(0.15, 0.27),
        );
        let gauge = TangentDirection::new(conn.commutator_with(&t0));
        let cocycle = cocycle_from_direction(curve, conn, &gauge, loops, cfg)?;
        let solve = solve_coboundary(&cocycle);
        Ok(((solve.t - t0).frobenius()).max(solve.residual))
    })();
    rows.push(match v3 {
        Ok(d) => row("V3", "coboundary solve recovers the gauge generator", d, 1e-6),
        Err(e) => row("V3", format!("failed: {e}"), f64::INFINITY, 1e-6),
    });

    // V4: abelian sign law at A = 0. The de Rham map ι, realised with the
    // deck convention matching the transport conventions, sends [Ȧ] to the
    // cocycle γ ↦ −∮_γ Ȧ; the derivative of monodromy must be −ι(χ),
    // i.e. η(γ) = +∮_γ Ȧ.
    let v4 = (|| -> Result<f64, RunError> {
        let zero = ConnectionForm::zero(model);
        let pair = &loops[..2.min(loops.len())];
        let cocycle = cocycle_from_direction(curve, &zero, &dir, pair, cfg)?;
        let mut worst = 0.0f64;
        for (label, l) in pair {
            let iota = -quadrature::connection_periods(curve, &dir.a_dot, l)?;
            let eta = cocycle.eta(label).unwrap();
            worst = worst.max((*eta - (-iota)).frobenius());
        }
        Ok(worst)
    })();
    rows.push(match v4 {
        Ok(d) => row("V4", "abelian sign law: η = −ι([Ȧ]) with ι(χ)(γ) = −∮_γ Ȧ", d, 1e-8),
        Err(e) => row("V4", format!("failed: {e}"), f64::INFINITY, 1e-8),
    });

    rows
}

fn cohomology_invariants(
    curve: &HyperellipticCurve,
    model: &CurveModel,
    conn: &ConnectionForm,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
    seed: u64,
) -> Vec<InvariantResult> {
    let mut rows = Vec::new();

    // C1: solve ∘ coboundary = identity for random irreducible data
    let c1 = {
        let mut worst = 0.0f64;
        let mut rng = SplitMix64::for_trial(seed, 0xC0B);
        for _ in 0..3 {
            let mut r = || Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
            let t = Mat2::traceless(r(), r(), r());
            let one = Complex64::new(1.0, 0.0);
            let m1 = Mat2::new(one, r(), Complex64::ZERO, one)
                * Mat2::new(one, Complex64::ZERO, r(), one);
            let m2 = Mat2::new(one, Complex64::ZERO, r(), one)
                * Mat2::new(one, r(), Complex64::ZERO, one);
            let cob = |m: Mat2| m * t * m.inverse().unwrap() - t;
            let cocycle = crate::cohomology::cocycle_from_matrices(
                Complex64::new(3.0, 0.0),
                1,
                [
                    ("a".to_string(), cob(m1), m1),
                    ("b".to_string(), cob(m2), m2),
                ],
            );
            let solve = solve_coboundary(&cocycle);
            worst = worst.max((solve.t - t).frobenius()).max(solve.residual);
        }
        worst
    };
    rows.push(row("C1", "coboundary solve inverts the coboundary map", c1, 1e-10));

    // C2: same_class is reflexive and symmetric on a variation cocycle
    let mut rng = SplitMix64::for_trial(seed, 0xC2);
    let (_, dir_raw) = random_connection_pair(model, &mut rng);
    let dir = TangentDirection::new(dir_raw.scaled(Complex64::new(0.05, 0.0)));
    let c2 = (|| -> Result<f64, RunError> {
        let pair = &loops[..2.min(loops.len())];
        let cocycle = cocycle_from_direction(curve, conn, &dir, pair, cfg)?;
        let (refl, r_res) = same_class(&cocycle, &cocycle)
            .map_err(|e| RunError::Numerical(e.to_string()))?;
        // shift by a coboundary of a fresh matrix
        let s = Mat2::traceless(
            Complex64::new(0.4, 0.1),
            Complex64::new(-0.2, 0.3),
            Complex64::new(0.1, -0.5),
        );
        let mut shifted = cocycle.clone();
        for entry in shifted.entries.values_mut() {
            let r = entry.rho;
            entry.eta = entry.eta + (r * s * r.inverse().unwrap() - s);
        }
        let (fwd, _) = same_class(&cocycle, &shifted).map_err(|e| RunError::Numerical(e.to_string()))?;
        let (bwd, _) = same_class(&shifted, &cocycle).map_err(|e| RunError::Numerical(e.to_string()))?;
        if refl && fwd && bwd {
            Ok(r_res)
        } else {
            Ok(f64::INFINITY)
        }
    })();
    rows.push(match c2 {
        Ok(d) => row("C2", "same_class is reflexive and symmetric", d, 1e-8),
        Err(e) => row("C2", format!("failed: {e}"), f64::INFINITY, 1e-8),
    });

    // C3: moving the basepoint changes the cocycle by a coboundary only
    let c3 = (|| -> Result<f64, RunError> {
        let base1 = curve.default_base();
        let base2 = base1 + Complex64::new(1.0, 0.0);
        let pair: Vec<(String, LoopPath)> = loops[..2.min(loops.len())].to_vec();
        let cocycle1 = cocycle_from_direction(curve, conn, &dir, &pair, cfg)?;

        // the same free loops, re-based at base2 through a straight connector
        let rebased: Vec<(String, LoopPath)> = pair
            .iter()
            .map(|(label, l)| {
                let mut verts = vec![base2];
                verts.extend_from_slice(l.vertices());
                verts.push(base1);
                LoopPath::from_vertices(curve, verts, 1).map(|lp| (label.clone(), lp))
            })
            .collect::<Result<_, _>>()?;
        let cocycle2 = cocycle_from_direction(curve, conn, &dir, &rebased, cfg)?;

        // frame transfer along the connector: Q = P(c)⁻¹
        let (p_c, _, sheet_at_b1) = transport_chain(curve, conn, &[base2, base1], 1, cfg)?;
        if sheet_at_b1 != 1 {
            return Err(RunError::Numerical(
                "connector changed sheets unexpectedly".into(),
            ));
        }
        let q = p_c
            .inverse()
            .ok_or_else(|| RunError::Numerical("singular connector transport".into()))?;

        // conjugated copy of cocycle1 over the base2 representation
        let conjugated = crate::cohomology::cocycle_from_matrices(
            base2,
            1,
            cocycle1.entries.iter().map(|(label, e)| {
                (
                    label.clone(),
                    q * e.eta * q.inverse().unwrap(),
                    q * e.rho * q.inverse().unwrap(),
                )
            }),
        );

        // the reps must agree before classes are compared
        for (label, e) in &conjugated.entries {
            let r2 = cocycle2.rho(label).unwrap();
            if (e.rho - *r2).frobenius() > 1e-7 * r2.frobenius().max(1.0) {
                return Err(RunError::Numerical(format!(
                    "rebased representation mismatch on {label}"
                )));
            }
        }
        let (same, residual) =
            same_class(&cocycle2, &conjugated).map_err(|e| RunError::Numerical(e.to_string()))?;
        if same {
            Ok(residual)
        } else {
            Ok(f64::INFINITY)
        }
    })();
    rows.push(match c3 {
        Ok(d) => row("C3", "basepoint change preserves the cocycle class", d, 1e-6),
        Err(e) => row("C3", format!("failed: {e}"), f64::INFINITY, 1e-6),
    });

    rows
}

fn span_invariants(seed: u64) -> Vec<InvariantResult> {
    let mut rows = Vec::new();
    let (_, g2) = reference_curve();
    let g3 = {
        let mut p = vec![Complex64::ZERO; 9];
        p[0] = Complex64::new(-1.0, 0.0);
        p[8] = Complex64::new(1.0, 0.0);
        CurveModel::hyperelliptic(&p).unwrap()
    };
    let fermat = CurveModel::PlaneQuartic(crate::curve::PlaneQuartic::fermat());

    // S1: exact and float ranks agree
    let mut mismatches = 0usize;
    for (k, model) in [&g2, &g3, &fermat].into_iter().enumerate() {
        for trial in 0..6u64 {
            let mut rng = SplitMix64::for_trial(seed ^ (k as u64) << 8, trial);
            let conn = random_exact_connection(model, &mut rng, 100);
            let exact =
                injectivity_verdict(model, &conn.clone().into(), RankMode::ExactGaussianRational);
            let float = injectivity_verdict(model, &conn.into(), RankMode::FloatSvd);
            match (exact, float) {
                (Ok(e), Ok(f)) if e.rank_products == f.rank_products => {}
                _ => mismatches += 1,
            }
        }
    }
    rows.push(row("S1", "exact and float ranks agree", mismatches as f64, 0.0));

    // S2: hyperelliptic product rows stay in the first block, rank ≤ 2g−1
    let s2 = {
        let mut bad = 0usize;
        for trial in 0..6u64 {
            let mut rng = SplitMix64::for_trial(seed ^ 0x52, trial);
            let conn = random_exact_connection(&g3, &mut rng, 100);
            let rows_m = product_matrix_exact(&g3, &conn).unwrap();
            for r in &rows_m {
                if !r[5].is_zero() {
                    bad += 1;
                }
            }
            let report =
                injectivity_verdict(&g3, &conn.into(), RankMode::ExactGaussianRational).unwrap();
            if report.rank_products > 5 {
                bad += 1;
            }
        }
        bad
    };
    rows.push(row(
        "S2",
        "hyperelliptic rows lie in the dx²/y² block (rank ≤ 2g−1)",
        s2 as f64,
        0.0,
    ));

    // S3: genus-2 with two independent entries is injective
    let s3 = {
        let mut failures = 0usize;
        for trial in 0..10u64 {
            let mut rng = SplitMix64::for_trial(seed ^ 0x53, trial);
            let conn = random_exact_connection(&g2, &mut rng, 100);
            let pair_rank = crate::linalg::exact_rank(&[
                conn.alpha.coeffs.clone(),
                conn.beta.coeffs.clone(),
                conn.gamma.coeffs.clone(),
            ])
            .0;
            let report = injectivity_verdict(
                &g2,
                &conn.into(),
                RankMode::ExactGaussianRational,
            )
            .unwrap();
            if pair_rank >= 2 && !report.injective {
                failures += 1;
            }
        }
        failures
    };
    rows.push(row(
        "S3",
        "genus-2 samples with independent entries are injective",
        s3 as f64,
        0.0,
    ));

    // S4: rank is invariant under SL₂ conjugation
    let s4 = {
        let mut mismatches = 0usize;
        for (k, model) in [&g2, &fermat].into_iter().enumerate() {
            for trial in 0..5u64 {
                let mut rng = SplitMix64::for_trial(seed ^ 0x54 ^ ((k as u64) << 9), trial);
                let conn = random_exact_connection(model, &mut rng, 60);
                let gmat = random_sl2_exact(&mut rng, 10);
                let [a2, b2, c2] = conjugate_triple(
                    &conn.alpha.coeffs,
                    &conn.beta.coeffs,
                    &conn.gamma.coeffs,
                    &gmat,
                );
                let conj = ExactConnection::new(model, a2, b2, c2).unwrap();
                let r1 = injectivity_verdict(
                    model,
                    &conn.into(),
                    RankMode::ExactGaussianRational,
                )
                .unwrap();
                let r2 = injectivity_verdict(
                    model,
                    &conj.into(),
                    RankMode::ExactGaussianRational,
                )
                .unwrap();
                if r1.rank_products != r2.rank_products {
                    mismatches += 1;
                }
            }
        }
        mismatches
    };
    rows.push(row(
        "S4",
        "rank is invariant under SL₂ conjugation",
        s4 as f64,
        0.0,
    ));

    rows
}

/// `GaussianRational` scan inputs for reporting.
pub fn gaussian_pair_json(g: &GaussianRational) -> Value {
    let (re, im) = g.to_string_pair();
    json!([re, im])
}
