//! Parallel transport of the trivialisation equation `dF + AF = 0` along
//! loops, and the monodromy matrices it induces.
//!
//! The connection `A = [[α, β], [γ, −α]]` is a traceless matrix of
//! holomorphic 1-forms. Along a polyline segment `x(t) = a + tΔ` the
//! equation pulls back to the linear system `F′(t) = −A(x(t), y(t))·Δ·F(t)`
//! with `y` supplied by sign-coherent continuation. Integration uses the
//! Dormand–Prince embedded 5(4) pair with PI step-size control; steps are
//! additionally capped by the distance to the nearest branch point so that
//! stage evaluations stay on the tracked sheet.
//!
//! Conventions, fixed once and verified by tests rather than assumed:
//! the monodromy of a loop is `P⁻¹`, where `P` is the forward solution
//! operator `F(1) = P·F(0)`. With composition `γ₁·γ₂` meaning "traverse
//! γ₁ first", this makes `monodromy` a homomorphism:
//! `ρ(γ₁γ₂) = ρ(γ₁)ρ(γ₂)`.

use crate::curve::{AbelianDifferential, CurveError, CurveModel, HyperellipticCurve};
use crate::linalg::{rank_svd, Mat2};
use crate::path::{continue_y, ContinuationTrace, LoopPath, PathError};
use crate::poly;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TransportError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("integration step underflow")]
    StepUnderflow,
    #[error("integration exceeded {0} steps")]
    MaxStepsExceeded(usize),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(TransportError::InvalidConfig(format!(
                "rel_tol {} outside (0, 1e-3)",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(TransportError::InvalidConfig(
                "abs_tol must be positive".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(TransportError::InvalidConfig(
                "max_steps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The connection matrix `A = [[α, β], [γ, −α]]` as three coefficient
/// vectors in the 1-form basis of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForm {
    pub alpha: AbelianDifferential,
    pub beta: AbelianDifferential,
    pub gamma: AbelianDifferential,
}

impl ConnectionForm {
    pub fn new(
        curve: &CurveModel,
        alpha: Vec<Complex64>,
        beta: Vec<Complex64>,
        gamma: Vec<Complex64>,
    ) -> Result<Self, CurveError> {
        Ok(Self {
            alpha: curve.differential(alpha)?,
            beta: curve.differential(beta)?,
            gamma: curve.differential(gamma)?,
        })
    }

    pub fn zero(curve: &CurveModel) -> Self {
        let z = vec![Complex64::ZERO; curve.omega_len()];
        Self {
            alpha: AbelianDifferential { coeffs: z.clone() },
            beta: AbelianDifferential { coeffs: z.clone() },
            gamma: AbelianDifferential { coeffs: z },
        }
    }

    /// Entrywise `A + s·B`.
    pub fn add_scaled(&self, other: &ConnectionForm, s: Complex64) -> ConnectionForm {
        let comb = |a: &AbelianDifferential, b: &AbelianDifferential| AbelianDifferential {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + s * y)
                .collect(),
        };
        ConnectionForm {
            alpha: comb(&self.alpha, &other.alpha),
            beta: comb(&self.beta, &other.beta),
            gamma: comb(&self.gamma, &other.gamma),
        }
    }

    pub fn scaled(&self, s: Complex64) -> ConnectionForm {
        let scale = |a: &AbelianDifferential| AbelianDifferential {
            coeffs: a.coeffs.iter().map(|x| x * s).collect(),
        };
        ConnectionForm {
            alpha: scale(&self.alpha),
            beta: scale(&self.beta),
            gamma: scale(&self.gamma),
        }
    }

    /// The commutator `[A, T]` with a constant matrix `T`, again a traceless
    /// matrix of holomorphic forms.
    pub fn commutator_with(&self, t: &Mat2) -> ConnectionForm {
        let [t00, t01, t10, t11] = t.entries();
        let lin = |ca: Complex64, cb: Complex64, cg: Complex64| AbelianDifferential {
            coeffs: self
                .alpha
                .coeffs
                .iter()
                .zip(&self.beta.coeffs)
                .zip(&self.gamma.coeffs)
                .map(|((a, b), g)| ca * a + cb * b + cg * g)
                .collect(),
        };
        ConnectionForm {
            // [A,T]₀₀ = t₁₀·β − t₀₁·γ
            alpha: lin(Complex64::ZERO, t10, -t01),
            // [A,T]₀₁ = 2t₀₁·α + (t₁₁−t₀₀)·β
            beta: lin(2.0 * t01, t11 - t00, Complex64::ZERO),
            // [A,T]₁₀ = −2t₁₀·α + (t₀₀−t₁₁)·γ
            gamma: lin(-2.0 * t10, Complex64::ZERO, t00 - t11),
        }
    }

    /// Evaluates the pulled-back matrix `A(x, y)·Δ` at a trace point.
    pub fn eval_pulled(&self, x: Complex64, y: Complex64, delta: Complex64) -> Mat2 {
        let f = delta / y;
        let a = poly::eval(&self.alpha.coeffs, x) * f;
        let b = poly::eval(&self.beta.coeffs, x) * f;
        let c = poly::eval(&self.gamma.coeffs, x) * f;
        Mat2::new(a, b, c, -a)
    }
}

/// Outcome of a monodromy computation, with everything a report needs to
/// reproduce it.
#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub matrix: Mat2,
    pub loop_path: LoopPath,
    pub err_estimate: f64,
    pub det_defect: f64,
    pub cfg: IntegratorConfig,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub steps: usize,
    pub rejected: usize,
    pub err_sum: f64,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// b⁵ − b⁴: the embedded error weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FACC1: f64 = 5.0;
const FACC2: f64 = 0.1;

fn axpy<const N: usize>(
    y: &[Complex64; N],
    h: f64,
    terms: &[(f64, &[Complex64; N])],
) -> [Complex64; N] {
    let mut out = *y;
    for (w, k) in terms {
        let hw = h * w;
        for i in 0..N {
            out[i] += k[i] * hw;
        }
    }
    out
}

/// One adaptive DOPRI5 integration over `t ∈ [0, 1]`.
///
/// `h_cap` bounds the step length at a given `t` (the branch-distance cap);
/// the PI controller handles accuracy.
pub(crate) fn integrate_unit<const N: usize>(
    rhs: &dyn Fn(f64, &[Complex64; N]) -> [Complex64; N],
    y0: [Complex64; N],
    cfg: &IntegratorConfig,
    h_cap: &dyn Fn(f64) -> f64,
    stats: &mut StepStats,
) -> Result<[Complex64; N], TransportError> {
    let mut t = 0.0f64;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut facold = 1e-4f64;
    let mut h = h_cap(0.0).min(0.1);
    let mut last_rejected = false;

    while 1.0 - t > f64::EPSILON {
        stats.steps += 1;
        if stats.steps > cfg.max_steps {
            return Err(TransportError::MaxStepsExceeded(cfg.max_steps));
        }
        h = h.min(1.0 - t).min(h_cap(t));
        if h < 1e-12 {
            return Err(TransportError::StepUnderflow);
        }

        let k2 = rhs(t + C[1] * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C[2] * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C[3] * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C[4] * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + C[5] * h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[
                (B[0], &k1),
                (B[2], &k3),
                (B[3], &k4),
                (B[4], &k5),
                (B[5], &k6),
            ],
        );
        let k7 = rhs(t + h, &y_new);

        let mut err_sq = 0.0f64;
        let mut err_abs = 0.0f64;
        for i in 0..N {
            let e = h * (E[0] * k1[i]
                + E[2] * k3[i]
                + E[3] * k4[i]
                + E[4] * k5[i]
                + E[5] * k6[i]
                + E[6] * k7[i]);
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
            err_abs = err_abs.max(e.norm());
        }
        let err = (err_sq / N as f64).sqrt();

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            stats.err_sum += err_abs;
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FACC2, FACC1);
            facold = err.max(1e-4);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFE).min(FACC1);
            last_rejected = true;
        }
    }
    Ok(y)
}

fn state_to_mat(s: &[Complex64; 4]) -> Mat2 {
    Mat2::new(s[0], s[1], s[2], s[3])
}

/// `−V·F` for the 4-entry state layout `[f00, f01, f10, f11]`.
pub(crate) fn minus_mat_mul(v: &Mat2, f: &[Complex64; 4]) -> [Complex64; 4] {
    let a = &v.0;
    [
        -(a[0][0] * f[0] + a[0][1] * f[2]),
        -(a[0][0] * f[1] + a[0][1] * f[3]),
        -(a[1][0] * f[0] + a[1][1] * f[2]),
        -(a[1][0] * f[1] + a[1][1] * f[3]),
    ]
}

pub(crate) fn branch_factor(curve: &HyperellipticCurve) -> f64 {
    (0.4f64).min(1.0 / curve.degree() as f64)
}

/// Integrates `F′ = −A_γ F` along the whole loop and returns the forward
/// solution operator `P` with the accumulated error estimate.
pub fn transport_frame(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    l: &LoopPath,
    cfg: &IntegratorConfig,
) -> Result<(Mat2, f64), TransportError> {
    cfg.validate()?;
    let trace = continue_y(curve, l, f64::INFINITY)?;
    let (p, stats) = transport_on_trace(curve, conn, &trace, cfg)?;
    Ok((p, stats.err_sum))
}

pub(crate) fn transport_on_trace(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    trace: &ContinuationTrace,
    cfg: &IntegratorConfig,
) -> Result<(Mat2, StepStats), TransportError> {
    let factor = branch_factor(curve);
    let mut stats = StepStats::default();
    let mut state = Mat2::identity().entries();

    for (k, &(a, b)) in trace.segments().iter().enumerate() {
        let delta = b - a;
        let len = delta.norm();
        let rhs = |t: f64, f: &[Complex64; 4]| {
            let x = a + delta * t;
            let y = trace.y_at(curve, k, t);
            let v = conn.eval_pulled(x, y, delta);
            minus_mat_mul(&v, f)
        };
        let h_cap = |t: f64| {
            let x = a + delta * t;
            factor * curve.nearest_branch_dist(x) / len
        };
        state = integrate_unit(&rhs, state, cfg, &h_cap, &mut stats)?;
    }
    Ok((state_to_mat(&state), stats))
}

/// Forward solution operator along an open polyline chain, for transferring
/// frames between basepoints. The final `y`-sheet reached at the endpoint is
/// returned alongside.
pub fn transport_chain(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    vertices: &[Complex64],
    start_sheet: i8,
    cfg: &IntegratorConfig,
) -> Result<(Mat2, f64, i8), TransportError> {
    cfg.validate()?;
    let trace = crate::path::continue_y_chain(curve, vertices, start_sheet, f64::INFINITY)?;
    let (p, stats) = transport_on_trace(curve, conn, &trace, cfg)?;
    let end = trace
        .samples()
        .last()
        .map(|(x, y)| {
            let principal = curve.principal_y(*x);
            if (y - principal).norm() <= (y + principal).norm() {
                1
            } else {
                -1
            }
        })
        .unwrap_or(start_sheet);
    Ok((p, stats.err_sum, end))
}

/// Monodromy of the loop: `P⁻¹` together with its error estimate and
/// unimodularity defect.
pub fn monodromy(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    l: &LoopPath,
    cfg: &IntegratorConfig,
) -> Result<MonodromyResult, TransportError> {
    let (p, err) = transport_frame(curve, conn, l, cfg)?;
    let matrix = p.inverse().ok_or_else(|| {
        TransportError::InvalidConfig("transport operator is numerically singular".into())
    })?;
    let det_defect = (matrix.det() - Complex64::new(1.0, 0.0)).norm();
    Ok(MonodromyResult {
        matrix,
        loop_path: l.clone(),
        err_estimate: err,
        det_defect,
        cfg: *cfg,
    })
}

/// Monodromy over a batch of loops, deterministic per loop.
pub fn monodromy_batch(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    loops: &[LoopPath],
    cfg: &IntegratorConfig,
) -> Result<Vec<MonodromyResult>, TransportError> {
    loops
        .iter()
        .map(|l| monodromy(curve, conn, l, cfg))
        .collect()
}

/// Burnside-style irreducibility test: the representation generated by the
/// given matrices is irreducible iff words of length ≤ 3 (with the identity)
/// span all of the 2×2 matrices. Rank is decided by singular values with a
/// relative threshold of 1e−8.
pub fn irreducible(mats: &[Mat2]) -> bool {
    let mut words: Vec<Mat2> = vec![Mat2::identity()];
    words.extend_from_slice(mats);
    let mut len2 = Vec::new();
    for a in mats {
        for b in mats {
            len2.push(*a * *b);
        }
    }
    let mut len3 = Vec::new();
    for a in mats {
        for w in &len2 {
            len3.push(*a * *w);
        }
    }
    words.extend(len2);
    words.extend(len3);

    let rows: Vec<Vec<Complex64>> = words.iter().map(|m| m.entries().to_vec()).collect();
    let (rank, _) = rank_svd(&rows, 1e-8);
    rank == 4
}
