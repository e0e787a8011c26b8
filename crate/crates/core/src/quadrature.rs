//! Adaptive-quadrature period oracle.
//!
//! Integrates 1-forms along loop traces with recursive Simpson subdivision.
//! Deliberately independent of the Runge–Kutta transport path: the two only
//! share the trace (the geometry and the sheet), so agreement between the
//! closed-form transport matrices and these periods is a genuine
//! cross-check.

use crate::curve::{AbelianDifferential, HyperellipticCurve};
use crate::linalg::Mat2;
use crate::path::{continue_y, ContinuationTrace, LoopPath, PathError};
use crate::poly;
use crate::transport::ConnectionForm;
use num_complex::Complex64;

/// `∮ ω` along the trace, by adaptive Simpson on each segment.
pub fn period_on_trace(
    curve: &HyperellipticCurve,
    omega: &AbelianDifferential,
    trace: &ContinuationTrace,
) -> Complex64 {
    let mut total = Complex64::ZERO;
    for (k, &(a, b)) in trace.segments().iter().enumerate() {
        let delta = b - a;
        let f = |s: f64| {
            let x = a + delta * s;
            let y = trace.y_at(curve, k, s);
            poly::eval(&omega.coeffs, x) * delta / y
        };
        total += adaptive_simpson(&f, 0.0, 1.0);
    }
    total
}

/// `∮_γ ω` for a loop, building the trace internally.
pub fn loop_period(
    curve: &HyperellipticCurve,
    omega: &AbelianDifferential,
    l: &LoopPath,
) -> Result<Complex64, PathError> {
    let trace = continue_y(curve, l, f64::INFINITY)?;
    Ok(period_on_trace(curve, omega, &trace))
}

/// Entrywise periods of a connection matrix: `[[∮α, ∮β], [∮γ, −∮α]]`.
pub fn connection_periods(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    l: &LoopPath,
) -> Result<Mat2, PathError> {
    let trace = continue_y(curve, l, f64::INFINITY)?;
    let a = period_on_trace(curve, &conn.alpha, &trace);
    let b = period_on_trace(curve, &conn.beta, &trace);
    let g = period_on_trace(curve, &conn.gamma, &trace);
    Ok(Mat2::new(a, b, g, -a))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let tol = 1e-13 * (1.0 + whole.norm());
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        // Richardson tail correction
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
}
