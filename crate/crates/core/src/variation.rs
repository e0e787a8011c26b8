//! Derivative of the Riemann–Hilbert map in connection directions.
//!
//! A tangent direction here is a holomorphic `Ȧ ∈ sl₂(Ω¹)` with the Beltrami
//! component pinned to zero: the complex structure of the curve stays fixed
//! and only the connection moves. The derivative of the monodromy of
//! `d + (A + εȦ)` at ε = 0 comes from the coupled variational system
//!
//! ```text
//! F′ = −A_γ F          F(0) = id
//! Ḟ′ = −A_γ Ḟ − Ȧ_γ F   Ḟ(0) = 0
//! ```
//!
//! integrated along the loop trace, with `ρ = P⁻¹` and
//! `ρ̇ = −P⁻¹ Ṗ P⁻¹` (the analytic derivative of the inverse; no
//! finite-differencing of matrix inverses). The central-difference oracle
//! [`finite_difference_oracle`] provides the independent cross-check.
//!
//! Per loop, `η(γ) = ρ̇(γ)·ρ(γ)⁻¹` assembles the derivative into a group
//! cocycle for `Ad_ρ`; see [`crate::cohomology`] for the class arithmetic.

use crate::curve::HyperellipticCurve;
use crate::linalg::Mat2;
use crate::path::{continue_y, LoopPath};
use crate::transport::{
    branch_factor, integrate_unit, minus_mat_mul, monodromy, ConnectionForm, IntegratorConfig,
    StepStats, TransportError,
};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A connection-direction tangent vector.
///
/// The Beltrami component μ is identically zero in this slice, so a
/// holomorphic `a_dot` is automatically a tamed pair: its (0,1)-part
/// vanishes, as does `μA`.
#[derive(Debug, Clone)]
pub struct TangentDirection {
    pub a_dot: ConnectionForm,
}

impl TangentDirection {
    pub fn new(a_dot: ConnectionForm) -> Self {
        Self { a_dot }
    }

    /// The Beltrami component: fixed at zero by construction.
    pub fn mu(&self) -> f64 {
        0.0
    }
}

/// Monodromy and its directional derivative for one loop.
#[derive(Debug, Clone)]
pub struct DerivativeResult {
    pub rho: Mat2,
    pub rho_dot: Mat2,
    pub err_estimate: f64,
}

/// One loop's worth of cocycle data.
#[derive(Debug, Clone)]
pub struct CocycleEntry {
    pub eta: Mat2,
    pub rho: Mat2,
    pub err_estimate: f64,
}

/// A map from loop labels to sl₂ values `η(γ)` over the representation ρ.
///
/// Raw cocycle values depend on the basepoint (they change by a coboundary
/// when it moves), so the basepoint and sheet ride along for reporting.
#[derive(Debug, Clone)]
pub struct Cocycle {
    pub base_point: Complex64,
    pub start_sheet: i8,
    pub entries: BTreeMap<String, CocycleEntry>,
    /// Set when the underlying representation failed the irreducibility test.
    pub reducible_warning: bool,
}

impl Cocycle {
    pub fn eta(&self, label: &str) -> Option<&Mat2> {
        self.entries.get(label).map(|e| &e.eta)
    }

    pub fn rho(&self, label: &str) -> Option<&Mat2> {
        self.entries.get(label).map(|e| &e.rho)
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Square root of the summed squared Frobenius norms of the values.
    pub fn norm(&self) -> f64 {
        self.entries
            .values()
            .map(|e| e.eta.frobenius().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest trace magnitude over the values; sl₂-ness defect.
    pub fn trace_defect(&self) -> f64 {
        self.entries
            .values()
            .map(|e| e.eta.trace().norm())
            .fold(0.0, f64::max)
    }
}

/// Integrates the coupled variational system along the loop and returns
/// `(ρ, ρ̇)` for the family `d + (A + εȦ)` at ε = 0.
pub fn derivative_monodromy(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    dir: &TangentDirection,
    l: &LoopPath,
    cfg: &IntegratorConfig,
) -> Result<DerivativeResult, TransportError> {
    cfg.validate()?;
    let trace = continue_y(curve, l, f64::INFINITY)?;
    let factor = branch_factor(curve);
    let mut stats = StepStats::default();

    // state layout: [F | Ḟ], each row-major 2×2
    let mut state = [Complex64::ZERO; 8];
    state[0] = Complex64::new(1.0, 0.0);
    state[3] = Complex64::new(1.0, 0.0);

    for (k, &(a, b)) in trace.segments().iter().enumerate() {
        let delta = b - a;
        let len = delta.norm();
        let rhs = |t: f64, s: &[Complex64; 8]| {
            let x = a + delta * t;
            let y = trace.y_at(curve, k, t);
            let v = conn.eval_pulled(x, y, delta);
            let w = dir.a_dot.eval_pulled(x, y, delta);
            let f: [Complex64; 4] = [s[0], s[1], s[2], s[3]];
            let g: [Complex64; 4] = [s[4], s[5], s[6], s[7]];
            let df = minus_mat_mul(&v, &f);
            let dg1 = minus_mat_mul(&v, &g);
            let dg2 = minus_mat_mul(&w, &f);
            [
                df[0],
                df[1],
                df[2],
                df[3],
                dg1[0] + dg2[0],
                dg1[1] + dg2[1],
                dg1[2] + dg2[2],
                dg1[3] + dg2[3],
            ]
        };
        let h_cap = |t: f64| {
            let x = a + delta * t;
            factor * curve.nearest_branch_dist(x) / len
        };
        state = integrate_unit(&rhs, state, cfg, &h_cap, &mut stats)?;
    }

    let p = Mat2::new(state[0], state[1], state[2], state[3]);
    let p_dot = Mat2::new(state[4], state[5], state[6], state[7]);
    let p_inv = p.inverse().ok_or_else(|| {
        TransportError::InvalidConfig("transport operator is numerically singular".into())
    })?;
    let rho = p_inv;
    let rho_dot = -(p_inv * p_dot * p_inv);
    Ok(DerivativeResult {
        rho,
        rho_dot,
        err_estimate: stats.err_sum,
    })
}

/// Assembles `η(γ) = ρ̇(γ)·ρ(γ)⁻¹` over a labelled family of loops sharing
/// a basepoint and sheet.
pub fn cocycle_from_direction(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    dir: &TangentDirection,
    loops: &[(String, LoopPath)],
    cfg: &IntegratorConfig,
) -> Result<Cocycle, TransportError> {
    let first = loops
        .first()
        .ok_or_else(|| TransportError::InvalidConfig("no loops supplied".into()))?;
    let base_point = first.1.base_point();
    let start_sheet = first.1.start_sheet();

    let mut entries = BTreeMap::new();
    let mut rhos = Vec::new();
    for (label, l) in loops {
        if (l.base_point() - base_point).norm() > 1e-12 * base_point.norm().max(1.0)
            || l.start_sheet() != start_sheet
        {
            return Err(TransportError::Path(
                crate::path::PathError::BasepointMismatch,
            ));
        }
        let d = derivative_monodromy(curve, conn, dir, l, cfg)?;
        let rho_inv = d.rho.inverse().ok_or_else(|| {
            TransportError::InvalidConfig("monodromy is numerically singular".into())
        })?;
        let eta = d.rho_dot * rho_inv;
        rhos.push(d.rho);
        entries.insert(
            label.clone(),
            CocycleEntry {
                eta,
                rho: d.rho,
                err_estimate: d.err_estimate,
            },
        );
    }

    Ok(Cocycle {
        base_point,
        start_sheet,
        entries,
        reducible_warning: !crate::transport::irreducible(&rhos),
    })
}

/// Central difference `(ρ(A+εȦ) − ρ(A−εȦ)) / 2ε`, the independent oracle
/// for [`derivative_monodromy`]. `eps` must lie in `[1e−6, 1e−2]`.
pub fn finite_difference_oracle(
    curve: &HyperellipticCurve,
    conn: &ConnectionForm,
    dir: &TangentDirection,
    l: &LoopPath,
    eps: f64,
    cfg: &IntegratorConfig,
) -> Result<Mat2, TransportError> {
    if !(1e-6..=1e-2).contains(&eps) {
        return Err(TransportError::InvalidConfig(format!(
            "finite-difference eps {eps} outside [1e-6, 1e-2]"
        )));
    }
    let e = Complex64::new(eps, 0.0);
    let plus = monodromy(curve, &conn.add_scaled(&dir.a_dot, e), l, cfg)?;
    let minus = monodromy(curve, &conn.add_scaled(&dir.a_dot, -e), l, cfg)?;
    Ok((plus.matrix - minus.matrix).scale(Complex64::new(1.0 / (2.0 * eps), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_hyperelliptic, CurveModel};
    use crate::path::pair_loop;
    use crate::quadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sextic() -> (HyperellipticCurve, CurveModel) {
        let mut p = vec![Complex64::ZERO; 7];
        p[0] = c(-1.0, 0.0);
        p[6] = c(1.0, 0.0);
        let h = make_hyperelliptic(&p).unwrap();
        (h.clone(), CurveModel::Hyperelliptic(h))
    }

    fn test_connection(m: &CurveModel) -> ConnectionForm {
        ConnectionForm::new(
            m,
            vec![c(0.2, 0.3), c(0.1, -0.1)],
            vec![c(0.5, 0.0), c(0.0, 0.25)],
            vec![c(-0.3, 0.2), c(0.15, 0.0)],
        )
        .unwrap()
    }

    fn test_direction(m: &CurveModel) -> TangentDirection {
        TangentDirection::new(
            ConnectionForm::new(
                m,
                vec![c(-0.1, 0.2), c(0.3, 0.05)],
                vec![c(0.0, -0.2), c(0.4, 0.1)],
                vec![c(0.25, 0.0), c(-0.05, -0.3)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn zero_direction_gives_zero_derivative() {
        let (h, m) = sextic();
        let conn = test_connection(&m);
        let dir = TangentDirection::new(ConnectionForm::zero(&m));
        let l = pair_loop(&h, 0, 1, h.default_base(), 1).unwrap();
        let d = derivative_monodromy(&h, &conn, &dir, &l, &IntegratorConfig::default()).unwrap();
        assert!(d.rho_dot.frobenius() <= 1e-12);
    }

    #[test]
    fn flat_background_derivative_is_the_period_matrix() {
        // at A = 0 the monodromy family is ρ(ε) = (I − ε∮Ȧ + O(ε²))⁻¹, so
        // ρ̇ equals the entrywise periods of Ȧ; both the quadrature oracle
        // and the finite-difference oracle must agree with the variational
        // integration.
        let (h, m) = sextic();
        let conn = ConnectionForm::zero(&m);
        let dir = test_direction(&m);
        let cfg = IntegratorConfig::default();
        for (i, j) in [(0usize, 1usize), (3, 5)] {
            let l = pair_loop(&h, i, j, h.default_base(), 1).unwrap();
            let d = derivative_monodromy(&h, &conn, &dir, &l, &cfg).unwrap();
            assert!((d.rho - Mat2::identity()).frobenius() <= 1e-10);

            let periods = quadrature::connection_periods(&h, &dir.a_dot, &l).unwrap();
            let scale = periods.frobenius().max(1.0);
            assert!(
                (d.rho_dot - periods).frobenius() <= 1e-9 * scale,
                "variational derivative should equal +periods, defect {:.3e}",
                (d.rho_dot - periods).frobenius()
            );

            let fd = finite_difference_oracle(&h, &conn, &dir, &l, 1e-4, &cfg).unwrap();
            assert!((d.rho_dot - fd).frobenius() <= 1e-6 * scale);
        }
    }

    #[test]
    fn diagonal_family_closed_form() {
        // A = diag(ω, −ω), Ȧ = diag(ψ, −ψ):
        // ρ(ε) = diag(e^{Π+εQ}, e^{−Π−εQ}), so ρ̇ = diag(Q·e^Π, −Q·e^{−Π}).
        let (h, m) = sextic();
        let zero2 = vec![Complex64::ZERO; 2];
        let conn = ConnectionForm::new(
            &m,
            vec![c(0.4, 0.1), c(-0.2, 0.3)],
            zero2.clone(),
            zero2.clone(),
        )
        .unwrap();
        let dir = TangentDirection::new(
            ConnectionForm::new(&m, vec![c(-0.3, 0.2), c(0.1, 0.1)], zero2.clone(), zero2).unwrap(),
        );
        let l = pair_loop(&h, 1, 4, h.default_base(), 1).unwrap();
        let cfg = IntegratorConfig::default();

        let big_pi = quadrature::loop_period(&h, &conn.alpha, &l).unwrap();
        let q = quadrature::loop_period(&h, &dir.a_dot.alpha, &l).unwrap();
        let expect = Mat2::diag(q * big_pi.exp(), -q * (-big_pi).exp());

        let d = derivative_monodromy(&h, &conn, &dir, &l, &cfg).unwrap();
        let scale = expect.frobenius().max(1.0);
        assert!(
            (d.rho_dot - expect).frobenius() <= 1e-9 * scale,
            "defect {:.3e}",
            (d.rho_dot - expect).frobenius()
        );
    }

    #[test]
    fn gauge_direction_gives_a_coboundary() {
        // Ȧ = [A, T] is tangent to the conjugation orbit, so
        // η(γ) = ρ(γ) T ρ(γ)⁻¹ − T.
        let (h, m) = sextic();
        let conn = test_connection(&m);
        let t = Mat2::traceless(c(0.3, -0.1), c(-0.2, 0.4), c(0.5, 0.2));
        let dir = TangentDirection::new(conn.commutator_with(&t));
        let cfg = IntegratorConfig::default();
        let base = h.default_base();
        for (i, j) in [(0usize, 1usize), (2, 3)] {
            let l = pair_loop(&h, i, j, base, 1).unwrap();
            let d = derivative_monodromy(&h, &conn, &dir, &l, &cfg).unwrap();
            let eta = d.rho_dot * d.rho.inverse().unwrap();
            let expect = d.rho * t * d.rho.inverse().unwrap() - t;
            assert!(
                (eta - expect).frobenius() <= 1e-7,
                "pair ({i},{j}): defect {:.3e}",
                (eta - expect).frobenius()
            );
        }
    }

    #[test]
    fn finite_difference_zero_direction_is_noise_level() {
        let (h, m) = sextic();
        let conn = test_connection(&m);
        let dir = TangentDirection::new(ConnectionForm::zero(&m));
        let l = pair_loop(&h, 0, 2, h.default_base(), 1).unwrap();
        let cfg = IntegratorConfig::default();
        let eps = 1e-4;
        let fd = finite_difference_oracle(&h, &conn, &dir, &l, eps, &cfg).unwrap();
        let mono = monodromy(&h, &conn, &l, &cfg).unwrap();
        assert!(fd.frobenius() <= 2.0 * mono.err_estimate.max(1e-14) / (2.0 * eps) + 1e-10);
    }

    #[test]
    fn eps_outside_range_rejected() {
        let (h, m) = sextic();
        let conn = test_connection(&m);
        let dir = test_direction(&m);
        let l = pair_loop(&h, 0, 1, h.default_base(), 1).unwrap();
        let cfg = IntegratorConfig::default();
        assert!(finite_difference_oracle(&h, &conn, &dir, &l, 1e-7, &cfg).is_err());
        assert!(finite_difference_oracle(&h, &conn, &dir, &l, 0.1, &cfg).is_err());
    }

    #[test]
    fn cocycle_values_are_traceless_and_linear() {
        let (h, m) = sextic();
        let conn = test_connection(&m);
        let dir1 = test_direction(&m);
        let dir2 = TangentDirection::new(conn.commutator_with(&Mat2::traceless(
            c(0.1, 0.0),
            c(0.0, 0.3),
            c(-0.2, 0.1),
        )));
        let base = h.default_base();
        let loops: Vec<(String, LoopPath)> = [(0usize, 1usize), (1, 2), (3, 4)]
            .iter()
            .map(|&(i, j)| (format!("g{i}{j}"), pair_loop(&h, i, j, base, 1).unwrap()))
            .collect();
        let cfg = IntegratorConfig::with_rel_tol(1e-11);

        let c1 = cocycle_from_direction(&h, &conn, &dir1, &loops, &cfg).unwrap();
        let c2 = cocycle_from_direction(&h, &conn, &dir2, &loops, &cfg).unwrap();
        assert!(c1.trace_defect() <= 1e-10);

        // complex linear combination of directions
        let s1 = c(0.7, -0.3);
        let s2 = c(-0.2, 0.9);
        let combo = TangentDirection::new(
            ConnectionForm::zero(&m)
                .add_scaled(&dir1.a_dot, s1)
                .add_scaled(&dir2.a_dot, s2),
        );
        let cc = cocycle_from_direction(&h, &conn, &combo, &loops, &cfg).unwrap();
        for (label, entry) in &cc.entries {
            let lin = c1.eta(label).unwrap().scale(s1) + c2.eta(label).unwrap().scale(s2);
            assert!(
                (entry.eta - lin).frobenius() <= 1e-8,
                "{label}: {:.3e}",
                (entry.eta - lin).frobenius()
            );
        }
    }
}
