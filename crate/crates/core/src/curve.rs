//! Concrete curve models with closed-form differential bases.
//!
//! A hyperelliptic curve is stored as `y² = p(x)` with `deg p ∈ {2g+1, 2g+2}`
//! and all roots simple; the branch points are exactly the roots of `p`.
//! Plane quartics (genus 3, non-hyperelliptic) are supported for the span
//! computations only — no sheet tracking on a 4:1 cover.
//!
//! Bases:
//! * Abelian differentials: `x^i dx/y` for `i < g` (hyperelliptic);
//!   `{1, x, y}·dx/Q_y` (quartic).
//! * Quadratic differentials: `x^j dx²/y²` for `j ≤ 2g−2` together with
//!   `x^j dx²/y` for `j ≤ g−3` (hyperelliptic, 3g−3 in total);
//!   `{1, x, y, x², xy, y²}·(dx/Q_y)²` (quartic).
//!
//! Products of two basis 1-forms on a hyperelliptic curve expand exactly in
//! the first family by polynomial convolution, which is what the rank
//! criterion in [`crate::span`] exploits.

use crate::exact::GaussianRational;
use crate::poly;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("polynomial degree {0} unsupported: need 2g+1 or 2g+2 with g >= 1")]
    BadDegree(usize),
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("p(x) is not squarefree at working precision: roots {0:?} and {1:?} collide")]
    DegenerateCurve(Complex64, Complex64),
    #[error("eigenvalue iteration for the companion matrix did not converge")]
    RootsDidNotConverge,
    #[error("genus {0} too small: need g >= 2")]
    GenusTooSmall(usize),
    #[error("quartic polynomial must have total degree exactly 4")]
    NotAQuartic,
    #[error("differential has {got} coefficients, curve expects {expected}")]
    DifferentialLength { expected: usize, got: usize },
}

/// Hyperelliptic model `y² = p(x)`.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    coeffs: Vec<Complex64>,
    genus: usize,
    branch_points: Vec<Complex64>,
    min_branch_gap: f64,
}

/// Plane quartic `Q(x, y) = 0`, stored as a sparse coefficient table.
#[derive(Debug, Clone)]
pub struct PlaneQuartic {
    terms: BTreeMap<(u8, u8), Complex64>,
}

#[derive(Debug, Clone)]
pub enum CurveModel {
    Hyperelliptic(HyperellipticCurve),
    PlaneQuartic(PlaneQuartic),
}

/// Coefficient vector of a holomorphic 1-form in the fixed basis:
/// `(c₀ + c₁x + … + c_{g−1}x^{g−1}) dx/y` on a hyperelliptic curve,
/// `(c₀ + c₁x + c₂y) dx/Q_y` on a quartic.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianDifferential {
    pub coeffs: Vec<Complex64>,
}

/// Same shape with exact Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDifferential {
    pub coeffs: Vec<GaussianRational>,
}

impl ExactDifferential {
    pub fn to_float(&self) -> AbelianDifferential {
        AbelianDifferential {
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
        }
    }
}

/// Coordinates in the fixed quadratic-differential basis (length 3g−3).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadDifferential {
    pub coeffs: Vec<Complex64>,
}

/// One element of the quadratic-differential basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdDescriptor {
    /// `x^j dx²/y²`
    OverYSquared { j: usize },
    /// `x^j dx²/y`
    OverY { j: usize },
    /// `x^i y^j (dx/Q_y)²`
    QuarticMonomial { i: usize, j: usize },
}

impl std::fmt::Display for QdDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QdDescriptor::OverYSquared { j } => write!(f, "x^{j} dx^2/y^2"),
            QdDescriptor::OverY { j } => write!(f, "x^{j} dx^2/y"),
            QdDescriptor::QuarticMonomial { i, j } => write!(f, "x^{i} y^{j} (dx/Q_y)^2"),
        }
    }
}

/// Builds the hyperelliptic model from the coefficients of `p` (ascending).
///
/// Roots come from the eigenvalues of the companion matrix, polished by a
/// few Newton steps; the curve is rejected as degenerate when two roots are
/// closer than `1e−8 · max(1, max |root|)`.
pub fn make_hyperelliptic(p_coeffs: &[Complex64]) -> Result<HyperellipticCurve, CurveError> {
    let deg = poly::degree(p_coeffs).ok_or(CurveError::BadDegree(0))?;
    if deg < 3 {
        return Err(CurveError::BadDegree(deg));
    }
    let coeffs = p_coeffs[..=deg].to_vec();
    if coeffs[deg].norm() == 0.0 {
        return Err(CurveError::ZeroLeadingCoefficient);
    }
    let genus = deg.div_ceil(2) - 1;

    let mut roots = companion_roots(&coeffs)?;
    for r in roots.iter_mut() {
        *r = newton_polish(&coeffs, *r);
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("NaN root")
    });

    let scale = roots.iter().map(|r| r.norm()).fold(1.0f64, f64::max);
    let mut min_gap = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let d = (roots[i] - roots[j]).norm();
            if d < 1e-8 * scale {
                return Err(CurveError::DegenerateCurve(roots[i], roots[j]));
            }
            min_gap = min_gap.min(d);
        }
    }

    Ok(HyperellipticCurve {
        coeffs,
        genus,
        branch_points: roots,
        min_branch_gap: min_gap,
    })
}

fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, CurveError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = DMatrix::from_element(deg, deg, Complex64::ZERO);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }

    // The QR iteration can stall when many eigenvalues share a modulus
    // (e.g. roots of unity), so retry under deterministic spectral shifts;
    // Newton polishing against the original polynomial restores accuracy.
    let scale = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0f64, f64::max);
    let shifts = [
        Complex64::ZERO,
        Complex64::new(0.5319, 0.3371) * scale,
        Complex64::new(-0.2718, 0.8142) * scale,
        Complex64::new(0.9151, -0.4423) * scale,
    ];
    for shift in shifts {
        let mut shifted = m.clone();
        for i in 0..deg {
            shifted[(i, i)] -= shift;
        }
        if let Some(schur) = shifted.try_schur(1e-13, 50 * (deg + 4)) {
            if let Some(ev) = schur.eigenvalues() {
                return Ok(ev.iter().map(|l| l + shift).collect());
            }
        }
    }
    Err(CurveError::RootsDidNotConverge)
}

fn newton_polish(coeffs: &[Complex64], mut x: Complex64) -> Complex64 {
    let dp = poly::derivative(coeffs);
    for _ in 0..32 {
        let f = poly::eval(coeffs, x);
        let d = poly::eval(&dp, x);
        if d.norm() == 0.0 {
            break;
        }
        let step = f / d;
        x -= step;
        if step.norm() <= 1e-15 * x.norm().max(1.0) {
            break;
        }
    }
    x
}

impl PlaneQuartic {
    /// Builds from a list of `(i, j, coefficient)` terms of `Q(x, y)`.
    pub fn new(terms: impl IntoIterator<Item = (u8, u8, Complex64)>) -> Result<Self, CurveError> {
        let mut map = BTreeMap::new();
        let mut total_deg = 0;
        for (i, j, c) in terms {
            if c.norm() == 0.0 {
                continue;
            }
            if i + j > 4 {
                return Err(CurveError::NotAQuartic);
            }
            total_deg = total_deg.max(i + j);
            *map.entry((i, j)).or_insert(Complex64::ZERO) += c;
        }
        if total_deg != 4 {
            return Err(CurveError::NotAQuartic);
        }
        Ok(Self { terms: map })
    }

    /// The Fermat quartic `x⁴ + y⁴ + 1`.
    pub fn fermat() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new([(4, 0, one), (0, 4, one), (0, 0, one)]).unwrap()
    }

    pub fn terms(&self) -> &BTreeMap<(u8, u8), Complex64> {
        &self.terms
    }
}

impl HyperellipticCurve {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn min_branch_gap(&self) -> f64 {
        self.min_branch_gap
    }

    pub fn eval_p(&self, x: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, x)
    }

    /// Principal branch of `√p(x)`; the sheet reference at basepoints.
    pub fn principal_y(&self, x: Complex64) -> Complex64 {
        self.eval_p(x).sqrt()
    }

    pub fn nearest_branch_dist(&self, x: Complex64) -> f64 {
        self.branch_points
            .iter()
            .map(|b| (x - b).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Deterministic basepoint to the right of every branch point.
    pub fn default_base(&self) -> Complex64 {
        let r = self
            .branch_points
            .iter()
            .map(|b| b.norm())
            .fold(0.0f64, f64::max);
        Complex64::new(r + 2.0 * self.min_branch_gap.max(1.0), 0.0)
    }
}

impl CurveModel {
    pub fn hyperelliptic(p_coeffs: &[Complex64]) -> Result<Self, CurveError> {
        Ok(CurveModel::Hyperelliptic(make_hyperelliptic(p_coeffs)?))
    }

    pub fn plane_quartic(
        terms: impl IntoIterator<Item = (u8, u8, Complex64)>,
    ) -> Result<Self, CurveError> {
        Ok(CurveModel::PlaneQuartic(PlaneQuartic::new(terms)?))
    }

    pub fn genus(&self) -> usize {
        match self {
            CurveModel::Hyperelliptic(h) => h.genus,
            CurveModel::PlaneQuartic(_) => 3,
        }
    }

    pub fn as_hyperelliptic(&self) -> Option<&HyperellipticCurve> {
        match self {
            CurveModel::Hyperelliptic(h) => Some(h),
            CurveModel::PlaneQuartic(_) => None,
        }
    }

    /// Expected coefficient-vector length for a 1-form on this curve.
    pub fn omega_len(&self) -> usize {
        match self {
            CurveModel::Hyperelliptic(h) => h.genus,
            CurveModel::PlaneQuartic(_) => 3,
        }
    }

    pub fn differential(&self, coeffs: Vec<Complex64>) -> Result<AbelianDifferential, CurveError> {
        if coeffs.len() != self.omega_len() {
            return Err(CurveError::DifferentialLength {
                expected: self.omega_len(),
                got: coeffs.len(),
            });
        }
        Ok(AbelianDifferential { coeffs })
    }

    pub fn exact_differential(
        &self,
        coeffs: Vec<GaussianRational>,
    ) -> Result<ExactDifferential, CurveError> {
        if coeffs.len() != self.omega_len() {
            return Err(CurveError::DifferentialLength {
                expected: self.omega_len(),
                got: coeffs.len(),
            });
        }
        Ok(ExactDifferential { coeffs })
    }

    /// The fixed basis of holomorphic 1-forms.
    pub fn omega_basis(&self) -> Vec<AbelianDifferential> {
        let n = self.omega_len();
        (0..n)
            .map(|i| {
                let mut coeffs = vec![Complex64::ZERO; n];
                coeffs[i] = Complex64::new(1.0, 0.0);
                AbelianDifferential { coeffs }
            })
            .collect()
    }

    /// The fixed basis of holomorphic quadratic differentials (g ≥ 2).
    pub fn qd_basis(&self) -> Result<Vec<QdDescriptor>, CurveError> {
        let g = self.genus();
        if g < 2 {
            return Err(CurveError::GenusTooSmall(g));
        }
        match self {
            CurveModel::Hyperelliptic(_) => {
                let mut basis: Vec<QdDescriptor> = (0..=2 * g - 2)
                    .map(|j| QdDescriptor::OverYSquared { j })
                    .collect();
                if g >= 3 {
                    basis.extend((0..=g - 3).map(|j| QdDescriptor::OverY { j }));
                }
                Ok(basis)
            }
            CurveModel::PlaneQuartic(_) => Ok(vec![
                QdDescriptor::QuarticMonomial { i: 0, j: 0 },
                QdDescriptor::QuarticMonomial { i: 1, j: 0 },
                QdDescriptor::QuarticMonomial { i: 0, j: 1 },
                QdDescriptor::QuarticMonomial { i: 2, j: 0 },
                QdDescriptor::QuarticMonomial { i: 1, j: 1 },
                QdDescriptor::QuarticMonomial { i: 0, j: 2 },
            ]),
        }
    }

    pub fn qd_dim(&self) -> usize {
        3 * self.genus() - 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `x^n - 1` coefficient vector.
    fn cyclotomic_like(n: usize) -> Vec<Complex64> {
        let mut p = vec![Complex64::ZERO; n + 1];
        p[0] = c(-1.0, 0.0);
        p[n] = c(1.0, 0.0);
        p
    }

    #[test]
    fn sextic_gives_genus_two_with_unit_roots() {
        let curve = make_hyperelliptic(&cyclotomic_like(6)).unwrap();
        assert_eq!(curve.genus(), 2);
        assert_eq!(curve.branch_points().len(), 6);
        for b in curve.branch_points() {
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
        // 6th roots of unity are 1 apart at nearest
        assert!((curve.min_branch_gap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn octic_gives_genus_three() {
        let curve = make_hyperelliptic(&cyclotomic_like(8)).unwrap();
        assert_eq!(curve.genus(), 3);
        assert_eq!(curve.branch_points().len(), 8);
    }

    #[test]
    fn odd_degree_genus() {
        // deg 5 -> g = 2
        let curve = make_hyperelliptic(&cyclotomic_like(5)).unwrap();
        assert_eq!(curve.genus(), 2);
    }

    #[test]
    fn repeated_root_rejected() {
        // (x² − 1)² = x⁴ − 2x² + 1
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        match make_hyperelliptic(&p) {
            Err(CurveError::DegenerateCurve(_, _)) => {}
            other => panic!("expected DegenerateCurve, got {other:?}"),
        }
    }

    #[test]
    fn roots_satisfy_residual_bound() {
        // a non-symmetric polynomial with complex coefficients
        let p = [
            c(2.0, 1.0),
            c(-1.0, 0.5),
            c(0.0, 0.0),
            c(0.25, -2.0),
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ];
        let curve = make_hyperelliptic(&p).unwrap();
        let norm = poly::coeff_norm(&p);
        for b in curve.branch_points() {
            assert!(curve.eval_p(*b).norm() <= 1e-9 * norm);
        }
    }

    #[test]
    fn omega_basis_shapes() {
        let g2 = CurveModel::hyperelliptic(&cyclotomic_like(6)).unwrap();
        assert_eq!(g2.omega_basis().len(), 2);
        let g3 = CurveModel::hyperelliptic(&cyclotomic_like(8)).unwrap();
        assert_eq!(g3.omega_basis().len(), 3);
        let quartic = CurveModel::PlaneQuartic(PlaneQuartic::fermat());
        assert_eq!(quartic.omega_basis().len(), 3);
    }

    #[test]
    fn qd_basis_counts() {
        let g2 = CurveModel::hyperelliptic(&cyclotomic_like(6)).unwrap();
        let b2 = g2.qd_basis().unwrap();
        assert_eq!(b2.len(), 3);
        assert!(b2.iter().all(|d| matches!(d, QdDescriptor::OverYSquared { .. })));

        let g3 = CurveModel::hyperelliptic(&cyclotomic_like(8)).unwrap();
        let b3 = g3.qd_basis().unwrap();
        assert_eq!(b3.len(), 6);
        assert_eq!(
            b3.iter()
                .filter(|d| matches!(d, QdDescriptor::OverY { .. }))
                .count(),
            1
        );

        let quartic = CurveModel::PlaneQuartic(PlaneQuartic::fermat());
        assert_eq!(quartic.qd_basis().unwrap().len(), 6);
    }

    /// Independent divisor oracle: order of `x^j dx²/y^m` at infinity on an
    /// even-degree model, from local orders ord(x) = −1, ord(dx) = −2,
    /// ord(y) = −(g+1) at each point over x = ∞.
    fn ord_at_infinity_even(j: i64, m: i64, g: i64) -> i64 {
        -j - 4 + m * (g + 1)
    }

    #[test]
    fn qd_basis_matches_divisor_count_at_infinity() {
        for g in 2..=4i64 {
            let mut count = 0;
            for m in [1i64, 2] {
                for j in 0..=(3 * g) {
                    if ord_at_infinity_even(j, m, g) >= 0 {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, 3 * g - 3, "genus {g}");
        }
    }

    #[test]
    fn genus_one_rejected_for_qd() {
        // deg 3 -> g = 1
        let e = CurveModel::hyperelliptic(&cyclotomic_like(3)).unwrap();
        assert!(matches!(e.qd_basis(), Err(CurveError::GenusTooSmall(1))));
    }

    #[test]
    fn quartic_total_degree_enforced() {
        let bad = PlaneQuartic::new([(2, 0, c(1.0, 0.0)), (0, 0, c(1.0, 0.0))]);
        assert!(matches!(bad, Err(CurveError::NotAQuartic)));
    }
}
