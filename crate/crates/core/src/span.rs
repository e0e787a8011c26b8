//! The injectivity criterion as linear algebra on products of 1-forms, and
//! the sampled theorem scans built on it.
//!
//! For a connection `A = [[α, β], [γ, −α]]` on a curve of genus `g ≥ 2`, the
//! derivative of the monodromy map is injective exactly when the products
//! `{α·ωᵢ, β·ωᵢ, γ·ωᵢ}` of the entries with a basis of 1-forms span the
//! whole `(3g−3)`-dimensional space of quadratic differentials. On a
//! hyperelliptic curve every such product lies in the `x^j dx²/y²` block, so
//! the attainable rank is capped at `2g−1` — the structural reason the
//! criterion fails for hyperelliptic `g ≥ 3` and holds generically at
//! `g = 2`. Plane quartics (genus 3, non-hyperelliptic) provide the
//! full-rank samples.
//!
//! Rank is computed either exactly (Gaussian-rational inputs, fraction-free
//! elimination) or in floating point (singular values with a relative 1e−8
//! cutoff). Theorem scans default to exact arithmetic: rank equalities are
//! theorems, not tolerances.

use crate::curve::{make_hyperelliptic, AbelianDifferential, CurveError, CurveModel, ExactDifferential};
use crate::exact::GaussianRational;
use crate::linalg::{exact_rank, rank_svd};
use crate::rng::SplitMix64;
use crate::transport::ConnectionForm;
use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Mul};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpanError {
    #[error("genus {0} too small for quadratic differentials: need g >= 2")]
    GenusTooSmall(usize),
    #[error("exact mode requires Gaussian-rational inputs")]
    ExactModeUnavailable,
    #[error("genus {0} outside the supported scan range 2..=8")]
    GenusOutOfRange(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMode {
    ExactGaussianRational,
    FloatSvd,
}

/// Exact counterpart of [`ConnectionForm`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactConnection {
    pub alpha: ExactDifferential,
    pub beta: ExactDifferential,
    pub gamma: ExactDifferential,
}

impl ExactConnection {
    pub fn new(
        curve: &CurveModel,
        alpha: Vec<GaussianRational>,
        beta: Vec<GaussianRational>,
        gamma: Vec<GaussianRational>,
    ) -> Result<Self, CurveError> {
        Ok(Self {
            alpha: curve.exact_differential(alpha)?,
            beta: curve.exact_differential(beta)?,
            gamma: curve.exact_differential(gamma)?,
        })
    }

    pub fn to_float(&self) -> ConnectionForm {
        ConnectionForm {
            alpha: self.alpha.to_float(),
            beta: self.beta.to_float(),
            gamma: self.gamma.to_float(),
        }
    }
}

/// Verdict of the rank criterion with its certificate.
#[derive(Debug, Clone)]
pub struct SpanReport {
    pub rank_products: usize,
    pub dim_qd: usize,
    pub injective: bool,
    pub mode: RankMode,
    /// Singular values, descending (float mode).
    pub singular_values: Option<Vec<f64>>,
    /// Pivot positions `(row, col)` of the elimination (exact mode).
    pub pivots: Option<Vec<(usize, usize)>>,
    /// `2g−1` on hyperelliptic curves: the structural rank cap.
    pub hyperelliptic_bound: Option<usize>,
}

enum Kind {
    Hyperelliptic { genus: usize },
    Quartic,
}

fn curve_kind(curve: &CurveModel) -> Result<Kind, SpanError> {
    let g = curve.genus();
    if g < 2 {
        return Err(SpanError::GenusTooSmall(g));
    }
    Ok(match curve {
        CurveModel::Hyperelliptic(_) => Kind::Hyperelliptic { genus: g },
        CurveModel::PlaneQuartic(_) => Kind::Quartic,
    })
}

/// Product of two 1-form coefficient vectors in qd-basis coordinates.
///
/// Hyperelliptic: plain polynomial convolution into the `x^j dx²/y²` block,
/// zero in the `x^j dx²/y` block. Quartic: product of two linear forms in
/// `{1, x, y}` expanded over `{1, x, y, x², xy, y²}`.
fn form_product<T>(kind: &Kind, a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    match kind {
        Kind::Hyperelliptic { genus } => {
            let width = 3 * genus - 3;
            let mut row = vec![T::zero(); width];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    row[i + j] = row[i + j].clone() + ai.clone() * bj.clone();
                }
            }
            row
        }
        Kind::Quartic => {
            let mut row = vec![T::zero(); 6];
            // index map for products of {1, x, y}: (i, j) -> slot
            const SLOT: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    let s = SLOT[i][j];
                    row[s] = row[s].clone() + ai.clone() * bj.clone();
                }
            }
            row
        }
    }
}

fn basis_vectors<T>(n: usize) -> Vec<Vec<T>>
where
    T: Clone + Zero + num_traits::One,
{
    (0..n)
        .map(|i| {
            let mut v = vec![T::zero(); n];
            v[i] = T::one();
            v
        })
        .collect()
}

/// Rows `{α·ωᵢ, β·ωᵢ, γ·ωᵢ}` in qd-basis coordinates (3g rows, 3g−3 cols).
pub fn product_matrix(
    curve: &CurveModel,
    alpha: &AbelianDifferential,
    beta: &AbelianDifferential,
    gamma: &AbelianDifferential,
) -> Result<Vec<Vec<Complex64>>, SpanError> {
    let kind = curve_kind(curve)?;
    let omegas = basis_vectors::<Complex64>(curve.omega_len());
    let mut rows = Vec::new();
    for form in [&alpha.coeffs, &beta.coeffs, &gamma.coeffs] {
        for omega in &omegas {
            rows.push(form_product(&kind, form, omega));
        }
    }
    Ok(rows)
}

/// Exact-arithmetic version of [`product_matrix`].
pub fn product_matrix_exact(
    curve: &CurveModel,
    conn: &ExactConnection,
) -> Result<Vec<Vec<GaussianRational>>, SpanError> {
    let kind = curve_kind(curve)?;
    let omegas = basis_vectors::<GaussianRational>(curve.omega_len());
    let mut rows = Vec::new();
    for form in [&conn.alpha.coeffs, &conn.beta.coeffs, &conn.gamma.coeffs] {
        for omega in &omegas {
            rows.push(form_product(&kind, form, omega));
        }
    }
    Ok(rows)
}

/// A connection for the rank test: exact inputs support both modes, float
/// inputs only the SVD mode.
#[derive(Debug, Clone)]
pub enum SpanOperand {
    Exact(ExactConnection),
    Float(ConnectionForm),
}

impl From<ExactConnection> for SpanOperand {
    fn from(c: ExactConnection) -> Self {
        SpanOperand::Exact(c)
    }
}

impl From<ConnectionForm> for SpanOperand {
    fn from(c: ConnectionForm) -> Self {
        SpanOperand::Float(c)
    }
}

/// Decides the injectivity criterion `rank = 3g−3` in the requested mode.
pub fn injectivity_verdict(
    curve: &CurveModel,
    conn: &SpanOperand,
    mode: RankMode,
) -> Result<SpanReport, SpanError> {
    let dim_qd = {
        let g = curve.genus();
        if g < 2 {
            return Err(SpanError::GenusTooSmall(g));
        }
        3 * g - 3
    };
    let hyperelliptic_bound = match curve {
        CurveModel::Hyperelliptic(h) => Some(2 * h.genus() - 1),
        CurveModel::PlaneQuartic(_) => None,
    };

    let (rank, singular_values, pivots) = match (mode, conn) {
        (RankMode::ExactGaussianRational, SpanOperand::Exact(c)) => {
            let rows = product_matrix_exact(curve, c)?;
            let (rank, pivots) = exact_rank(&rows);
            (rank, None, Some(pivots))
        }
        (RankMode::ExactGaussianRational, SpanOperand::Float(_)) => {
            return Err(SpanError::ExactModeUnavailable)
        }
        (RankMode::FloatSvd, operand) => {
            let float_conn = match operand {
                SpanOperand::Exact(c) => c.to_float(),
                SpanOperand::Float(c) => c.clone(),
            };
            let rows = product_matrix(curve, &float_conn.alpha, &float_conn.beta, &float_conn.gamma)?;
            let (rank, sv) = rank_svd(&rows, 1e-8);
            (rank, Some(sv), None)
        }
    };

    Ok(SpanReport {
        rank_products: rank,
        dim_qd,
        injective: rank == dim_qd,
        mode,
        singular_values,
        pivots,
        hyperelliptic_bound,
    })
}

/// Conjugation `A ↦ gAg⁻¹` on the entry triple, for any coefficient ring:
/// with `g = [[a, b], [c, d]]`, `det g = 1`,
/// `α′ = (ad+bc)α − ac·β + bd·γ`,
/// `β′ = −2ab·α + a²·β − b²·γ`,
/// `γ′ = 2cd·α − c²·β + d²·γ`.
pub fn conjugate_triple<T>(alpha: &[T], beta: &[T], gamma: &[T], g: &[[T; 2]; 2]) -> [Vec<T>; 3]
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + std::ops::Neg<Output = T> + std::ops::Sub<Output = T>,
{
    let (a, b) = (g[0][0].clone(), g[0][1].clone());
    let (c, d) = (g[1][0].clone(), g[1][1].clone());
    let two = |x: T| x.clone() + x;
    let lin = |ca: T, cb: T, cg: T| -> Vec<T> {
        (0..alpha.len())
            .map(|k| {
                ca.clone() * alpha[k].clone()
                    + cb.clone() * beta[k].clone()
                    + cg.clone() * gamma[k].clone()
            })
            .collect()
    };
    let alpha_new = lin(
        a.clone() * d.clone() + b.clone() * c.clone(),
        T::zero() - a.clone() * c.clone(),
        b.clone() * d.clone(),
    );
    let beta_new = lin(
        T::zero() - two(a.clone() * b.clone()),
        a.clone() * a.clone(),
        T::zero() - b.clone() * b.clone(),
    );
    let gamma_new = lin(
        two(c.clone() * d.clone()),
        T::zero() - c.clone() * c.clone(),
        d.clone() * d.clone(),
    );
    [alpha_new, beta_new, gamma_new]
}

/// Random SL₂ over ℚ(i) from unipotent factors, so `det = 1` exactly.
pub fn random_sl2_exact(rng: &mut SplitMix64, bound: i64) -> [[GaussianRational; 2]; 2] {
    let u = rng.gaussian_rational(bound);
    let v = rng.gaussian_rational(bound);
    let w = rng.gaussian_rational(bound);
    // [[1,0],[u,1]] · [[1,v],[0,1]] · [[1,0],[w,1]]
    let one = GaussianRational::one;
    let a = one() + v.clone() * w.clone();
    let b = v.clone();
    let c = u.clone() * (one() + v.clone() * w.clone()) + w.clone();
    let d = u * v + one();
    [[a, b], [c, d]]
}

/// Random exact connection with numerators and denominators bounded by
/// `bound`.
pub fn random_exact_connection(
    curve: &CurveModel,
    rng: &mut SplitMix64,
    bound: i64,
) -> ExactConnection {
    let n = curve.omega_len();
    let vec = |rng: &mut SplitMix64| -> Vec<GaussianRational> {
        (0..n).map(|_| rng.gaussian_rational(bound)).collect()
    };
    ExactConnection::new(curve, vec(rng), vec(rng), vec(rng)).expect("length is correct")
}

/// One trial of the basis-products scan.
#[derive(Debug, Clone)]
pub struct RauchTrial {
    pub trial: u64,
    pub valid_basis: bool,
    pub rank: usize,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct RauchReport {
    pub genus: usize,
    pub expected_rank: usize,
    pub trials: Vec<RauchTrial>,
    pub all_pass: bool,
}

/// Random hyperelliptic curve of the given genus; retries on the rare
/// degenerate draw.
fn random_hyperelliptic(genus: usize, rng: &mut SplitMix64) -> Result<CurveModel, SpanError> {
    for _ in 0..32 {
        let deg = 2 * genus + 2;
        let coeffs: Vec<Complex64> = (0..deg)
            .map(|_| rng.gaussian_rational(20).to_complex())
            .chain(std::iter::once(Complex64::new(1.0, 0.0)))
            .collect();
        match make_hyperelliptic(&coeffs) {
            Ok(h) => return Ok(CurveModel::Hyperelliptic(h)),
            Err(CurveError::DegenerateCurve(_, _)) => continue,
            Err(e) => return Err(SpanError::Curve(e)),
        }
    }
    Err(SpanError::Curve(CurveError::RootsDidNotConverge))
}

/// Scans random Gaussian-rational bases `ξ₁..ξ_g` of the 1-forms on random
/// hyperelliptic curves: the exact rank of the span of all products
/// `ξᵢ·ξⱼ` must equal `2g−1` in every valid trial.
pub fn rauch_check(genus: usize, trials: u64, seed: u64) -> Result<RauchReport, SpanError> {
    if !(2..=8).contains(&genus) {
        return Err(SpanError::GenusOutOfRange(genus));
    }
    let expected = 2 * genus - 1;
    let width = 3 * genus - 3;
    let mut out = Vec::new();

    for trial in 0..trials {
        let mut rng = SplitMix64::for_trial(seed, trial);
        let _curve = random_hyperelliptic(genus, &mut rng)?;

        // random coefficient matrix of the candidate basis
        let xi: Vec<Vec<GaussianRational>> = (0..genus)
            .map(|_| (0..genus).map(|_| rng.gaussian_rational(100)).collect())
            .collect();
        let (basis_rank, _) = exact_rank(&xi);
        let valid_basis = basis_rank == genus;

        let mut rows = Vec::new();
        for i in 0..genus {
            for j in i..genus {
                let mut row = vec![GaussianRational::zero(); width];
                for (ai, a) in xi[i].iter().enumerate() {
                    for (bj, b) in xi[j].iter().enumerate() {
                        row[ai + bj] = row[ai + bj].clone() + a.clone() * b.clone();
                    }
                }
                rows.push(row);
            }
        }
        let (rank, _) = exact_rank(&rows);
        let pass = !valid_basis || rank == expected;
        out.push(RauchTrial {
            trial,
            valid_basis,
            rank,
            pass,
        });
    }

    let all_pass = out.iter().all(|t| t.pass && t.valid_basis);
    Ok(RauchReport {
        genus,
        expected_rank: expected,
        trials: out,
        all_pass,
    })
}

#[derive(Debug, Clone)]
pub struct NoetherTrial {
    pub trial: u64,
    pub rank_exact: usize,
    pub rank_float: usize,
    pub full_rank: bool,
}

#[derive(Debug, Clone)]
pub struct NoetherReport {
    pub trials: Vec<NoetherTrial>,
    pub full_rank_fraction: f64,
    pub modes_agree: bool,
}

/// Random-triple scan on a plane quartic: the product rank should be the
/// full 6 for every generic draw. Exact arithmetic decides; the float rank
/// is recorded for the cross-mode agreement check.
pub fn noether_scan(
    quartic: &CurveModel,
    trials: u64,
    seed: u64,
) -> Result<NoetherReport, SpanError> {
    if !matches!(quartic, CurveModel::PlaneQuartic(_)) {
        return Err(SpanError::ExactModeUnavailable);
    }
    let mut out = Vec::new();
    let mut modes_agree = true;
    for trial in 0..trials {
        let mut rng = SplitMix64::for_trial(seed, trial);
        let conn = random_exact_connection(quartic, &mut rng, 100);
        let exact = injectivity_verdict(quartic, &conn.clone().into(), RankMode::ExactGaussianRational)?;
        let float = injectivity_verdict(quartic, &conn.into(), RankMode::FloatSvd)?;
        modes_agree &= exact.rank_products == float.rank_products;
        out.push(NoetherTrial {
            trial,
            rank_exact: exact.rank_products,
            rank_float: float.rank_products,
            full_rank: exact.rank_products == 6,
        });
    }
    let frac = if out.is_empty() {
        0.0
    } else {
        out.iter().filter(|t| t.full_rank).count() as f64 / out.len() as f64
    };
    Ok(NoetherReport {
        trials: out,
        full_rank_fraction: frac,
        modes_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::PlaneQuartic;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn genus2() -> CurveModel {
        let mut p = vec![Complex64::ZERO; 7];
        p[0] = c(-1.0, 0.0);
        p[6] = c(1.0, 0.0);
        CurveModel::hyperelliptic(&p).unwrap()
    }

    fn genus3() -> CurveModel {
        let mut p = vec![Complex64::ZERO; 9];
        p[0] = c(-1.0, 0.0);
        p[8] = c(1.0, 0.0);
        CurveModel::hyperelliptic(&p).unwrap()
    }

    fn fermat() -> CurveModel {
        CurveModel::PlaneQuartic(PlaneQuartic::fermat())
    }

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_integers(re, im)
    }

    #[test]
    fn genus2_standard_pair_gives_full_rank() {
        // α = dx/y, β = x dx/y, γ = 0: products are 1, x, x² (twice) — rank 3
        let curve = genus2();
        let conn = ExactConnection::new(
            &curve,
            vec![g(1, 0), g(0, 0)],
            vec![g(0, 0), g(1, 0)],
            vec![g(0, 0), g(0, 0)],
        )
        .unwrap();
        let rows = product_matrix_exact(&curve, &conn).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].len(), 3);
        let report =
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational).unwrap();
        assert_eq!(report.rank_products, 3);
        assert!(report.injective);
    }

    #[test]
    fn equal_entries_give_rank_g() {
        // α = β = γ = dx/y: the span is dx/y · Ω¹, dimension g = 2
        let curve = genus2();
        let one_form = vec![g(1, 0), g(0, 0)];
        let conn =
            ExactConnection::new(&curve, one_form.clone(), one_form.clone(), one_form).unwrap();
        let report =
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational).unwrap();
        assert_eq!(report.rank_products, 2);
        assert!(!report.injective);
    }

    #[test]
    fn quartic_basis_triple_has_full_rank_six() {
        let curve = fermat();
        let conn = ExactConnection::new(
            &curve,
            vec![g(1, 0), g(0, 0), g(0, 0)],
            vec![g(0, 0), g(1, 0), g(0, 0)],
            vec![g(0, 0), g(0, 0), g(1, 0)],
        )
        .unwrap();
        let report =
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational).unwrap();
        assert_eq!(report.rank_products, 6);
        assert!(report.injective);
    }

    #[test]
    fn degenerate_quartic_triple_has_rank_three() {
        let curve = fermat();
        let f = vec![g(1, 0), g(2, 1), g(-1, 3)];
        let conn = ExactConnection::new(&curve, f.clone(), f.clone(), f).unwrap();
        let report =
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational).unwrap();
        assert_eq!(report.rank_products, 3);
        assert!(!report.injective);
    }

    #[test]
    fn hyperelliptic_rows_avoid_the_second_block() {
        let curve = genus3();
        let mut rng = SplitMix64::new(5);
        let conn = random_exact_connection(&curve, &mut rng, 50);
        let rows = product_matrix_exact(&curve, &conn).unwrap();
        // columns 2g−1 .. 3g−4 (the x^j dx²/y block) must vanish row-wise
        for row in &rows {
            assert_eq!(row.len(), 6);
            assert!(row[5].is_zero());
        }
        let report = injectivity_verdict(
            &curve,
            &conn.into(),
            RankMode::ExactGaussianRational,
        )
        .unwrap();
        assert!(report.rank_products <= 5);
        assert!(!report.injective);
        assert_eq!(report.hyperelliptic_bound, Some(5));
    }

    #[test]
    fn exact_and_float_modes_agree_on_random_inputs() {
        for (which, curve) in [genus2(), genus3(), fermat()].into_iter().enumerate() {
            for seed in 0..8u64 {
                let mut rng = SplitMix64::for_trial(1000 + which as u64, seed);
                let conn = random_exact_connection(&curve, &mut rng, 100);
                let exact = injectivity_verdict(
                    &curve,
                    &conn.clone().into(),
                    RankMode::ExactGaussianRational,
                )
                .unwrap();
                let float =
                    injectivity_verdict(&curve, &conn.into(), RankMode::FloatSvd).unwrap();
                assert_eq!(
                    exact.rank_products, float.rank_products,
                    "curve {which}, seed {seed}"
                );
            }
        }
    }

    #[test]
    fn exact_mode_rejects_float_inputs() {
        let curve = genus2();
        let conn = ConnectionForm::new(
            &curve,
            vec![c(0.1, 0.2), c(0.3, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.5, 0.5), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational),
            Err(SpanError::ExactModeUnavailable)
        ));
    }

    #[test]
    fn rank_is_conjugation_invariant() {
        for (which, curve) in [genus2(), fermat()].into_iter().enumerate() {
            for seed in 0..6u64 {
                let mut rng = SplitMix64::for_trial(77 + which as u64, seed);
                let conn = random_exact_connection(&curve, &mut rng, 60);
                let gmat = random_sl2_exact(&mut rng, 10);
                let [a2, b2, g2] = conjugate_triple(
                    &conn.alpha.coeffs,
                    &conn.beta.coeffs,
                    &conn.gamma.coeffs,
                    &gmat,
                );
                let conj = ExactConnection::new(&curve, a2, b2, g2).unwrap();
                let r1 = injectivity_verdict(
                    &curve,
                    &conn.into(),
                    RankMode::ExactGaussianRational,
                )
                .unwrap();
                let r2 = injectivity_verdict(
                    &curve,
                    &conj.into(),
                    RankMode::ExactGaussianRational,
                )
                .unwrap();
                assert_eq!(r1.rank_products, r2.rank_products, "curve {which} seed {seed}");
            }
        }
    }

    #[test]
    fn conjugation_formula_matches_matrix_conjugation_pointwise() {
        // evaluate both sides at a sample x: entries of gAg⁻¹ as scalars
        let mut rng = SplitMix64::new(31);
        let al: Vec<GaussianRational> = (0..2).map(|_| rng.gaussian_rational(9)).collect();
        let be: Vec<GaussianRational> = (0..2).map(|_| rng.gaussian_rational(9)).collect();
        let ga: Vec<GaussianRational> = (0..2).map(|_| rng.gaussian_rational(9)).collect();
        let gm = random_sl2_exact(&mut rng, 5);
        let [a2, b2, g2] = conjugate_triple(&al, &be, &ga, &gm);

        let x = c(0.7, -0.4);
        let ev = |v: &[GaussianRational]| {
            v.iter()
                .enumerate()
                .map(|(k, q)| q.to_complex() * x.powu(k as u32))
                .sum::<Complex64>()
        };
        let gf = crate::linalg::Mat2::new(
            gm[0][0].to_complex(),
            gm[0][1].to_complex(),
            gm[1][0].to_complex(),
            gm[1][1].to_complex(),
        );
        let a_mat = crate::linalg::Mat2::new(ev(&al), ev(&be), ev(&ga), -ev(&al));
        let lhs = crate::linalg::Mat2::new(ev(&a2), ev(&b2), ev(&g2), -ev(&a2));
        let rhs = a_mat.conjugate_by(&gf);
        assert!((lhs - rhs).frobenius() < 1e-10);
    }

    #[test]
    fn rauch_small_scan() {
        for genus in [2usize, 3] {
            let report = rauch_check(genus, 5, 42).unwrap();
            assert!(report.all_pass, "genus {genus}: {:?}", report.trials);
            assert_eq!(report.expected_rank, 2 * genus - 1);
        }
    }

    #[test]
    fn rauch_degenerate_basis_flagged_invalid() {
        // a repeated row is not a basis; the trial must be reported invalid,
        // not counted as a theorem failure
        let xi = vec![
            vec![g(1, 0), g(2, 0)],
            vec![g(1, 0), g(2, 0)],
        ];
        let (rank, _) = exact_rank(&xi);
        assert_eq!(rank, 1);
        // the scan itself only sees valid bases for these seeds; the
        // invalid-trial path is the rank < g branch above
    }

    #[test]
    fn noether_small_scan_and_empty() {
        let curve = fermat();
        let report = noether_scan(&curve, 10, 1).unwrap();
        assert_eq!(report.trials.len(), 10);
        assert!(report.modes_agree);
        assert!((report.full_rank_fraction - 1.0).abs() < 1e-12);

        let empty = noether_scan(&curve, 0, 1).unwrap();
        assert!(empty.trials.is_empty());
        assert_eq!(empty.full_rank_fraction, 0.0);
    }

    #[test]
    fn genus_guard() {
        // deg 3 -> g = 1
        let p = [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let curve = CurveModel::hyperelliptic(&p).unwrap();
        let conn = ExactConnection::new(&curve, vec![g(1, 0)], vec![g(0, 0)], vec![g(0, 0)]).unwrap();
        assert!(matches!(
            injectivity_verdict(&curve, &conn.into(), RankMode::ExactGaussianRational),
            Err(SpanError::GenusTooSmall(1))
        ));
        assert!(matches!(rauch_check(1, 3, 1), Err(SpanError::GenusOutOfRange(1))));
        assert!(matches!(rauch_check(9, 3, 1), Err(SpanError::GenusOutOfRange(9))));
    }
}
