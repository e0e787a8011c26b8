//! Small dense linear algebra: 2×2 complex matrices, singular values by
//! one-sided Jacobi, complex least squares, and fraction-free exact rank
//! over the Gaussian integers.

use crate::exact::GaussianRational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::ZERO; 2]; 2]);

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Mat2([[one, Complex64::ZERO], [Complex64::ZERO, one]])
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2([[a, Complex64::ZERO], [Complex64::ZERO, d]])
    }

    /// Traceless matrix `[[t0, t1], [t2, -t0]]`.
    pub fn traceless(t0: Complex64, t1: Complex64, t2: Complex64) -> Self {
        Mat2([[t0, t1], [t2, -t0]])
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        Some(Mat2([
            [self.0[1][1] / det, -self.0[0][1] / det],
            [-self.0[1][0] / det, self.0[0][0] / det],
        ]))
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// `g · self · g⁻¹`; `g` must be invertible.
    pub fn conjugate_by(&self, g: &Mat2) -> Mat2 {
        *g * *self * g.inverse().expect("singular conjugator")
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }
}

impl std::fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{:.6e}{:+.6e}i, {:.6e}{:+.6e}i], [{:.6e}{:+.6e}i, {:.6e}{:+.6e}i]]",
            self.0[0][0].re,
            self.0[0][0].im,
            self.0[0][1].re,
            self.0[0][1].im,
            self.0[1][0].re,
            self.0[1][0].im,
            self.0[1][1].re,
            self.0[1][1].im
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Singular values of a dense complex matrix (rows × cols), descending.
///
/// One-sided Jacobi on the columns: repeatedly orthogonalise column pairs
/// until all off-diagonal inner products are negligible. Robust and exact
/// enough for the small matrices that occur here (≤ ~30 per side).
pub fn singular_values(rows: &[Vec<Complex64>]) -> Vec<f64> {
    if rows.is_empty() || rows[0].is_empty() {
        return Vec::new();
    }
    let m = rows.len();
    let n = rows[0].len();
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| rows[i][j]).collect())
        .collect();

    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let (app, aqq, apq) = col_products(&cols[p], &cols[q]);
                let denom = (app * aqq).sqrt();
                if denom > 0.0 {
                    off = off.max(apq.norm() / denom);
                }
                if apq.norm() <= 1e-30 * denom.max(1e-300) {
                    continue;
                }
                // complex Jacobi rotation zeroing the (p,q) inner product
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = apq / apq.norm();
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = vp * c - vq * phase.conj() * s;
                    cols[q][i] = vp * phase * s + vq * c;
                }
            }
        }
        if off < 1e-14 {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

fn col_products(p: &[Complex64], q: &[Complex64]) -> (f64, f64, Complex64) {
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = Complex64::ZERO;
    for i in 0..p.len() {
        app += p[i].norm_sqr();
        aqq += q[i].norm_sqr();
        apq += p[i].conj() * q[i];
    }
    (app, aqq, apq)
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank_svd(rows: &[Vec<Complex64>], rel_threshold: f64) -> (usize, Vec<f64>) {
    let sv = singular_values(rows);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, sv);
    }
    let rank = sv.iter().filter(|&&s| s > rel_threshold * smax).count();
    (rank, sv)
}

/// Minimal-norm least squares `min ‖Ax − b‖₂` for complex A (m×n, m ≥ n small).
///
/// Normal equations with partial pivoting; falls back to an SVD
/// pseudo-inverse when the normal matrix is ill-conditioned.
pub fn least_squares(a: &[Vec<Complex64>], b: &[Complex64]) -> (Vec<Complex64>, f64) {
    let m = a.len();
    assert!(m > 0 && m == b.len());
    let n = a[0].len();

    // normal matrix N = AᴴA, rhs c = Aᴴb
    let mut nm = vec![vec![Complex64::ZERO; n]; n];
    let mut c = vec![Complex64::ZERO; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::ZERO;
            for k in 0..m {
                s += a[k][i].conj() * a[k][j];
            }
            nm[i][j] = s;
        }
        let mut s = Complex64::ZERO;
        for k in 0..m {
            s += a[k][i].conj() * b[k];
        }
        c[i] = s;
    }

    let sv_n = singular_values(&nm);
    let cond_ok = match (sv_n.first(), sv_n.last()) {
        (Some(&hi), Some(&lo)) => lo > hi * 1e-8,
        _ => false,
    };

    let x = if cond_ok {
        solve_dense(nm, c)
    } else {
        pseudo_solve(a, b)
    };

    let mut res = 0.0;
    for k in 0..m {
        let mut r = -b[k];
        for j in 0..n {
            r += a[k][j] * x[j];
        }
        res += r.norm_sqr();
    }
    (x, res.sqrt())
}

fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        if p.norm() == 0.0 {
            continue;
        }
        for row in (col + 1)..n {
            let f = a[row][col] / p;
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let bc = b[col];
            b[row] -= f * bc;
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col][k] * x[k];
        }
        x[col] = if a[col][col].norm() == 0.0 {
            Complex64::ZERO
        } else {
            s / a[col][col]
        };
    }
    x
}

/// Moore–Penrose solve through the Gram matrix eigen-structure; adequate for
/// the tiny systems that reach the fallback path.
fn pseudo_solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Vec<Complex64> {
    let m = a.len();
    let n = a[0].len();
    // x = Σ (uᵢᴴ b / σᵢ) vᵢ over σᵢ > tol, with one-sided Jacobi giving
    // A·vᵢ = σᵢ uᵢ. Recover V by accumulating rotations.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| a[i][j]).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::ZERO
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let (app, aqq, apq) = col_products(&cols[p], &cols[q]);
                let denom = (app * aqq).sqrt();
                if denom > 0.0 {
                    off = off.max(apq.norm() / denom);
                }
                if apq.norm() <= 1e-30 * denom.max(1e-300) {
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = cth * t;
                let phase = apq / apq.norm();
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = vp * cth - vq * phase.conj() * sth;
                    cols[q][i] = vp * phase * sth + vq * cth;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = vp * cth - vq * phase.conj() * sth;
                    v[q][i] = vp * phase * sth + vq * cth;
                }
            }
        }
        if off < 1e-14 {
            break;
        }
    }
    let sigmas: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let smax = sigmas.iter().cloned().fold(0.0, f64::max);
    let tol = smax * 1e-12;
    let mut x = vec![Complex64::ZERO; n];
    for j in 0..n {
        if sigmas[j] <= tol {
            continue;
        }
        // uⱼ = colⱼ / σⱼ
        let mut ub = Complex64::ZERO;
        for i in 0..m {
            ub += (cols[j][i] / sigmas[j]).conj() * b[i];
        }
        let f = ub / sigmas[j];
        for i in 0..n {
            x[i] += f * v[j][i];
        }
    }
    x
}

/// A Gaussian integer, used as the fraction-free elimination domain.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigInt::from(1),
            im: BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact division; panics if `rhs` does not divide `self` in ℤ[i].
    /// Bareiss elimination only ever divides exactly.
    fn exact_div(&self, rhs: &Self) -> Self {
        let num = self.mul(&rhs.conj());
        let den = rhs.norm();
        let (qr, rr) = num.re.div_rem(&den);
        let (qi, ri) = num.im.div_rem(&den);
        debug_assert!(rr.is_zero() && ri.is_zero(), "non-exact division in Bareiss");
        Self { re: qr, im: qi }
    }

    fn mul(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    fn magnitude(&self) -> BigInt {
        self.re.abs() + self.im.abs()
    }
}

/// Exact rank of a Gaussian-rational matrix with a pivot certificate.
///
/// Rows are scaled to Gaussian integers (scaling by nonzero rationals leaves
/// the rank unchanged), then reduced by fraction-free Bareiss elimination
/// with full pivoting. Returns the rank and the pivot positions
/// `(row, col)` in the original matrix.
pub fn exact_rank(matrix: &[Vec<GaussianRational>]) -> (usize, Vec<(usize, usize)>) {
    if matrix.is_empty() || matrix[0].is_empty() {
        return (0, Vec::new());
    }
    let m = matrix.len();
    let n = matrix[0].len();

    // clear denominators row by row
    let mut a: Vec<Vec<GaussInt>> = Vec::with_capacity(m);
    for row in matrix {
        let mut lcm = BigInt::from(1);
        for e in row {
            for q in [&e.re, &e.im] {
                lcm = lcm.lcm(q.denom());
            }
        }
        a.push(
            row.iter()
                .map(|e| GaussInt {
                    re: (&e.re * &lcm).to_integer(),
                    im: (&e.im * &lcm).to_integer(),
                })
                .collect(),
        );
    }

    let mut row_index: Vec<usize> = (0..m).collect();
    let mut col_index: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut prev = GaussInt::one();
    let mut r = 0usize;

    while r < m.min(n) {
        // full pivot search: any nonzero entry (largest magnitude for balance)
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in r..m {
            for j in r..n {
                if !a[i][j].is_zero() {
                    let mag = a[i][j].magnitude();
                    match &best {
                        Some((_, _, bm)) if *bm >= mag => {}
                        _ => best = Some((i, j, mag)),
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap(r, pi);
        row_index.swap(r, pi);
        for row in a.iter_mut() {
            row.swap(r, pj);
        }
        col_index.swap(r, pj);
        pivots.push((row_index[r], col_index[r]));

        let pivot = a[r][r].clone();
        for i in (r + 1)..m {
            for j in (r + 1)..n {
                let t = a[i][j].mul(&pivot).sub(&a[i][r].mul(&a[r][j]));
                a[i][j] = t.exact_div(&prev);
            }
            a[i][r] = GaussInt::zero();
        }
        prev = pivot;
        r += 1;
    }

    (r, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mat2_algebra() {
        let a = Mat2::new(c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0));
        let inv = a.inverse().unwrap();
        let id = a * inv;
        assert!((id - Mat2::identity()).frobenius() < 1e-14);
        assert!((a.det() - (c(3.0, 0.0) - c(2.0, 1.0) * c(0.0, -1.0))).norm() < 1e-15);
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // diag(3, 4i) embedded in a 3x2: singular values 4, 3
        let rows = vec![
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 4.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ];
        let sv = singular_values(&rows);
        assert!((sv[0] - 4.0).abs() < 1e-12);
        assert!((sv[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn svd_rank_detects_dependence() {
        let r1 = vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)];
        let r2: Vec<Complex64> = r1.iter().map(|e| e * c(0.0, 2.0)).collect();
        let r3 = vec![c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        let (rank, _) = rank_svd(&[r1, r2, r3], 1e-8);
        assert_eq!(rank, 2);
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let mut rng = SplitMix64::new(11);
        let mut rnd = || c(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
        let a: Vec<Vec<Complex64>> = (0..8).map(|_| (0..3).map(|_| rnd()).collect()).collect();
        let x_true = [rnd(), rnd(), rnd()];
        let b: Vec<Complex64> = a
            .iter()
            .map(|row| row.iter().zip(x_true.iter()).map(|(r, x)| r * x).sum())
            .collect();
        let (x, res) = least_squares(&a, &b);
        assert!(res < 1e-12);
        for j in 0..3 {
            assert!((x[j] - x_true[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn exact_rank_full_and_deficient() {
        let g = GaussianRational::from_integers;
        let full = vec![
            vec![g(1, 0), g(0, 1)],
            vec![g(0, 0), g(2, 3)],
        ];
        assert_eq!(exact_rank(&full).0, 2);

        // second row = i times first
        let dep = vec![
            vec![g(1, 0), g(2, -1), g(0, 3)],
            vec![g(0, 1), g(1, 2), g(-3, 0)],
        ];
        assert_eq!(exact_rank(&dep).0, 1);

        let zero = vec![vec![g(0, 0); 3]; 2];
        assert_eq!(exact_rank(&zero).0, 0);
    }

    #[test]
    fn exact_rank_matches_svd_on_random_rationals() {
        for seed in 0..10u64 {
            let mut rng = SplitMix64::new(seed);
            let m = 4 + (seed % 3) as usize;
            let n = 3 + (seed % 4) as usize;
            let a: Vec<Vec<GaussianRational>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gaussian_rational(9)).collect())
                .collect();
            let af: Vec<Vec<Complex64>> = a
                .iter()
                .map(|r| r.iter().map(|e| e.to_complex()).collect())
                .collect();
            let (re, _) = exact_rank(&a);
            let (rf, _) = rank_svd(&af, 1e-8);
            assert_eq!(re, rf, "seed {seed}");
        }
    }
}
