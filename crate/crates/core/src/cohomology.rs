//! Group-cohomology linear algebra for `Ad_ρ` over a finite loop set.
//!
//! Everything here is relative to finitely many labelled loops: the cocycle
//! identity is checked on supplied composite pairs, and class comparison
//! reduces to a least-squares coboundary solve on the 3-complex-dimensional
//! space of traceless matrices. No presentation of the surface group is
//! assumed, and no dimension count for H¹ is claimed.

use crate::linalg::{least_squares, Mat2};
use crate::transport::irreducible;
use crate::variation::Cocycle;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("loop label `{0}` missing from the cocycle")]
    MissingLoop(String),
    #[error("cocycles are over different loop sets or representations")]
    RepMismatch,
}

/// Result of the least-squares coboundary fit.
#[derive(Debug, Clone)]
pub struct CoboundarySolve {
    pub t: Mat2,
    pub residual: f64,
    /// Set when ρ failed the irreducibility test; the coboundary map then
    /// has a kernel and `t` is only determined up to it.
    pub reducible_warning: bool,
}

/// Max Frobenius defect of the cocycle identity
/// `η(γ₁γ₂) = η(γ₁) + ρ(γ₁) η(γ₂) ρ(γ₁)⁻¹`
/// over the supplied `(γ₁, γ₂, γ₁γ₂)` label triples.
pub fn check_cocycle(
    eta: &Cocycle,
    pairs: &[(String, String, String)],
) -> Result<f64, CohomologyError> {
    let mut max = 0.0f64;
    for (l1, l2, l12) in pairs {
        let e1 = lookup(eta, l1)?;
        let e2 = lookup(eta, l2)?;
        let e12 = lookup(eta, l12)?;
        let r1 = *eta
            .rho(l1)
            .ok_or_else(|| CohomologyError::MissingLoop(l1.clone()))?;
        let r1_inv = r1.inverse().ok_or(CohomologyError::RepMismatch)?;
        let defect = (e12 - e1 - r1 * e2 * r1_inv).frobenius();
        max = max.max(defect);
    }
    Ok(max)
}

fn lookup(eta: &Cocycle, label: &str) -> Result<Mat2, CohomologyError> {
    eta.eta(label)
        .copied()
        .ok_or_else(|| CohomologyError::MissingLoop(label.to_string()))
}

/// Basis of sl₂ used to parameterise the unknown `T`.
fn sl2_basis() -> [Mat2; 3] {
    let one = Complex64::new(1.0, 0.0);
    [
        Mat2::traceless(one, Complex64::ZERO, Complex64::ZERO),
        Mat2::traceless(Complex64::ZERO, one, Complex64::ZERO),
        Mat2::traceless(Complex64::ZERO, Complex64::ZERO, one),
    ]
}

/// Least-squares `T` minimising `Σ_γ ‖η(γ) − (ρ(γ) T ρ(γ)⁻¹ − T)‖²_F`.
///
/// The coboundary map is complex-linear in `T`, so this is a 3-unknown
/// complex least-squares problem stacked over the loops. The reported
/// residual is the square root of the minimised sum; `residual ≈ 0` means
/// the class of η vanishes.
pub fn solve_coboundary(eta: &Cocycle) -> CoboundarySolve {
    let basis = sl2_basis();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut rhs: Vec<Complex64> = Vec::new();
    let mut rhos = Vec::new();

    for entry in eta.entries.values() {
        let r = entry.rho;
        let r_inv = match r.inverse() {
            Some(inv) => inv,
            None => continue,
        };
        rhos.push(r);
        let images: Vec<Mat2> = basis.iter().map(|e| r * *e * r_inv - *e).collect();
        for idx in 0..4 {
            rows.push(images.iter().map(|m| m.entries()[idx]).collect());
            rhs.push(entry.eta.entries()[idx]);
        }
    }

    let reducible_warning = !irreducible(&rhos);
    if rows.is_empty() {
        return CoboundarySolve {
            t: Mat2::ZERO,
            residual: 0.0,
            reducible_warning,
        };
    }

    let (x, _) = least_squares(&rows, &rhs);
    let t = basis[0].scale(x[0]) + basis[1].scale(x[1]) + basis[2].scale(x[2]);

    let mut residual_sq = 0.0;
    for entry in eta.entries.values() {
        let r = entry.rho;
        if let Some(r_inv) = r.inverse() {
            residual_sq += (entry.eta - (r * t * r_inv - t)).frobenius().powi(2);
        }
    }

    CoboundarySolve {
        t,
        residual: residual_sq.sqrt(),
        reducible_warning,
    }
}

/// Whether two cocycles over the same representation and loop set represent
/// the same class in H¹; returns the verdict and the coboundary residual of
/// their difference.
pub fn same_class(a: &Cocycle, b: &Cocycle) -> Result<(bool, f64), CohomologyError> {
    if a.entries.len() != b.entries.len() {
        return Err(CohomologyError::RepMismatch);
    }
    let mut diff = a.clone();
    for (label, entry) in diff.entries.iter_mut() {
        let other = b
            .entries
            .get(label)
            .ok_or_else(|| CohomologyError::MissingLoop(label.clone()))?;
        if (entry.rho - other.rho).frobenius() > 1e-6 * entry.rho.frobenius().max(1.0) {
            return Err(CohomologyError::RepMismatch);
        }
        entry.eta = entry.eta - other.eta;
    }
    let solve = solve_coboundary(&diff);
    let threshold = 1e-6 * (a.norm() + b.norm()).max(1.0);
    Ok((solve.residual <= threshold, solve.residual))
}

/// Builds a cocycle container from explicit matrices; used by the synthetic
/// tests and by offline re-verification of serialized reports.
pub fn cocycle_from_matrices(
    base_point: Complex64,
    start_sheet: i8,
    values: impl IntoIterator<Item = (String, Mat2, Mat2)>,
) -> Cocycle {
    let mut entries = std::collections::BTreeMap::new();
    let mut rhos = Vec::new();
    for (label, eta, rho) in values {
        rhos.push(rho);
        entries.insert(
            label,
            crate::variation::CocycleEntry {
                eta,
                rho,
                err_estimate: 0.0,
            },
        );
    }
    Cocycle {
        base_point,
        start_sheet,
        entries,
        reducible_warning: !irreducible(&rhos),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_traceless(rng: &mut SplitMix64) -> Mat2 {
        let mut r = || c(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
        Mat2::traceless(r(), r(), r())
    }

    /// det-1 matrix from unipotent factors.
    fn random_sl2(rng: &mut SplitMix64) -> Mat2 {
        let one = c(1.0, 0.0);
        let mut r = || c(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
        let l1 = Mat2::new(one, Complex64::ZERO, r(), one);
        let u = Mat2::new(one, r(), Complex64::ZERO, one);
        let l2 = Mat2::new(one, Complex64::ZERO, r(), one);
        l1 * u * l2
    }

    /// Synthetic coboundary cocycle on a free set of labels, extended to one
    /// composite pair so the cocycle identity is checkable.
    fn coboundary_fixture(seed: u64) -> (Cocycle, Mat2, Vec<(String, String, String)>) {
        let mut rng = SplitMix64::new(seed);
        let t = random_traceless(&mut rng);
        let r1 = random_sl2(&mut rng);
        let r2 = random_sl2(&mut rng);
        let r12 = r1 * r2;
        let cob = |r: Mat2| r * t * r.inverse().unwrap() - t;
        let cocycle = cocycle_from_matrices(
            c(3.0, 0.0),
            1,
            [
                ("g1".to_string(), cob(r1), r1),
                ("g2".to_string(), cob(r2), r2),
                ("g1g2".to_string(), cob(r12), r12),
            ],
        );
        let pairs = vec![("g1".to_string(), "g2".to_string(), "g1g2".to_string())];
        (cocycle, t, pairs)
    }

    #[test]
    fn coboundaries_satisfy_the_cocycle_identity_exactly() {
        for seed in 0..5 {
            let (cocycle, _, pairs) = coboundary_fixture(seed);
            let defect = check_cocycle(&cocycle, &pairs).unwrap();
            assert!(defect <= 1e-12, "seed {seed}: defect {defect:.3e}");
        }
    }

    #[test]
    fn perturbed_cocycle_trips_the_detector() {
        let (mut cocycle, _, pairs) = coboundary_fixture(7);
        let e = cocycle.entries.get_mut("g2").unwrap();
        e.eta = e.eta + Mat2::traceless(c(1e-3, 0.0), Complex64::ZERO, Complex64::ZERO);
        let defect = check_cocycle(&cocycle, &pairs).unwrap();
        assert!(defect >= 1e-4, "defect {defect:.3e}");
    }

    #[test]
    fn solve_recovers_the_generating_matrix() {
        for seed in 0..5 {
            let (cocycle, t, _) = coboundary_fixture(seed);
            let solve = solve_coboundary(&cocycle);
            assert!(!solve.reducible_warning, "seed {seed}");
            assert!(solve.residual <= 1e-10, "seed {seed}: {:.3e}", solve.residual);
            assert!(
                (solve.t - t).frobenius() <= 1e-9,
                "seed {seed}: {:.3e}",
                (solve.t - t).frobenius()
            );
        }
    }

    #[test]
    fn zero_cocycle_solves_to_zero() {
        let mut rng = SplitMix64::new(3);
        let r1 = random_sl2(&mut rng);
        let r2 = random_sl2(&mut rng);
        let cocycle = cocycle_from_matrices(
            c(3.0, 0.0),
            1,
            [
                ("a".to_string(), Mat2::ZERO, r1),
                ("b".to_string(), Mat2::ZERO, r2),
            ],
        );
        let solve = solve_coboundary(&cocycle);
        assert!(solve.t.frobenius() <= 1e-12);
        assert!(solve.residual <= 1e-12);
    }

    #[test]
    fn trivial_rep_sets_warning_and_full_residual() {
        // at ρ = I every coboundary vanishes, so the residual equals ‖η‖
        let mut rng = SplitMix64::new(9);
        let x = random_traceless(&mut rng);
        let y = random_traceless(&mut rng);
        let cocycle = cocycle_from_matrices(
            c(3.0, 0.0),
            1,
            [
                ("a".to_string(), x, Mat2::identity()),
                ("b".to_string(), y, Mat2::identity()),
            ],
        );
        let solve = solve_coboundary(&cocycle);
        assert!(solve.reducible_warning);
        let norm = (x.frobenius().powi(2) + y.frobenius().powi(2)).sqrt();
        assert!((solve.residual - norm).abs() <= 1e-9 * norm.max(1.0));
    }

    #[test]
    fn same_class_behaviour() {
        let (cocycle, _, _) = coboundary_fixture(11);
        // a cocycle equals itself
        let (same, res) = same_class(&cocycle, &cocycle).unwrap();
        assert!(same && res <= 1e-12);

        // adding a coboundary of a fresh matrix preserves the class
        let mut rng = SplitMix64::new(21);
        let s = random_traceless(&mut rng);
        let mut shifted = cocycle.clone();
        for entry in shifted.entries.values_mut() {
            let r = entry.rho;
            entry.eta = entry.eta + (r * s * r.inverse().unwrap() - s);
        }
        let (same, _) = same_class(&cocycle, &shifted).unwrap();
        assert!(same);

        // abelian rep with additive nonzero cocycle: η vs 2η differ
        let x = random_traceless(&mut rng);
        let y = random_traceless(&mut rng);
        let abelian = |scale: f64| {
            cocycle_from_matrices(
                c(3.0, 0.0),
                1,
                [
                    ("a".to_string(), x.scale(c(scale, 0.0)), Mat2::identity()),
                    ("b".to_string(), y.scale(c(scale, 0.0)), Mat2::identity()),
                ],
            )
        };
        let (same, res) = same_class(&abelian(1.0), &abelian(2.0)).unwrap();
        assert!(!same);
        assert!(res > 1e-3);
    }

    #[test]
    fn missing_labels_are_reported() {
        let (cocycle, _, _) = coboundary_fixture(2);
        let bad_pairs = vec![("g1".to_string(), "nope".to_string(), "g1g2".to_string())];
        assert!(matches!(
            check_cocycle(&cocycle, &bad_pairs),
            Err(CohomologyError::MissingLoop(_))
        ));
    }
}
