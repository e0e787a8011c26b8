//! Monodromy representations of holomorphic sl₂-connections `d + A` on
//! explicit hyperelliptic curves, the derivative of the Riemann–Hilbert map
//! in connection directions, and the quadratic-differential span criterion
//! that decides where that derivative is injective.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! curve  ->  path  ->  transport  ->  variation  ->  cohomology
//!    \_______________________________________________ span
//! ```
//!
//! * [`curve`] — affine models `y² = p(x)` (and plane quartics for the span
//!   tests) together with closed-form bases of Abelian and quadratic
//!   differentials.
//! * [`path`] — polyline loops in the punctured `x`-plane with sign-coherent
//!   analytic continuation of `y = √p(x)` (sheet tracking).
//! * [`transport`] — adaptive Runge–Kutta integration of `dF + AF = 0` along
//!   loops; monodromy matrices in SL₂(ℂ).
//! * [`variation`] — the variational ODE for the derivative of monodromy with
//!   respect to the connection, plus a finite-difference oracle.
//! * [`cohomology`] — group-cohomology linear algebra for `Ad_ρ`: cocycle
//!   checks, coboundary solving, class comparison.
//! * [`span`] — the rank criterion on products of Abelian differentials, in
//!   exact Gaussian-rational or floating-point SVD arithmetic.
//! * [`run`] — config-driven dispatch used by the command-line front end and
//!   the Python bindings.

pub mod cohomology;
pub mod config;
pub mod curve;
pub mod exact;
pub mod linalg;
pub mod path;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod run;
pub mod span;
pub mod svg;
pub mod transport;
pub mod variation;

pub use num_complex::Complex64;
