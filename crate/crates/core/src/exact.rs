//! Exact arithmetic over the Gaussian rationals ℚ(i).
//!
//! Connection coefficients arrive in config files as pairs of decimal
//! strings, which are exact rationals; keeping them exact is what makes the
//! rank computations in [`crate::span`] theorem-grade rather than heuristic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// An element of ℚ(i): `re + im·i` with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// Rational `num/den` as a real Gaussian rational.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0)
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re² + im²` — the rational norm form.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(i)");
        let n = self.norm();
        Self {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().expect("rational out of f64 range"),
            self.im.to_f64().expect("rational out of f64 range"),
        )
    }

    /// Canonical string pair, fractions in lowest terms (`"-3/4"`, `"2"`).
    pub fn to_string_pair(&self) -> (String, String) {
        (rational_to_string(&self.re), rational_to_string(&self.im))
    }
}

fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_string_pair();
        write!(f, "({} + {}i)", re, im)
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for GaussianRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::one()
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        self.clone() + rhs.clone()
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        self.clone() * rhs.clone()
    }
}

/// Parses a coefficient string into an exact rational.
///
/// Accepted forms: optionally signed decimals (`"3"`, `"-0.25"`,
/// `"1.5e-3"`) and explicit fractions (`"-7/12"`). Decimal strings convert
/// exactly, which is the point of using strings in configs.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad(s))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad(s))?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator);
        }
        return Ok(BigRational::new(n, d));
    }

    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, i32::from_str(e).map_err(|_| bad(s))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad(s));
    }
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['+', '-']);
    if !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad(s));
    }
    let digits = format!("{}{}", int_digits, frac_part);
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let mut numer = BigInt::from_str(&digits).map_err(|_| bad(s))?;
    if negative {
        numer = -numer;
    }
    let shift = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * ten.pow(shift as u32))
    } else {
        BigRational::new(numer, ten.pow((-shift) as u32))
    };
    Ok(value)
}

fn bad(s: &str) -> ParseRationalError {
    ParseRationalError::Malformed(s.to_string())
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty coefficient string")]
    Empty,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed coefficient string `{0}`")]
    Malformed(String),
}

/// Parses a `(re, im)` string pair into ℚ(i).
pub fn parse_gaussian(re: &str, im: &str) -> Result<GaussianRational, ParseRationalError> {
    Ok(GaussianRational::new(parse_rational(re)?, parse_rational(im)?))
}
