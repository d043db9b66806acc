//! Coefficient rings for the field algebra.
//!
//! Double-precision complex is the working mode; exact rationals back
//! the identity suites on tiny instances, where residuals must vanish
//! bit-for-bit rather than to rounding.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact embedding of an f64 (every finite f64 is rational).
    fn from_f64(x: f64) -> Self;
    fn div_int(&self, n: i64) -> Self;
    /// Field division (all three coefficient rings are fields).
    fn div(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Modulus, for residual reporting and norm bounds.
    fn abs_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn div_int(&self, n: i64) -> Self {
        self / n as f64
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn div_int(&self, n: i64) -> Self {
        self / n as f64
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn div_int(&self, n: i64) -> Self {
        self / BigRational::from_integer(BigInt::from(n))
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_f64(&self) -> f64 {
        Signed::abs(self).to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let x = BigRational::from_ratio(3, 7);
        let y = x.clone() * BigRational::from_int(7);
        assert_eq!(y, BigRational::from_int(3));
        assert!(BigRational::from_f64(0.5) == BigRational::from_ratio(1, 2));
    }

    #[test]
    fn complex_div_int() {
        let z = Complex64::new(2.0, 4.0).div_int(2);
        assert_eq!(z, Complex64::new(1.0, 2.0));
    }
}
