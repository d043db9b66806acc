//! Formal power series in the coupling strength with polynomial
//! coefficients, truncated at a fixed order.
//!
//! Exponentials of series with vanishing constant term terminate
//! exactly at the truncation order, which is what turns third-order
//! accuracy claims into finite, machine-checkable identities.

use super::poly::{Algebra, SuperPolynomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSeries<S: Scalar> {
    /// `coeffs[k]` is the polynomial multiplying the k-th power.
    pub coeffs: Vec<SuperPolynomial<S>>,
}

impl<S: Scalar> CouplingSeries<S> {
    pub fn zero(order: usize) -> Self {
        CouplingSeries {
            coeffs: vec![SuperPolynomial::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = SuperPolynomial::one();
        s
    }

    /// The series `t * P` (pure first order).
    pub fn linear(order: usize, p: SuperPolynomial<S>) -> Result<Self> {
        if order < 1 {
            return Err(Error::SeriesOrder(1, order));
        }
        let mut s = Self::zero(order);
        s.coeffs[1] = p;
        Ok(s)
    }

    pub fn constant(order: usize, p: SuperPolynomial<S>) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = p;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        CouplingSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        CouplingSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CouplingSeries {
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, t: &S) -> Self {
        CouplingSeries {
            coeffs: self.coeffs.iter().map(|a| a.scale(t)).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self, alg: &Algebra) -> Result<Self> {
        assert_eq!(self.order(), other.order());
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for k in 0..=n - i {
                if other.coeffs[k].is_zero() {
                    continue;
                }
                let prod = self.coeffs[i].mul(&other.coeffs[k], alg)?;
                out.coeffs[i + k] = out.coeffs[i + k].add(&prod);
            }
        }
        Ok(out)
    }

    /// `exp(self)` for a series with zero constant term.
    pub fn exp(&self, alg: &Algebra) -> Result<Self> {
        assert!(
            self.coeffs[0].is_zero(),
            "series exponential needs a vanishing constant term"
        );
        let n = self.order();
        let mut sum = Self::one(n);
        let mut power = Self::one(n);
        for k in 1..=n as i64 {
            power = power.mul(self, alg)?;
            power = CouplingSeries {
                coeffs: power.coeffs.iter().map(|c| c.div_int(k)).collect(),
            };
            if power.coeffs.iter().all(|c| c.is_zero()) {
                break;
            }
            sum = sum.add(&power);
        }
        Ok(sum)
    }

    /// Apply a polynomial map to every coefficient.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&SuperPolynomial<S>) -> Result<SuperPolynomial<S>>,
    {
        Ok(CouplingSeries {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Largest coefficient modulus at a given order.
    pub fn sup_at(&self, k: usize) -> f64 {
        self.coeffs
            .get(k)
            .map(|c| c.sup_coefficient())
            .unwrap_or(0.0)
    }
}
