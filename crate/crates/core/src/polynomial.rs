//! Real polynomials, evaluated on floats, intervals and cosine series.

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::spectral::{Coeff, CosineSeries};

/// `Σ a_i x^i`, coefficients stored from the constant term upwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<T>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "polynomial coefficients must be finite".into(),
            ));
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Ok(Self { coeffs })
    }

    /// `u - u³`.
    pub fn cubic() -> Self {
        Self {
            coeffs: vec![T::zero(), T::one(), T::zero(), -T::one()],
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.coeffs.len() - 1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == T::zero())
    }

    /// Exact derivative (integer multiples are computed in interval
    /// arithmetic and must be representable).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self {
                coeffs: vec![T::zero()],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| {
                let p = Interval::from_usize(i) * Interval::point(c);
                debug_assert!(p.is_point(), "inexact derivative coefficient");
                p.mid()
            })
            .collect();
        Self { coeffs }
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// Horner enclosure of the range over `x`.
    pub fn eval_interval(&self, x: Interval<T>) -> Interval<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Interval::zero(), |acc, &c| acc * x + Interval::point(c))
    }

    /// `p(u)` as an exact cosine series (Horner with exact products).
    pub fn eval_series<C: Coeff<Real = T>>(&self, u: &CosineSeries<C>) -> Result<CosineSeries<C>> {
        let mut acc = CosineSeries::constant(u.dim(), C::from_real(*self.coeffs.last().unwrap()))?;
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc.multiply(u)?.add_constant(C::from_real(c));
        }
        Ok(acc)
    }
}
