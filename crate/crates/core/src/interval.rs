//! Closed intervals with outward-rounded endpoint arithmetic.
//!
//! Directed rounding is emulated on top of round-to-nearest: every operation
//! computes the nearest result together with the sign of its exact rounding
//! error (two-sum, Veltkamp/Dekker two-product, exact remainders for division
//! and square root) and steps one ulp outward only when the rounded value is
//! on the wrong side. Exactly representable results therefore stay exact,
//! e.g. `[1,2] + [3,4] == [4,6]`. Where the error term cannot be trusted
//! (overflow, gradual underflow, huge operands) the result is widened by one
//! ulp unconditionally, which is still a valid enclosure.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Directed rounding primitives

#[inline]
fn adjust<T: Scalar>(value: T, err: T, up: bool) -> T {
    if up {
        if err > T::zero() {
            value.next_up()
        } else {
            value
        }
    } else if err < T::zero() {
        value.next_down()
    } else {
        value
    }
}

#[inline]
fn widen<T: Scalar>(value: T, up: bool) -> T {
    if up {
        value.next_up()
    } else {
        value.next_down()
    }
}

/// Repairs a non-finite rounded result. A finite exact value that rounded to
/// infinity is bounded by the largest finite number on the inner side.
#[inline]
fn non_finite<T: Scalar>(value: T, finite_operands: bool, up: bool) -> T {
    if value.is_nan() {
        return if up { T::infinity() } else { T::neg_infinity() };
    }
    if finite_operands {
        if value > T::zero() && !up {
            return T::max_value();
        }
        if value < T::zero() && up {
            return T::min_value();
        }
    }
    value
}

#[inline]
fn split<T: Scalar>(a: T) -> (T, T) {
    let c = T::split_factor() * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Exact `a*b - p` for `p = fl(a*b)`, valid away from overflow and underflow.
#[inline]
fn two_prod_err<T: Scalar>(a: T, b: T, p: T) -> T {
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    ((ah * bh - p) + ah * bl + al * bh) + al * bl
}

#[inline]
pub(crate) fn add_dir<T: Scalar>(a: T, b: T, up: bool) -> T {
    let s = a + b;
    if !s.is_finite() {
        return non_finite(s, a.is_finite() && b.is_finite(), up);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    adjust(s, err, up)
}

#[inline]
pub(crate) fn mul_dir<T: Scalar>(a: T, b: T, up: bool) -> T {
    if a == T::zero() || b == T::zero() {
        return T::zero();
    }
    let p = a * b;
    if !p.is_finite() {
        return non_finite(p, a.is_finite() && b.is_finite(), up);
    }
    let limit = T::split_limit();
    if a.abs() > limit || b.abs() > limit || p.abs() < T::tiny() {
        return widen(p, up);
    }
    adjust(p, two_prod_err(a, b, p), up)
}

#[inline]
pub(crate) fn div_dir<T: Scalar>(a: T, b: T, up: bool) -> T {
    if a == T::zero() {
        return T::zero();
    }
    let q = a / b;
    if !q.is_finite() {
        return non_finite(q, a.is_finite() && b.is_finite(), up);
    }
    let limit = T::split_limit();
    let tiny = T::tiny();
    if !b.is_finite()
        || q.abs() < tiny
        || a.abs() < tiny
        || q.abs() > limit
        || b.abs() > limit
        || a.abs() > limit
    {
        return widen(q, up);
    }
    let p = q * b;
    let rem = (a - p) - two_prod_err(q, b, p);
    let err = if b > T::zero() { rem } else { -rem };
    adjust(q, err, up)
}

#[inline]
pub(crate) fn sqrt_dir<T: Scalar>(x: T, up: bool) -> T {
    if x == T::zero() || x == T::infinity() {
        return x;
    }
    let s = x.sqrt();
    if x < T::tiny() || x > T::split_limit() {
        return widen(s, up);
    }
    let p = s * s;
    let rem = (x - p) - two_prod_err(s, s, p);
    adjust(s, rem, up)
}

// ---------------------------------------------------------------------------
// Interval

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    /// Builds `[lo, hi]`.
    ///
    /// Panics if `lo > hi` or either endpoint is NaN; use [`Interval::try_new`]
    /// for untrusted input.
    pub fn new(lo: T, hi: T) -> Self {
        Self::try_new(lo, hi).expect("interval endpoints out of order")
    }

    pub fn try_new(lo: T, hi: T) -> Result<Self> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(CoreError::InvalidInterval {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    #[inline]
    pub fn point(x: T) -> Self {
        debug_assert!(!x.is_nan());
        Self { lo: x, hi: x }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::point(T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::point(T::one())
    }

    /// Exact enclosure of a non-negative integer.
    pub fn from_usize(n: usize) -> Self {
        let x = <T as Scalar>::from_usize(n);
        match x.to_usize() {
            Some(back) if back == n => Self::point(x),
            _ => Self::new(x.next_down(), x.next_up()),
        }
    }

    /// Enclosure of a decimal constant given by its nearest `f64`. Unless the
    /// value is a small integer it is widened by one ulp of `T` on each side.
    pub fn from_decimal(x: f64) -> Self {
        let v = T::from_f64_lossy(x);
        if x.fract() == 0.0 && x.abs() < 2f64.powi(24) {
            Self::point(v)
        } else {
            Self::new(v.next_down(), v.next_up())
        }
    }

    /// Enclosure of π: the correctly rounded constant widened by one ulp.
    pub fn pi() -> Self {
        let p = T::PI();
        Self::new(p.next_down(), p.next_up())
    }

    pub fn sqrt2() -> Self {
        Self::from_usize(2).sqrt().expect("positive")
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    /// Midpoint, rounded to nearest.
    #[inline]
    pub fn mid(&self) -> T {
        if self.lo == self.hi {
            return self.lo;
        }
        let half = T::from_f64_lossy(0.5);
        let m = self.lo * half + self.hi * half;
        if m.is_finite() {
            m
        } else {
            T::zero()
        }
    }

    /// Upper bound on the radius about [`Interval::mid`].
    pub fn rad(&self) -> T {
        let m = self.mid();
        add_dir(m, -self.lo, true).max(add_dir(self.hi, -m, true))
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> T {
        add_dir(self.hi, -self.lo, true)
    }

    /// `max |x|` over the interval.
    #[inline]
    pub fn mag(&self) -> T {
        self.lo.abs().max(self.hi.abs())
    }

    /// `min |x|` over the interval.
    pub fn mig(&self) -> T {
        if self.contains(T::zero()) {
            T::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn abs(&self) -> Self {
        Self {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    /// Elementwise maximum: encloses `max(x, y)` for `x ∈ self`, `y ∈ other`.
    pub fn max(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Tight square (`[-1,1]^2 = [0,1]`, unlike `x * x`).
    pub fn sqr(&self) -> Self {
        let (a, b) = (self.mig(), self.mag());
        Self {
            lo: mul_dir(a, a, false),
            hi: mul_dir(b, b, true),
        }
    }

    pub fn powi(&self, n: u32) -> Self {
        match n {
            0 => Self::one(),
            1 => *self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => *self * self.powi(n - 1),
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo < T::zero() {
            return Err(CoreError::NegativeSqrt {
                lo: self.lo.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            lo: sqrt_dir(self.lo, false),
            hi: sqrt_dir(self.hi, true),
        })
    }

    /// Division; fails if the divisor contains zero.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let z = T::zero();
        let (a, b) = (self, rhs);
        if b.contains(z) {
            return Err(CoreError::DivisionByZero);
        }
        let (lo, hi) = if b.lo > z {
            if a.lo >= z {
                (div_dir(a.lo, b.hi, false), div_dir(a.hi, b.lo, true))
            } else if a.hi <= z {
                (div_dir(a.lo, b.lo, false), div_dir(a.hi, b.hi, true))
            } else {
                (div_dir(a.lo, b.lo, false), div_dir(a.hi, b.lo, true))
            }
        } else if a.lo >= z {
            (div_dir(a.hi, b.hi, false), div_dir(a.lo, b.lo, true))
        } else if a.hi <= z {
            (div_dir(a.hi, b.lo, false), div_dir(a.lo, b.hi, true))
        } else {
            (div_dir(a.hi, b.hi, false), div_dir(a.lo, b.hi, true))
        };
        Ok(Self { lo, hi })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    /// Upper bound on the exact sum of `terms`, each term assumed exact.
    pub fn sum_upper<I: IntoIterator<Item = T>>(terms: I) -> T {
        terms
            .into_iter()
            .fold(T::zero(), |acc, t| add_dir(acc, t, true))
    }
}

impl<T: Scalar> Add for Interval<T> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            lo: add_dir(self.lo, rhs.lo, false),
            hi: add_dir(self.hi, rhs.hi, true),
        }
    }
}

impl<T: Scalar> Sub for Interval<T> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            lo: add_dir(self.lo, -rhs.hi, false),
            hi: add_dir(self.hi, -rhs.lo, true),
        }
    }
}

impl<T: Scalar> Neg for Interval<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl<T: Scalar> Mul for Interval<T> {
    type Output = Self;

    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        let z = T::zero();
        let (lo, hi) = if a.lo >= z {
            if b.lo >= z {
                (mul_dir(a.lo, b.lo, false), mul_dir(a.hi, b.hi, true))
            } else if b.hi <= z {
                (mul_dir(a.hi, b.lo, false), mul_dir(a.lo, b.hi, true))
            } else {
                (mul_dir(a.hi, b.lo, false), mul_dir(a.hi, b.hi, true))
            }
        } else if a.hi <= z {
            if b.lo >= z {
                (mul_dir(a.lo, b.hi, false), mul_dir(a.hi, b.lo, true))
            } else if b.hi <= z {
                (mul_dir(a.hi, b.hi, false), mul_dir(a.lo, b.lo, true))
            } else {
                (mul_dir(a.lo, b.hi, false), mul_dir(a.lo, b.lo, true))
            }
        } else if b.lo >= z {
            (mul_dir(a.lo, b.hi, false), mul_dir(a.hi, b.hi, true))
        } else if b.hi <= z {
            (mul_dir(a.hi, b.lo, false), mul_dir(a.lo, b.lo, true))
        } else {
            (
                mul_dir(a.lo, b.hi, false).min(mul_dir(a.hi, b.lo, false)),
                mul_dir(a.lo, b.lo, true).max(mul_dir(a.hi, b.hi, true)),
            )
        };
        Self { lo, hi }
    }
}

impl<T: Scalar> AddAssign for Interval<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for Interval<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> MulAssign for Interval<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Scalar> Sum for Interval<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Scalar> From<T> for Interval<T> {
    fn from(x: T) -> Self {
        Self::point(x)
    }
}

impl<T: fmt::Debug> fmt::Debug for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// ---------------------------------------------------------------------------
// Interval matrices

/// Dense row-major matrix of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Interval<T>>,
}

/// Unit roundoff based bound `k u / (1 - k u)` from floating-point error
/// analysis of length-`k` dot products.
fn gamma<T: Scalar>(k: usize) -> T {
    let u = T::epsilon() * T::from_f64_lossy(0.5);
    let ku = mul_dir(<T as Scalar>::from_usize(k), u, true);
    div_dir(ku, add_dir(T::one(), -ku, false), true)
}

impl<T: Scalar> IntervalMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Interval::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Interval::one();
        }
        m
    }

    pub fn from_points(rows: usize, cols: usize, points: &[T]) -> Result<Self> {
        Self::new(rows, cols, points.iter().map(|&x| Interval::point(x)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[Interval<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Interval<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major midpoint matrix.
    pub fn mid(&self) -> Vec<T> {
        self.data.iter().map(Interval::mid).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch(format!(
                "{}x{} minus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Self { data, ..*self })
    }

    /// `self - I` for square matrices.
    pub fn sub_identity(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(CoreError::DimensionMismatch("matrix is not square".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let idx = i * self.cols + i;
            out.data[idx] = out.data[idx] - Interval::one();
        }
        Ok(out)
    }

    fn check_product(&self, other: &Self) -> Result<()> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Entrywise interval product; every entry is accumulated with the
    /// outward-rounded scalar operations in ascending inner index order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_product(other)?;
        let (n, p) = (self.cols, other.cols);
        let mut data = vec![Interval::zero(); self.rows * p];
        data.par_chunks_mut(p.max(1))
            .enumerate()
            .for_each(|(i, out)| {
                let a_row = &self.data[i * n..(i + 1) * n];
                for (k, &a) in a_row.iter().enumerate() {
                    if a == Interval::zero() {
                        continue;
                    }
                    let b_row = &other.data[k * p..(k + 1) * p];
                    for (o, &b) in out.iter_mut().zip(b_row) {
                        *o = *o + a * b;
                    }
                }
            });
        Ok(Self {
            rows: self.rows,
            cols: p,
            data,
        })
    }

    fn mid_rad(&self) -> (Vec<T>, Vec<T>) {
        self.data.iter().map(|x| (x.mid(), x.rad())).unzip()
    }

    /// Midpoint-radius product: encloses every `M N` with `M ∈ self`,
    /// `N ∈ other`, using plain floating-point dot products plus an a-priori
    /// bound on their rounding error. Much faster than [`IntervalMatrix::mul`]
    /// and slightly wider.
    pub fn mul_mid_rad(&self, other: &Self) -> Result<Self> {
        self.check_product(other)?;
        let (n, p) = (self.cols, other.cols);
        let (ma, ra) = self.mid_rad();
        let (mb, rb) = other.mid_rad();
        let mb_abs: Vec<T> = mb.iter().map(|x| x.abs()).collect();
        let rb_sum: Vec<T> = mb_abs.iter().zip(&rb).map(|(&m, &r)| add_dir(m, r, true)).collect();
        let a_has_rad = ra.iter().any(|&r| r > T::zero());
        let b_has_rad = rb.iter().any(|&r| r > T::zero());

        let g = gamma::<T>(2 * n + 8);
        let pad = add_dir(T::one(), mul_dir(T::from_f64_lossy(4.0), g, true), true);
        let underflow = mul_dir(
            <T as Scalar>::from_usize(2 * n + 8),
            T::min_positive_value(),
            true,
        );

        let mut data = vec![Interval::zero(); self.rows * p];
        data.par_chunks_mut(p.max(1))
            .enumerate()
            .for_each(|(i, out)| {
                let mut s = vec![T::zero(); p];
                let mut t = vec![T::zero(); p];
                let mut r = vec![T::zero(); p];
                for k in 0..n {
                    let a = ma[i * n + k];
                    let a_abs = a.abs();
                    let a_rad = ra[i * n + k];
                    let mb_row = &mb[k * p..(k + 1) * p];
                    let mb_abs_row = &mb_abs[k * p..(k + 1) * p];
                    if a != T::zero() {
                        for j in 0..p {
                            s[j] = s[j] + a * mb_row[j];
                            t[j] = t[j] + a_abs * mb_abs_row[j];
                        }
                        if b_has_rad {
                            let rb_row = &rb[k * p..(k + 1) * p];
                            for j in 0..p {
                                r[j] = r[j] + a_abs * rb_row[j];
                            }
                        }
                    }
                    if a_has_rad && a_rad > T::zero() {
                        let sum_row = &rb_sum[k * p..(k + 1) * p];
                        for j in 0..p {
                            r[j] = r[j] + a_rad * sum_row[j];
                        }
                    }
                }
                for j in 0..p {
                    // |fl(s) - s| <= g t, and t, r are sums of non-negative
                    // terms, so their exact values are below (1 + 4g) times
                    // the computed ones.
                    let err = mul_dir(g, t[j], true);
                    let rad = mul_dir(add_dir(err, r[j], true), pad, true);
                    let rad = add_dir(rad, underflow, true);
                    out[j] = Interval {
                        lo: add_dir(s[j], -rad, false),
                        hi: add_dir(s[j], rad, true),
                    };
                }
            });
        Ok(Self {
            rows: self.rows,
            cols: p,
            data,
        })
    }

    /// Upper bound on the maximum absolute column sum.
    pub fn norm_1_upper(&self) -> T {
        (0..self.cols)
            .map(|j| Interval::sum_upper((0..self.rows).map(|i| self.get(i, j).mag())))
            .fold(T::zero(), T::max)
    }

    /// Upper bound on the maximum absolute row sum.
    pub fn norm_inf_upper(&self) -> T {
        (0..self.rows)
            .map(|i| Interval::sum_upper(self.row(i).iter().map(Interval::mag)))
            .fold(T::zero(), T::max)
    }

    /// `sqrt(||A||_1 ||A||_inf)`, rounded upward; bounds `||M||_2` for all `M ∈ A`.
    pub fn norm_2_cheap_upper(&self) -> T {
        sqrt_dir(mul_dir(self.norm_1_upper(), self.norm_inf_upper(), true), true)
    }

    /// Bound on `||M||_2` from a Gershgorin enclosure of the spectrum of the
    /// symmetric matrices `M^T M`, `M ∈ A`.
    pub fn norm_2_gershgorin_upper(&self) -> T {
        let gram = self
            .transpose()
            .mul_mid_rad(self)
            .expect("transpose dimensions agree");
        let n = gram.rows;
        let lambda_max = (0..n)
            .map(|i| {
                let off = Interval::sum_upper(
                    gram.row(i)
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, x)| x.mag()),
                );
                add_dir(gram.get(i, i).hi.max(T::zero()), off, true)
            })
            .fold(T::zero(), T::max);
        sqrt_dir(lambda_max, true)
    }

    /// Rigorous `u >= ||M||_2` for every real `M ∈ A`.
    ///
    /// Always computes the cheap `sqrt(||A||_1 ||A||_inf)` bound; with
    /// `refine` the Gershgorin bound on `A^T A` is also computed and the
    /// smaller of the two returned.
    pub fn norm_2_upper(&self, refine: bool) -> T {
        let cheap = self.norm_2_cheap_upper();
        if refine && self.rows > 0 && self.cols > 0 {
            cheap.min(self.norm_2_gershgorin_upper())
        } else {
            cheap
        }
    }
}

/// Floating-point estimate of the largest singular value of a dense
/// row-major point matrix (power iteration on `M^T M`). Not rigorous; used
/// only to decide whether a rigorous bound is worth refining.
pub fn spectral_norm_estimate<T: Scalar>(rows: usize, cols: usize, m: &[T], iterations: usize) -> T {
    if rows == 0 || cols == 0 {
        return T::zero();
    }
    let mut v = vec![T::one(); cols];
    let mut sigma = T::zero();
    for _ in 0..iterations {
        let mut w = vec![T::zero(); rows];
        for i in 0..rows {
            let row = &m[i * cols..(i + 1) * cols];
            w[i] = row.iter().zip(&v).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
        let mut z = vec![T::zero(); cols];
        for i in 0..rows {
            let row = &m[i * cols..(i + 1) * cols];
            for (zj, &a) in z.iter_mut().zip(row) {
                *zj = *zj + a * w[i];
            }
        }
        let norm = z.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        let vnorm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        sigma = (norm / vnorm).sqrt();
        v = z.into_iter().map(|x| x / norm).collect();
    }
    sigma
}
