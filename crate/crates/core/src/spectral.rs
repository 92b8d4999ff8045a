//! Cosine series on the unit cube `(0,1)^d`, `d ∈ {1,2,3}`.
//!
//! A function is stored through its coefficients `α_k` in the orthonormal
//! Neumann basis `φ_k(x) = c_k ∏ cos(k_i π x_i)` with `c_0 = 1`, `c_j = √2`.
//! The Laplacian is diagonal: `-Δφ_k = κ_k φ_k` with `κ_k = π²|k|²`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// Coefficient type of a [`CosineSeries`]: a plain float (fast, non-rigorous)
/// or an interval (rigorous).
pub trait Coeff:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    type Real: Scalar;

    fn zero() -> Self;
    fn from_real(x: Self::Real) -> Self;
    /// Intervals are kept; point coefficients take the midpoint.
    fn from_interval(x: Interval<Self::Real>) -> Self;
    fn to_interval(self) -> Interval<Self::Real>;
    fn is_zero(&self) -> bool;
    fn midpoint(self) -> Self::Real;
}

impl<T: Scalar> Coeff for Interval<T> {
    type Real = T;

    #[inline]
    fn zero() -> Self {
        Interval::zero()
    }

    #[inline]
    fn from_real(x: T) -> Self {
        Interval::point(x)
    }

    #[inline]
    fn from_interval(x: Interval<T>) -> Self {
        x
    }

    #[inline]
    fn to_interval(self) -> Interval<T> {
        self
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.lo() == T::zero() && self.hi() == T::zero()
    }

    #[inline]
    fn midpoint(self) -> T {
        self.mid()
    }
}

macro_rules! float_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            type Real = $t;

            #[inline]
            fn zero() -> Self {
                0.0
            }

            #[inline]
            fn from_real(x: $t) -> Self {
                x
            }

            #[inline]
            fn from_interval(x: Interval<$t>) -> Self {
                x.mid()
            }

            #[inline]
            fn to_interval(self) -> Interval<$t> {
                Interval::point(self)
            }

            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0.0
            }

            #[inline]
            fn midpoint(self) -> $t {
                self
            }
        }
    };
}

float_coeff!(f64);
float_coeff!(f32);

/// A float used directly as series coefficient (`f32`, `f64`).
pub trait PointCoeff: Scalar + Coeff<Real = Self> {}

impl<T: Scalar + Coeff<Real = T>> PointCoeff for T {}

/// A multi-index `k = (k_1, …, k_d)` of non-negative integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: usize,
    k: [usize; MAX_DIM],
}

impl MultiIndex {
    pub fn new(k: &[usize]) -> Result<Self> {
        check_dim(k.len())?;
        let mut arr = [0; MAX_DIM];
        arr[..k.len()].copy_from_slice(k);
        Ok(Self { dim: k.len(), k: arr })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            k: [0; MAX_DIM],
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn components(&self) -> &[usize] {
        &self.k[..self.dim]
    }

    /// `|k|² = Σ k_i²`.
    #[inline]
    pub fn norm_sq(&self) -> usize {
        self.components().iter().map(|&x| x * x).sum()
    }

    /// `|k|_∞ = max k_i`.
    #[inline]
    pub fn norm_inf(&self) -> usize {
        self.components().iter().copied().max().unwrap_or(0)
    }

    /// Number of non-zero components.
    #[inline]
    pub fn support(&self) -> usize {
        self.components().iter().filter(|&&x| x != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_inf() == 0
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.components().iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(CoreError::UnsupportedDimension(dim))
    }
}

/// Enclosure of `π^e`.
pub fn pi_pow<T: Scalar>(e: i32) -> Interval<T> {
    let p = Interval::<T>::pi().powi(e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip().expect("π^n is positive")
    }
}

/// Enclosure of the Laplacian eigenvalue `κ_k = π²|k|²`.
pub fn kappa<T: Scalar>(k: &MultiIndex) -> Interval<T> {
    pi_pow::<T>(2) * Interval::from_usize(k.norm_sq())
}

/// `(1/√2)^m`, the product of `m` per-axis weights.
pub(crate) fn inv_sqrt2_pow<T: Scalar>(m: usize) -> Interval<T> {
    let half = Interval::point(T::from_f64_lossy(0.5));
    let base = half.powi((m / 2) as u32);
    if m % 2 == 1 {
        base * Interval::sqrt2().recip().expect("√2 > 0")
    } else {
        base
    }
}

/// Enclosure of `c_k = ‖φ_k‖_∞ = √2^{#nonzero components}`.
pub fn phi_sup<T: Scalar>(k: &MultiIndex) -> Interval<T> {
    let m = k.support();
    let two = Interval::from_usize(2);
    let base = two.powi((m / 2) as u32);
    if m % 2 == 1 {
        base * Interval::sqrt2()
    } else {
        base
    }
}

/// The spaces whose norms [`CosineSeries::norm`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormTag {
    /// `H̄^ℓ`: `(Σ_{k≠0} κ_k^ℓ α_k²)^{1/2}`, zero-mean series only.
    HbarL(i32),
    /// `H^ℓ`: `(Σ (1+κ_k^ℓ) α_k²)^{1/2}`; `HL(0)` is the `L²` norm.
    HL(u32),
    L2,
    /// `Σ |α_k| c_k`, an upper bound for the sup norm.
    SupBound,
}

/// Truncated cosine expansion with a dense, row-major coefficient array
/// (last axis fastest) covering `0 <= k_i < extent_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosineSeries<C> {
    dim: usize,
    extent: [usize; MAX_DIM],
    coeffs: Vec<C>,
}

impl<C: Coeff> CosineSeries<C> {
    pub fn new(dim: usize, extent: &[usize], coeffs: Vec<C>) -> Result<Self> {
        check_dim(dim)?;
        if extent.len() != dim || extent.iter().any(|&e| e == 0) {
            return Err(CoreError::DimensionMismatch(format!(
                "extent {extent:?} for dimension {dim}"
            )));
        }
        let mut ext = [1; MAX_DIM];
        ext[..dim].copy_from_slice(extent);
        let len: usize = ext.iter().product();
        if coeffs.len() != len {
            return Err(CoreError::DimensionMismatch(format!(
                "{} coefficients for extent {extent:?}",
                coeffs.len()
            )));
        }
        Ok(Self {
            dim,
            extent: ext,
            coeffs,
        })
    }

    pub fn zeros(dim: usize, extent: &[usize]) -> Result<Self> {
        let len = extent.iter().product();
        Self::new(dim, extent, vec![C::zero(); len])
    }

    /// Same extent along every axis.
    pub fn zeros_cube(dim: usize, n: usize) -> Result<Self> {
        Self::zeros(dim, &vec![n; dim])
    }

    pub fn constant(dim: usize, c: C) -> Result<Self> {
        Self::new(dim, &vec![1; dim], vec![c])
    }

    /// `amplitude · φ_k`.
    pub fn mode(k: &MultiIndex, amplitude: C) -> Result<Self> {
        let extent: Vec<usize> = k.components().iter().map(|&x| x + 1).collect();
        let mut s = Self::zeros(k.dim(), &extent)?;
        s.set(k, amplitude);
        Ok(s)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn extent(&self) -> &[usize] {
        &self.extent[..self.dim]
    }

    #[inline]
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn flat(&self, k: &MultiIndex) -> Option<usize> {
        if k.dim != self.dim {
            return None;
        }
        let e = &self.extent;
        if k.k.iter().zip(e).any(|(&ki, &ei)| ki >= ei) {
            return None;
        }
        Some((k.k[0] * e[1] + k.k[1]) * e[2] + k.k[2])
    }

    /// Multi-index of flat position `i`.
    pub fn index_of(&self, i: usize) -> MultiIndex {
        let e = &self.extent;
        let k2 = i % e[2];
        let k1 = (i / e[2]) % e[1];
        let k0 = i / (e[1] * e[2]);
        MultiIndex {
            dim: self.dim,
            k: [k0, k1, k2],
        }
    }

    /// Coefficient of `φ_k`; zero outside the stored extent.
    pub fn get(&self, k: &MultiIndex) -> C {
        self.flat(k).map_or(C::zero(), |i| self.coeffs[i])
    }

    /// Panics if `k` lies outside the stored extent.
    pub fn set(&mut self, k: &MultiIndex, value: C) {
        let i = self.flat(k).expect("multi-index outside series extent");
        self.coeffs[i] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.index_of(i), c))
    }

    /// The mean, i.e. the coefficient of `φ_0`.
    pub fn mean(&self) -> C {
        self.coeffs[0]
    }

    /// Membership in the zero-mean spaces `H̄^ℓ`: the `k = 0` coefficient is
    /// exactly zero.
    pub fn is_zero_mean(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// Projection onto zero mean (sets the `k = 0` coefficient to zero).
    pub fn without_mean(mut self) -> Self {
        self.coeffs[0] = C::zero();
        self
    }

    pub fn map<D: Coeff, F: Fn(MultiIndex, C) -> D>(&self, f: F) -> CosineSeries<D> {
        CosineSeries {
            dim: self.dim,
            extent: self.extent,
            coeffs: self.iter().map(|(k, c)| f(k, c)).collect(),
        }
    }

    /// Converts coefficients through their interval enclosure.
    pub fn convert<D: Coeff<Real = C::Real>>(&self) -> CosineSeries<D> {
        self.map(|_, c| D::from_interval(c.to_interval()))
    }

    pub fn to_interval(&self) -> CosineSeries<Interval<C::Real>> {
        self.convert()
    }

    /// Copy with a new extent, truncating or zero-padding.
    pub fn resized(&self, extent: &[usize]) -> Result<Self> {
        let mut out = Self::zeros(self.dim, extent)?;
        for i in 0..out.coeffs.len() {
            let k = out.index_of(i);
            out.coeffs[i] = self.get(&k);
        }
        Ok(out)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch(format!(
                "series of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C, C) -> C) -> Result<Self> {
        self.check_same_dim(other)?;
        let extent: Vec<usize> = (0..self.dim)
            .map(|a| self.extent[a].max(other.extent[a]))
            .collect();
        let mut out = Self::zeros(self.dim, &extent)?;
        for i in 0..out.coeffs.len() {
            let k = out.index_of(i);
            out.coeffs[i] = f(self.get(&k), other.get(&k));
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C) -> Self {
        self.map(|_, c| c * s)
    }

    /// `u + c` for a constant function `c`.
    pub fn add_constant(&self, c: C) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + c;
        out
    }

    /// Enclosure of the requested norm (for [`NormTag::SupBound`] the
    /// enclosure of `Σ |α_k| c_k`, whose upper end bounds `‖u‖_∞`).
    pub fn norm(&self, tag: NormTag) -> Result<Interval<C::Real>> {
        match tag {
            NormTag::HbarL(l) => {
                if !self.is_zero_mean() {
                    return Err(CoreError::NonzeroMean);
                }
                let s = self.weighted_square_sum(l);
                (pi_pow::<C::Real>(2 * l) * s).sqrt()
            }
            NormTag::HL(0) | NormTag::L2 => self.weighted_square_sum(0).sqrt(),
            NormTag::HL(l) => {
                let plain = self.weighted_square_sum(0);
                let l = l as i32;
                let weighted = pi_pow::<C::Real>(2 * l) * self.weighted_square_sum(l);
                (plain + weighted).sqrt()
            }
            NormTag::SupBound => Ok(self.sup_bound()),
        }
    }

    /// `Σ |k|^{2ℓ} α_k²` over `k ≠ 0` (or over all `k` when `ℓ = 0`).
    fn weighted_square_sum(&self, l: i32) -> Interval<C::Real> {
        let mut total = Interval::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let a = c.to_interval();
            if a.is_zero() {
                continue;
            }
            let k = self.index_of(i);
            let n = k.norm_sq();
            let sq = a.sqr();
            total = total
                + match l {
                    0 => sq,
                    _ if n == 0 => continue,
                    _ if l > 0 => Interval::from_usize(n).powi(l as u32) * sq,
                    _ => sq
                        .checked_div(&Interval::from_usize(n).powi(l.unsigned_abs()))
                        .expect("n > 0"),
                };
        }
        total
    }

    /// Enclosure of `Σ |α_k| c_k`.
    pub fn sup_bound(&self) -> Interval<C::Real> {
        let weights: [Interval<C::Real>; MAX_DIM + 1] = std::array::from_fn(|m| {
            let two = Interval::from_usize(2);
            let b = two.powi((m / 2) as u32);
            if m % 2 == 1 {
                b * Interval::sqrt2()
            } else {
                b
            }
        });
        let mut sums = [Interval::zero(); MAX_DIM + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let a = c.to_interval();
            if a.is_zero() {
                continue;
            }
            let m = self.index_of(i).support();
            sums[m] = sums[m] + a.abs();
        }
        sums.iter().zip(&weights).map(|(&s, &w)| s * w).sum()
    }

    /// `Δ^p u` for `p ∈ {-2,…,2}`: each `α_k` is multiplied by `(-κ_k)^p`.
    /// Negative powers require a zero-mean series; positive powers return a
    /// zero-mean series.
    pub fn laplacian(&self, p: i32) -> Result<Self> {
        if !(-2..=2).contains(&p) {
            return Err(CoreError::InvalidArgument(format!(
                "Laplacian power {p} outside -2..=2"
            )));
        }
        if p < 0 && !self.is_zero_mean() {
            return Err(CoreError::NonzeroMean);
        }
        if p == 0 {
            return Ok(self.clone());
        }
        let pip = pi_pow::<C::Real>(2 * p);
        let sign = if p % 2 == 0 {
            Interval::one()
        } else {
            -Interval::one()
        };
        Ok(self.map(|k, c| {
            let n = k.norm_sq();
            if n == 0 {
                return C::zero();
            }
            let nn = Interval::from_usize(n).powi(p.unsigned_abs());
            let factor = if p > 0 {
                nn
            } else {
                nn.recip().expect("n > 0")
            };
            c * C::from_interval(sign * pip * factor)
        }))
    }

    /// `P_N u`: keeps the modes with `|k|_∞ < N`.
    pub fn project(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidArgument("projection order must be >= 1".into()));
        }
        let extent: Vec<usize> = self.extent().iter().map(|&e| e.min(n)).collect();
        self.resized(&extent)
    }

    /// `u - P_N u`.
    pub fn tail(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidArgument("projection order must be >= 1".into()));
        }
        Ok(self.map(|k, c| if k.norm_inf() < n { C::zero() } else { c }))
    }

    /// Exact product of two cosine series. The output extent along each axis
    /// is the sum of the input extents minus one, so nothing is truncated.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let dim = self.dim;
        let out_ext: Vec<usize> = (0..dim)
            .map(|a| self.extent[a] + other.extent[a] - 1)
            .collect();
        let mut oe = [1; MAX_DIM];
        oe[..dim].copy_from_slice(&out_ext);

        // Per axis, φ_a φ_b = w·φ_{a+b} + w'·φ_{|a-b|} with weights 1 or
        // 1/√2. Terms are binned by how many 1/√2 factors they carry.
        let tables: Vec<Vec<AxisTerms>> = (0..MAX_DIM)
            .map(|a| axis_table(self.extent[a], other.extent[a]))
            .collect();
        let mut bins: Vec<Vec<C>> = vec![vec![C::zero(); oe.iter().product()]; dim + 1];

        let b_nonzero: Vec<(usize, C)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        for (ia, &ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ka = self.index_of(ia);
            for &(ib, cb) in &b_nonzero {
                let kb = other.index_of(ib);
                let prod = ca * cb;
                let t0 = &tables[0][ka.k[0] * other.extent[0] + kb.k[0]];
                let t1 = &tables[1][ka.k[1] * other.extent[1] + kb.k[1]];
                let t2 = &tables[2][ka.k[2] * other.extent[2] + kb.k[2]];
                for &(c0, w0) in t0.terms() {
                    for &(c1, w1) in t1.terms() {
                        for &(c2, w2) in t2.terms() {
                            let idx = (c0 * oe[1] + c1) * oe[2] + c2;
                            let m = (w0 + w1 + w2) as usize;
                            bins[m][idx] = bins[m][idx] + prod;
                        }
                    }
                }
            }
        }

        let weights: Vec<C> = (0..=dim)
            .map(|m| C::from_interval(inv_sqrt2_pow::<C::Real>(m)))
            .collect();
        let mut coeffs = bins[0].clone();
        for m in 1..=dim {
            for (o, &b) in coeffs.iter_mut().zip(&bins[m]) {
                if !b.is_zero() {
                    *o = *o + b * weights[m];
                }
            }
        }
        Self::new(dim, &out_ext, coeffs)
    }

    /// Point value `u(x)`, evaluated in floating point from coefficient
    /// midpoints. For plotting and diagnostics only.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(CoreError::DimensionMismatch(format!(
                "point of length {} in dimension {}",
                x.len(),
                self.dim
            )));
        }
        let cos_tables: Vec<Vec<f64>> = (0..MAX_DIM)
            .map(|a| {
                let xa = if a < self.dim { x[a] } else { 0.0 };
                (0..self.extent[a])
                    .map(|k| {
                        if k == 0 {
                            1.0
                        } else {
                            std::f64::consts::SQRT_2 * (k as f64 * std::f64::consts::PI * xa).cos()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = self.index_of(i);
            let a = c.midpoint().to_f64().unwrap_or(f64::NAN);
            total += a * cos_tables[0][k.k[0]] * cos_tables[1][k.k[1]] * cos_tables[2][k.k[2]];
        }
        Ok(total)
    }
}

/// Product terms for one axis pair `(a, b)`: up to two `(index, weight
/// class)` entries, weight class 1 meaning a factor `1/√2`.
#[derive(Clone, Copy)]
pub(crate) struct AxisTerms {
    len: u8,
    items: [(usize, u8); 2],
}

impl AxisTerms {
    pub(crate) fn terms(&self) -> &[(usize, u8)] {
        &self.items[..self.len as usize]
    }
}

/// `φ_a φ_b` on one axis as a combination of at most two modes.
pub(crate) fn axis_terms(a: usize, b: usize) -> AxisTerms {
    if a == 0 || b == 0 {
        AxisTerms {
            len: 1,
            items: [(a + b, 0), (0, 0)],
        }
    } else if a == b {
        AxisTerms {
            len: 2,
            items: [(2 * a, 1), (0, 0)],
        }
    } else {
        AxisTerms {
            len: 2,
            items: [(a + b, 1), (a.abs_diff(b), 1)],
        }
    }
}

fn axis_table(ea: usize, eb: usize) -> Vec<AxisTerms> {
    (0..ea)
        .flat_map(|a| (0..eb).map(move |b| axis_terms(a, b)))
        .collect()
}
