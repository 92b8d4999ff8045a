//! Lipschitz constants `L1..L4` for single-parameter continuation.
//!
//! For the parameter `p ∈ {λ, σ, μ}` and the box `|p - p*| <= d_p`,
//! `‖u - u*‖_{H̄²} <= d_u`:
//!
//! ```text
//! ‖D_uF(p,u) - D_uF(p*,u*)‖ <= L1 ‖u - u*‖ + L2 |p - p*|
//! ‖D_pF(p,u) - D_pF(p*,u*)‖ <= L3 ‖u - u*‖ + L4 |p - p*|
//! ```

use crate::embeddings::EmbeddingConstants;
use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::operator::{ModelParams, Param};
use crate::polynomial::Polynomial;
use crate::scalar::Scalar;
use crate::spectral::{pi_pow, Coeff, CosineSeries, NormTag};

/// Parameter to vary and the box radii `d_p` (= `ℓ_α`) and `d_u` (= `ℓ_x`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationChoice<T> {
    pub which: Param,
    pub dp: T,
    pub du: T,
}

impl<T: Scalar> ContinuationChoice<T> {
    pub fn new(which: Param, dp: T, du: T) -> Result<Self> {
        if !(dp.is_finite() && du.is_finite() && dp > T::zero() && du > T::zero()) {
            return Err(CoreError::InvalidArgument(
                "box radii d_p and d_u must be finite and positive".into(),
            ));
        }
        Ok(Self { which, dp, du })
    }
}

/// Upper bounds on `L1..L4` and the derivative maxima they were built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzBounds<T> {
    pub l1: T,
    pub l2: T,
    pub l3: T,
    pub l4: T,
    /// `max |f'|` over the relevant range (zero where unused).
    pub fmax1: T,
    /// `max |f''|` over the relevant range.
    pub fmax2: T,
}

const MAX_PIECES: usize = 1 << 12;
const REL_TOL: f64 = 1e-3;

/// Rigorous upper bound on `max |g(x)|` for `x ∈ [lo, hi]`: interval
/// Horner evaluation on a uniform subdivision, refined by doubling until
/// the bound improves by less than `1e-3` relative (at most `2^12` pieces).
pub fn poly_range_max_on<T: Scalar>(g: &Polynomial<T>, lo: T, hi: T) -> T {
    let bound_with = |pieces: usize| {
        let width = hi - lo;
        let mut best = T::zero();
        let mut left = lo;
        for i in 1..=pieces {
            let right = if i == pieces {
                hi
            } else {
                lo + width * <T as Scalar>::from_usize(i) / <T as Scalar>::from_usize(pieces)
            };
            let piece = Interval::point(left).hull(&Interval::point(right));
            best = best.max(g.eval_interval(piece).mag());
            left = right;
        }
        best
    };
    let mut pieces = 1;
    let mut bound = bound_with(pieces);
    while pieces < MAX_PIECES {
        pieces *= 2;
        let next = bound_with(pieces).min(bound);
        let improvement = bound - next;
        bound = next;
        if improvement <= bound * T::from_f64_lossy(REL_TOL) {
            break;
        }
    }
    bound
}

/// Upper bound on `max_{|ρ| <= r} |g(ρ)|`.
pub fn poly_range_max<T: Scalar>(g: &Polynomial<T>, r: T) -> T {
    poly_range_max_on(g, -r, r)
}

/// Upper bound on `max_{|ρ| <= r} |g(ρ + shift)|`, with the shifted range
/// rounded outward.
fn shifted_range_max<T: Scalar>(g: &Polynomial<T>, r: T, shift: T) -> T {
    let range = Interval::new(-r, r) + Interval::point(shift);
    poly_range_max_on(g, range.lo(), range.hi())
}

/// `sup|u*| + C̄_m d_u`, rounded up (the `ℓ¹` bound is used for `sup|u*|`).
fn state_radius<T: Scalar>(
    u: &CosineSeries<Interval<T>>,
    consts: &EmbeddingConstants<T>,
    du: T,
    shift: T,
) -> Result<Interval<T>> {
    let sup = u.add_constant(Interval::point(shift)).norm(NormTag::SupBound)?.hi();
    Ok(Interval::point(sup) + Interval::point(consts.cm_bar.hi()) * Interval::point(du))
}

fn check_which<T>(c: &ContinuationChoice<T>, expected: Param) -> Result<()> {
    if c.which == expected {
        Ok(())
    } else {
        Err(CoreError::InvalidArgument(format!(
            "continuation parameter is {}, expected {}",
            c.which.name(),
            expected.name()
        )))
    }
}

/// Variation of `λ`:
/// `L1 = C̄_m f2max (|λ*| + d_λ)/π²`, `L2 = ‖f'(u*+μ)‖_∞/π² + σ/π⁴`,
/// `L3 = f1max/π² + σ/π⁴`, `L4 = 0`.
pub fn bounds_lambda<T: Scalar, C: Coeff<Real = T>>(
    p: &ModelParams<T>,
    u: &CosineSeries<C>,
    c: &ContinuationChoice<T>,
    consts: &EmbeddingConstants<T>,
) -> Result<LipschitzBounds<T>> {
    check_which(c, Param::Lambda)?;
    let u = u.to_interval();
    let f1 = p.f.derivative();
    let f2 = f1.derivative();
    let r = state_radius(&u, consts, c.du, T::zero())?.hi();
    let fmax1 = shifted_range_max(&f1, r, p.mu);
    let fmax2 = shifted_range_max(&f2, r, p.mu);
    let fp_sup = f1
        .eval_series(&u.add_constant(Interval::point(p.mu)))?
        .norm(NormTag::SupBound)?
        .hi();
    let inv_pi2 = pi_pow::<T>(-2);
    let sigma_term = Interval::point(p.sigma.abs()) * pi_pow::<T>(-4);
    let lam = Interval::point(p.lambda.abs()) + Interval::point(c.dp);
    let l1 = consts.cm_bar * Interval::point(fmax2) * lam * inv_pi2;
    let l2 = Interval::point(fp_sup) * inv_pi2 + sigma_term;
    let l3 = Interval::point(fmax1) * inv_pi2 + sigma_term;
    Ok(LipschitzBounds {
        l1: l1.hi(),
        l2: l2.hi(),
        l3: l3.hi(),
        l4: T::zero(),
        fmax1,
        fmax2,
    })
}

/// Variation of `σ`: `L1 = λ f2max C̄_m/π²`, `L2 = L3 = λ/π⁴`, `L4 = 0`.
pub fn bounds_sigma<T: Scalar, C: Coeff<Real = T>>(
    p: &ModelParams<T>,
    u: &CosineSeries<C>,
    c: &ContinuationChoice<T>,
    consts: &EmbeddingConstants<T>,
) -> Result<LipschitzBounds<T>> {
    check_which(c, Param::Sigma)?;
    let u = u.to_interval();
    let f1 = p.f.derivative();
    let f2 = f1.derivative();
    let r = state_radius(&u, consts, c.du, T::zero())?.hi();
    let fmax2 = shifted_range_max(&f2, r, p.mu);
    let lam = Interval::point(p.lambda.abs());
    let l1 = lam * Interval::point(fmax2) * consts.cm_bar * pi_pow::<T>(-2);
    let l23 = (lam * pi_pow::<T>(-4)).hi();
    Ok(LipschitzBounds {
        l1: l1.hi(),
        l2: l23,
        l3: l23,
        l4: T::zero(),
        fmax1: T::zero(),
        fmax2,
    })
}

/// Variation of `μ`, with `f2max_μ = max |f''(ρ)|` over
/// `|ρ| <= ‖u*+μ*‖_∞ + C̄_m d_u + d_μ`:
/// `L1 = λ f2max_μ C̄_m/π²`, `L2 = L3 = λ f2max_μ/π²`, `L4 = λ f2max_μ`.
pub fn bounds_mu<T: Scalar, C: Coeff<Real = T>>(
    p: &ModelParams<T>,
    u: &CosineSeries<C>,
    c: &ContinuationChoice<T>,
    consts: &EmbeddingConstants<T>,
) -> Result<LipschitzBounds<T>> {
    check_which(c, Param::Mu)?;
    let u = u.to_interval();
    let f2 = p.f.derivative().derivative();
    let r = (state_radius(&u, consts, c.du, p.mu)? + Interval::point(c.dp)).hi();
    let fmax2 = poly_range_max(&f2, r);
    let lf = Interval::point(p.lambda.abs()) * Interval::point(fmax2);
    let l1 = lf * consts.cm_bar * pi_pow::<T>(-2);
    let l23 = (lf * pi_pow::<T>(-2)).hi();
    Ok(LipschitzBounds {
        l1: l1.hi(),
        l2: l23,
        l3: l23,
        l4: lf.hi(),
        fmax1: T::zero(),
        fmax2,
    })
}

/// Dispatches on `c.which`.
pub fn lipschitz_bounds<T: Scalar, C: Coeff<Real = T>>(
    p: &ModelParams<T>,
    u: &CosineSeries<C>,
    c: &ContinuationChoice<T>,
    consts: &EmbeddingConstants<T>,
) -> Result<LipschitzBounds<T>> {
    match c.which {
        Param::Lambda => bounds_lambda(p, u, c, consts),
        Param::Sigma => bounds_sigma(p, u, c, consts),
        Param::Mu => bounds_mu(p, u, c, consts),
    }
}
