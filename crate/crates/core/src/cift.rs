//! Certificates from the constructive implicit function theorem.
//!
//! With residual bound `ρ`, inverse bound `K` and Lipschitz constants
//! `L1..L4` on the box `|α - α*| <= ℓ_α`, `‖x - x*‖ <= ℓ_x`, the theorem
//! needs `4K²ρL1 < 1`, `2Kρ < ℓ_x`, and then every pair `(δ_α, δ_x)` with
//!
//! ```text
//! 2K L1 δ_x + 2K L2 δ_α <= 1
//! 2Kρ + 2K L3 δ_α + 2K L4 δ_α² <= δ_x
//! ```
//!
//! gives a unique branch `x(α)` with `‖x(α) - x*‖ <= δ_x` for
//! `|α - α*| <= δ_α`.

use std::fmt;

use crate::embeddings::EmbeddingConstants;
use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::lipschitz::{lipschitz_bounds, ContinuationChoice, LipschitzBounds};
use crate::operator::{
    inverse_bound, inverse_bound_auto, n_ceiling, residual, InverseBound, ModelParams, Param,
    BASIS_ORDERING,
};
use crate::scalar::Scalar;
use crate::spectral::{Coeff, CosineSeries, NormTag};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const MIN_BISECTIONS: usize = 50;
const MAX_BISECTIONS: usize = 200;
const MAXIMALITY_REL: f64 = 1e-6;

/// Maximal-`δ_α` solution of the radii inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radii<T> {
    pub delta_alpha: T,
    /// Accuracy radius: rigorous upper bound of `2Kρ + 2KL3δ_α + 2KL4δ_α²`.
    pub delta_x: T,
    /// Uniqueness radius: largest admissible `δ_x` at `δ_alpha`, rounded down.
    pub delta_x_unique: T,
    /// Smallest `δ_α` seen to be infeasible, if `δ_alpha < ℓ_α`.
    pub witness: Option<T>,
}

fn pt<T: Scalar>(x: T) -> Interval<T> {
    Interval::point(x)
}

fn two<T: Scalar>() -> Interval<T> {
    Interval::from_usize(2)
}

/// Enclosure of `2Kρ + 2K L3 a + 2K L4 a²`.
fn lower_curve<T: Scalar>(k: T, rho: T, l3: T, l4: T, a: T) -> Interval<T> {
    let tk = two::<T>() * pt(k);
    tk * pt(rho) + tk * pt(l3) * pt(a) + tk * pt(l4) * pt(a).sqr()
}

/// Rigorous test of the pair `(a, x)` against both radii inequalities and
/// the box.
fn pair_ok<T: Scalar>(k: T, rho: T, l: &[T; 4], ell_x: T, ell_a: T, a: T, x: T) -> bool {
    let tk = two::<T>() * pt(k);
    let line = tk * pt(l[0]) * pt(x) + tk * pt(l[1]) * pt(a);
    let curve = lower_curve(k, rho, l[2], l[3], a);
    a >= T::zero() && a <= ell_a && x <= ell_x && line.hi() <= T::one() && curve.hi() <= x
}

/// `δ_α = a` is feasible when `x = g(a)` rounded up satisfies everything.
fn feasible<T: Scalar>(k: T, rho: T, l: &[T; 4], ell_x: T, ell_a: T, a: T) -> bool {
    let x = lower_curve(k, rho, l[2], l[3], a).hi();
    pair_ok(k, rho, l, ell_x, ell_a, a, x)
}

/// Checks `4K²ρL1 < 1` and `2Kρ < ℓ_x` rigorously.
pub fn check_preconditions<T: Scalar>(k: T, rho: T, l1: T, ell_x: T) -> Result<()> {
    let a = Interval::from_usize(4) * pt(k).sqr() * pt(rho) * pt(l1);
    if !(a.hi() < T::one()) {
        return Err(CoreError::Precondition(format!(
            "4K²ρL1 = {:e} is not below 1",
            a.hi().to_f64().unwrap_or(f64::NAN)
        )));
    }
    let b = two::<T>() * pt(k) * pt(rho);
    if !(b.hi() < ell_x) {
        return Err(CoreError::Precondition(format!(
            "2Kρ = {:e} is not below ℓ_x = {:e}",
            b.hi().to_f64().unwrap_or(f64::NAN),
            ell_x.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Largest `δ_α <= ℓ_α` such that the pair `(δ_α, g(δ_α))` satisfies the
/// radii inequalities, by bisection on a rigorous feasibility test.
///
/// Bisection runs at least 50 steps and continues until the infeasible end
/// of the bracket is within `1e-6` relative of the feasible end.
pub fn solve_radii<T: Scalar>(
    k: T,
    rho: T,
    l: [T; 4],
    ell_x: T,
    ell_alpha: T,
) -> Result<Radii<T>> {
    let all = [k, rho, l[0], l[1], l[2], l[3], ell_x, ell_alpha];
    if all.iter().any(|v| !v.is_finite() || *v < T::zero()) || !(ell_x > T::zero()) {
        return Err(CoreError::InvalidArgument(
            "radii inputs must be finite and non-negative, with ℓ_x > 0".into(),
        ));
    }
    check_preconditions(k, rho, l[0], ell_x)?;
    if !feasible(k, rho, &l, ell_x, ell_alpha, T::zero()) {
        return Err(CoreError::Precondition(
            "no admissible radius even at δ_α = 0 after rounding".into(),
        ));
    }
    let (delta_alpha, witness) = if feasible(k, rho, &l, ell_x, ell_alpha, ell_alpha) {
        (ell_alpha, None)
    } else {
        let half = T::from_f64_lossy(0.5);
        let rel = T::from_f64_lossy(MAXIMALITY_REL);
        let (mut lo, mut hi) = (T::zero(), ell_alpha);
        for i in 0..MAX_BISECTIONS {
            if i >= MIN_BISECTIONS && hi - lo <= rel * lo {
                break;
            }
            let mid = lo + (hi - lo) * half;
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(k, rho, &l, ell_x, ell_alpha, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, Some(hi))
    };
    let delta_x = lower_curve(k, rho, l[2], l[3], delta_alpha).hi();
    Ok(Radii {
        delta_alpha,
        delta_x,
        delta_x_unique: uniqueness_radius(k, rho, &l, ell_x, ell_alpha, delta_alpha, delta_x),
        witness,
    })
}

/// `min(ℓ_x, (1 - 2KL2δ_α)/(2KL1))` rounded down until the pair passes.
fn uniqueness_radius<T: Scalar>(
    k: T,
    rho: T,
    l: &[T; 4],
    ell_x: T,
    ell_a: T,
    a: T,
    fallback: T,
) -> T {
    let tk = two::<T>() * pt(k);
    let mut x = if l[0] == T::zero() {
        ell_x
    } else {
        let num = Interval::one() - tk * pt(l[1]) * pt(a);
        match num.checked_div(&(tk * pt(l[0]))) {
            Ok(v) => v.lo().min(ell_x),
            Err(_) => return fallback,
        }
    };
    for _ in 0..16 {
        if pair_ok(k, rho, l, ell_x, ell_a, a, x) {
            return x;
        }
        x = x.next_down();
    }
    fallback
}

/// Pipeline stage at which a validation failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Residual,
    InverseBound,
    Lipschitz,
    Radii,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Residual => "residual",
            Stage::InverseBound => "inverse_bound",
            Stage::Lipschitz => "lipschitz",
            Stage::Radii => "radii",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Stage {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residual" => Ok(Stage::Residual),
            "inverse_bound" => Ok(Stage::InverseBound),
            "lipschitz" => Ok(Stage::Lipschitz),
            "radii" => Ok(Stage::Radii),
            _ => Err(CoreError::InvalidArgument(format!("unknown stage '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Valid,
    /// All inequalities hold but only with `δ_α = 0`.
    PointOnly,
    Invalid { stage: Stage, reason: String },
}

impl Status {
    pub fn is_valid(&self) -> bool {
        matches!(self, Status::Valid)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Status::Valid => "valid",
            Status::PointOnly => "point_only",
            Status::Invalid { .. } => "invalid",
        }
    }
}

/// Full validation record. Stage outputs are `None` when the pipeline
/// stopped earlier.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<T> {
    pub params: ModelParams<T>,
    pub which: Param,
    /// `ℓ_α`: the parameter box radius the Lipschitz constants cover.
    pub ell_alpha: T,
    /// `ℓ_x`: the state box radius the Lipschitz constants cover.
    pub ell_x: T,
    pub dim: usize,
    pub ordering: String,
    pub tool_version: String,
    pub rho: Option<T>,
    pub inverse: Option<InverseBound<T>>,
    pub lipschitz: Option<LipschitzBounds<T>>,
    pub radii: Option<Radii<T>>,
    /// Larger truncation worth trying after a failed inverse bound.
    pub suggested_n: Option<usize>,
    pub status: Status,
}

impl<T: Scalar> Certificate<T> {
    pub fn is_valid(&self) -> bool {
        self.status.is_valid()
    }

    pub fn n(&self) -> Option<usize> {
        self.inverse.as_ref().map(|i| i.n)
    }

    pub fn k(&self) -> Option<T> {
        self.inverse.as_ref().map(|i| i.k)
    }

    pub fn delta_alpha(&self) -> Option<T> {
        self.radii.as_ref().map(|r| r.delta_alpha)
    }

    pub fn delta_x(&self) -> Option<T> {
        self.radii.as_ref().map(|r| r.delta_x)
    }
}

/// Re-evaluates every inequality a valid certificate claims, from the
/// stored numbers only. Returns the list of violated conditions.
pub fn check_certificate<T: Scalar>(c: &Certificate<T>) -> std::result::Result<(), Vec<String>> {
    let mut bad = Vec::new();
    let (Some(rho), Some(inv), Some(lb), Some(r)) = (c.rho, c.inverse, c.lipschitz, c.radii) else {
        return Err(vec!["certificate lacks residual, inverse, Lipschitz or radii data".into()]);
    };
    let one = Interval::<T>::one();
    let zero = T::zero();
    let k = Interval::point(inv.k);
    let rho_i = Interval::point(rho);
    let two = Interval::<T>::from_usize(2);
    let four = Interval::<T>::from_usize(4);
    let mut need = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    let vals = [rho, inv.k, lb.l1, lb.l2, lb.l3, lb.l4, c.ell_x, c.ell_alpha, r.delta_alpha, r.delta_x, r.delta_x_unique];
    need(vals.iter().all(|v| v.is_finite() && *v >= zero), "all constants finite and non-negative");
    need(inv.tau < T::one(), "τ < 1");
    let k_floor = Interval::point(inv.kn.max(T::one()))
        .checked_div(&(one - Interval::point(inv.tau)))
        .map(|v| v.lo())
        .unwrap_or(T::infinity());
    need(inv.k >= k_floor, "K >= max(K_N, 1)/(1 - τ)");
    need((four * k.sqr() * rho_i * Interval::point(lb.l1)).hi() < T::one(), "4K²ρL1 < 1");
    need((two * k * rho_i).hi() < c.ell_x, "2Kρ < ℓ_x");
    need(r.delta_alpha <= c.ell_alpha, "δ_α <= ℓ_α");
    let a = Interval::point(r.delta_alpha);
    let lower = two * k * rho_i
        + two * k * Interval::point(lb.l3) * a
        + two * k * Interval::point(lb.l4) * a.sqr();
    for (x, label) in [(r.delta_x, "accuracy"), (r.delta_x_unique, "uniqueness")] {
        let xi = Interval::point(x);
        let line = two * k * Interval::point(lb.l1) * xi + two * k * Interval::point(lb.l2) * a;
        need(line.hi() <= T::one(), &format!("2KL1δ_x + 2KL2δ_α <= 1 ({label})"));
        need(lower.hi() <= x, &format!("2Kρ + 2KL3δ_α + 2KL4δ_α² <= δ_x ({label})"));
        need(x <= c.ell_x, &format!("δ_x <= ℓ_x ({label})"));
    }
    need(r.delta_x_unique > zero, "δ_x > 0 (uniqueness)");
    if c.status == Status::Valid {
        need(r.delta_alpha > zero, "δ_α > 0 for a valid certificate");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Settings for [`validate`]. `None` fields take the defaults.
#[derive(Clone, Debug)]
pub struct ValidateOptions<T> {
    /// Fixed truncation; automatic choice when `None`.
    pub n: Option<usize>,
    /// Largest truncation for the automatic choice.
    pub n_max: Option<usize>,
    /// Initial `d_p`; default `0.05 max(1, |p*|)`.
    pub dp: Option<T>,
    /// Initial `d_u`; default `0.1 max(1, ‖u*‖_{H̄²})`.
    pub du: Option<T>,
    /// Run the box-consistency loop.
    pub adapt_box: bool,
    pub consts: EmbeddingConstants<T>,
}

impl<T: Scalar> ValidateOptions<T> {
    pub fn new(consts: EmbeddingConstants<T>) -> Self {
        Self {
            n: None,
            n_max: None,
            dp: None,
            du: None,
            adapt_box: true,
            consts,
        }
    }
}

const MAX_ROUNDS: usize = 5;
const MAX_TIGHTEN: usize = 2;

/// Runs residual, inverse bound, Lipschitz constants and radii for the
/// approximate equilibrium `u` at `p`, varying `which`.
///
/// Stage failures give an invalid certificate; malformed input is an error.
/// With `adapt_box`, the box `(d_p, d_u)` is enlarged while a radius sits
/// on its edge, then shrunk once towards the concluded radii; the result
/// with the largest `δ_α` is kept. Every certificate returned satisfies
/// `δ_α <= d_p` and `δ_x <= d_u` for the box its constants were built on.
pub fn validate<T: Scalar, C: Coeff<Real = T>>(
    p: &ModelParams<T>,
    u: &CosineSeries<C>,
    which: Param,
    opts: &ValidateOptions<T>,
) -> Result<Certificate<T>> {
    if opts.consts.dim != u.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "constants for d = {}, solution in d = {}",
            opts.consts.dim,
            u.dim()
        )));
    }
    if !u.is_zero_mean() {
        return Err(CoreError::NonzeroMean);
    }
    let u = u.to_interval();
    let one = T::one();
    let unorm = u.norm(NormTag::HbarL(2))?.hi();
    let du0 = opts
        .du
        .unwrap_or_else(|| T::from_f64_lossy(0.1) * one.max(unorm));
    let dp0 = opts
        .dp
        .unwrap_or_else(|| T::from_f64_lossy(0.05) * one.max(p.get(which).abs()));
    ContinuationChoice::new(which, dp0, du0)?;

    let mut cert = Certificate {
        params: p.clone(),
        which,
        ell_alpha: dp0,
        ell_x: du0,
        dim: u.dim(),
        ordering: BASIS_ORDERING.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        rho: None,
        inverse: None,
        lipschitz: None,
        radii: None,
        suggested_n: None,
        status: Status::Valid,
    };
    let fail = |mut c: Certificate<T>, stage, reason: String| {
        c.status = Status::Invalid { stage, reason };
        c
    };

    let rho = match residual(p, &u) {
        Ok(r) if r.hi().is_finite() => r.hi(),
        Ok(_) => return Ok(fail(cert, Stage::Residual, "residual bound is not finite".into())),
        Err(e) => return Ok(fail(cert, Stage::Residual, e.to_string())),
    };
    cert.rho = Some(rho);

    let inv = match opts.n {
        Some(n) => inverse_bound(p, &u, n, &opts.consts),
        None => inverse_bound_auto(
            p,
            &u,
            &opts.consts,
            opts.n_max.unwrap_or_else(|| n_ceiling(u.dim())),
        ),
    };
    let inv = match inv {
        Ok(i) => i,
        Err(e) => {
            if let CoreError::TauTooLarge { suggested_n, .. } = e {
                cert.suggested_n = Some(suggested_n);
            }
            return Ok(fail(cert, Stage::InverseBound, e.to_string()));
        }
    };
    cert.inverse = Some(inv);

    let attempt = |dp: T, du: T| -> Certificate<T> {
        let mut c = cert.clone();
        c.ell_alpha = dp;
        c.ell_x = du;
        let choice = match ContinuationChoice::new(which, dp, du) {
            Ok(ch) => ch,
            Err(e) => return fail(c, Stage::Lipschitz, e.to_string()),
        };
        let lb = match lipschitz_bounds(p, &u, &choice, &opts.consts) {
            Ok(lb) => lb,
            Err(e) => return fail(c, Stage::Lipschitz, e.to_string()),
        };
        c.lipschitz = Some(lb);
        match solve_radii(inv.k, rho, [lb.l1, lb.l2, lb.l3, lb.l4], du, dp) {
            Ok(r) => {
                c.status = if r.delta_alpha > T::zero() {
                    Status::Valid
                } else {
                    Status::PointOnly
                };
                c.radii = Some(r);
                c
            }
            Err(e) => fail(c, Stage::Radii, e.to_string()),
        }
    };

    let score = |c: &Certificate<T>| match (&c.status, c.radii) {
        (Status::Valid, Some(r)) => r.delta_alpha,
        _ => -one,
    };
    let mut best = attempt(dp0, du0);
    if !opts.adapt_box {
        return Ok(best);
    }
    // Grow the box while a radius sits on its edge; once interior, shrink
    // it towards the concluded radii (smaller f-ranges give smaller
    // constants) and grow again if that caps δ_α.
    let (two, four) = (T::from_f64_lossy(2.0), T::from_f64_lossy(4.0));
    let (mut dp, mut du) = (dp0, du0);
    let (mut grown, mut tightened) = (0, 0);
    let mut current = best.clone();
    while let Some(r) = current.radii.filter(|_| current.is_valid()) {
        let capped_alpha = r.witness.is_none();
        let capped_x = r.delta_x_unique >= du;
        if capped_alpha || capped_x {
            if grown == MAX_ROUNDS {
                break;
            }
            grown += 1;
            if capped_alpha {
                dp = dp * four;
            }
            if capped_x {
                du = du * two;
            }
        } else {
            let du_t = (two * r.delta_x_unique).min(du);
            let dp_t = (two * r.delta_alpha).min(dp);
            if tightened == MAX_TIGHTEN || (du_t >= du && dp_t >= dp) {
                break;
            }
            tightened += 1;
            du = du_t;
            dp = dp_t;
        }
        current = attempt(dp, du);
        if score(&current) > score(&best) {
            best = current.clone();
        }
    }
    Ok(best)
}
