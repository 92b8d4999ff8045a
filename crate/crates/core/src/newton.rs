//! Floating-point Galerkin Newton iteration for approximate equilibria, and
//! naive natural-parameter stepping. Nothing here is rigorous; the output
//! is a candidate for validation.

use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::linalg::Lu;
use crate::operator::{galerkin_basis, jacobian_matrix, operator_series, ModelParams, Param};
use crate::scalar::Scalar;
use crate::spectral::{pi_pow, CosineSeries, MultiIndex, NormTag, PointCoeff};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions<T> {
    /// Truncation: unknowns are the modes with `0 < |k|_∞ < n`.
    pub n: usize,
    pub max_iter: usize,
    /// Target for the `H̄^{-2}` norm of the projected residual.
    pub tol_residual: T,
    /// Initial step length of the damped iteration (`1` is plain Newton).
    pub damping: T,
}

impl<T: PointCoeff> SolveOptions<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            max_iter: 60,
            tol_residual: T::from_f64_lossy(1e-10),
            damping: <T as One>::one(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(CoreError::InvalidArgument("truncation N must be at least 2".into()));
        }
        if !(self.tol_residual > <T as Zero>::zero()) {
            return Err(CoreError::InvalidArgument("residual tolerance must be positive".into()));
        }
        if !(self.damping > <T as Zero>::zero() && self.damping <= <T as One>::one()) {
            return Err(CoreError::InvalidArgument("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonResult<T> {
    pub u: CosineSeries<T>,
    pub iterations: usize,
    /// `‖P_N F(p,u)‖_{H̄^{-2}}` in floating point.
    pub projected_residual: T,
    /// `‖F(p,u)‖_{H̄^{-2}}` including the modes beyond the truncation.
    pub residual: T,
}

/// Sum of `amplitude · φ_k` terms.
pub fn seed_series<T: PointCoeff>(dim: usize, modes: &[(MultiIndex, T)]) -> Result<CosineSeries<T>> {
    let mut u = CosineSeries::zeros_cube(dim, 1)?;
    for (k, a) in modes {
        if k.dim() != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "mode {k} in dimension {dim}"
            )));
        }
        u = u.add(&CosineSeries::mode(k, *a)?)?;
    }
    Ok(u.without_mean())
}

fn float_norm<T: PointCoeff>(s: &CosineSeries<T>) -> Result<T> {
    Ok(s.norm(NormTag::HbarL(-2))?.mid())
}

/// Projected residual vector on `basis` and its `H̄^{-2}` norm.
fn projected<T: PointCoeff>(
    p: &ModelParams<T>,
    u: &CosineSeries<T>,
    basis: &[MultiIndex],
) -> Result<(Vec<T>, T, CosineSeries<T>)> {
    let f = operator_series(p, u)?;
    let inv_pi4 = pi_pow::<T>(-4).mid();
    let r: Vec<T> = basis.iter().map(|k| f.get(k)).collect();
    let norm = basis
        .iter()
        .zip(&r)
        .fold(<T as Zero>::zero(), |acc, (k, &v)| {
            let n = <T as Scalar>::from_usize(k.norm_sq());
            acc + v * v * inv_pi4 / (n * n)
        })
        .sqrt();
    Ok((r, norm, f))
}

/// Damped Newton iteration for `P_N F(p, u) = 0` starting from `u0`.
///
/// Each step solves with the Galerkin Jacobian and halves the step until
/// the projected residual decreases. Converges when the projected residual
/// is at most `opts.tol_residual`.
pub fn newton_solve<T: PointCoeff>(
    p: &ModelParams<T>,
    u0: &CosineSeries<T>,
    opts: &SolveOptions<T>,
) -> Result<NewtonResult<T>> {
    opts.check()?;
    if !u0.is_zero_mean() {
        return Err(CoreError::NonzeroMean);
    }
    let dim = u0.dim();
    let n = opts.n;
    let basis = galerkin_basis(dim, n)?;
    let mut u = u0.resized(&vec![n; dim])?;
    let (mut r, mut res, mut full) = projected(p, &u, &basis)?;
    let half = T::from_f64_lossy(0.5);
    for it in 0..=opts.max_iter {
        if !res.is_finite() {
            break;
        }
        if res <= opts.tol_residual {
            return Ok(NewtonResult {
                residual: float_norm(&full)?,
                u,
                iterations: it,
                projected_residual: res,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let q = p
            .f
            .derivative()
            .eval_series(&u.add_constant(p.mu))?
            .scale(p.lambda);
        let jac = jacobian_matrix(p, &q, &basis);
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let step = Lu::new(basis.len(), jac)?.solve(&rhs)?;
        let mut t = opts.damping;
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = u.clone();
            for (k, &s) in basis.iter().zip(&step) {
                trial.set(k, trial.get(k) + t * s);
            }
            let (r_t, res_t, full_t) = projected(p, &trial, &basis)?;
            if res_t.is_finite() && res_t < res {
                accepted = Some((trial, r_t, res_t, full_t));
                break;
            }
            t = t * half;
        }
        match accepted {
            Some((trial, r_t, res_t, full_t)) => {
                u = trial;
                r = r_t;
                res = res_t;
                full = full_t;
            }
            None => {
                // No decrease along the Newton direction: either converged to
                // rounding level or stuck.
                if res <= opts.tol_residual * T::from_f64_lossy(100.0) {
                    return Ok(NewtonResult {
                        residual: float_norm(&full)?,
                        u,
                        iterations: it,
                        projected_residual: res,
                    });
                }
                return Err(CoreError::NewtonDiverged {
                    iterations: it,
                    residual: res.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Err(CoreError::NewtonDiverged {
        iterations: opts.max_iter,
        residual: res.to_f64().unwrap_or(f64::NAN),
    })
}

/// Natural-parameter continuation: solves at `p0`, then at
/// `p0 + i·step` for `i = 1..=count`, each time starting from the previous
/// solution. Stops at the first Newton failure after the initial solve.
pub fn parameter_walk<T: PointCoeff>(
    p0: &ModelParams<T>,
    u0: &CosineSeries<T>,
    which: Param,
    step: T,
    count: usize,
    opts: &SolveOptions<T>,
) -> Result<Vec<(ModelParams<T>, NewtonResult<T>)>> {
    if count > 0 && step == <T as Zero>::zero() {
        return Err(CoreError::InvalidArgument("walk step must be non-zero".into()));
    }
    let first = newton_solve(p0, u0, opts)?;
    let mut out = vec![(p0.clone(), first)];
    let start = p0.get(which);
    for i in 1..=count {
        let value = start + step * <T as Scalar>::from_usize(i);
        let p = match p0.with(which, value) {
            Ok(p) => p,
            Err(_) => break,
        };
        let prev = &out.last().expect("non-empty").1.u;
        match newton_solve(&p, prev, opts) {
            Ok(r) => out.push((p, r)),
            Err(_) => break,
        }
    }
    Ok(out)
}

/// Floating-point `‖F(p,u)‖_{H̄^{-2}}`.
pub fn float_residual<T: PointCoeff>(p: &ModelParams<T>, u: &CosineSeries<T>) -> Result<T> {
    float_norm(&operator_series(p, u)?)
}
