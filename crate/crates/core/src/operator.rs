//! The equilibrium operator `F(λ,σ,μ,u) = -Δ(Δu + λ f(u+μ)) - λσu` on
//! zero-mean cosine series, its linearisation, and rigorous bounds on the
//! inverse of the linearisation as a map `H̄^{-2} → H̄²`.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::embeddings::EmbeddingConstants;
use crate::error::{CoreError, Result};
use crate::interval::{spectral_norm_estimate, Interval, IntervalMatrix};
use crate::linalg::Lu;
use crate::polynomial::Polynomial;
use crate::scalar::Scalar;
use crate::spectral::{
    axis_terms, check_dim, inv_sqrt2_pow, pi_pow, Coeff, CosineSeries, MultiIndex, NormTag,
};

/// Tag recorded in certificates for the basis enumeration.
pub const BASIS_ORDERING: &str = "lexicographic";

/// Model parameters `(λ, σ, μ)` and the nonlinearity `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub lambda: T,
    pub sigma: T,
    pub mu: T,
    pub f: Polynomial<T>,
}

impl<T: Scalar> ModelParams<T> {
    /// Parameters with the default nonlinearity `f(u) = u - u³`.
    pub fn new(lambda: T, sigma: T, mu: T) -> Result<Self> {
        Self::with_nonlinearity(lambda, sigma, mu, Polynomial::cubic())
    }

    pub fn with_nonlinearity(lambda: T, sigma: T, mu: T, f: Polynomial<T>) -> Result<Self> {
        if !(lambda.is_finite() && sigma.is_finite() && mu.is_finite()) {
            return Err(CoreError::InvalidArgument("parameters must be finite".into()));
        }
        if lambda <= T::zero() {
            return Err(CoreError::InvalidArgument("lambda must be positive".into()));
        }
        if sigma < T::zero() {
            return Err(CoreError::InvalidArgument("sigma must be non-negative".into()));
        }
        Ok(Self { lambda, sigma, mu, f })
    }
}

/// The parameter varied in a continuation or validation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Lambda,
    Sigma,
    Mu,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Lambda, Param::Sigma, Param::Mu];

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "lambda",
            Param::Sigma => "sigma",
            Param::Mu => "mu",
        }
    }
}

impl std::str::FromStr for Param {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Param::Lambda),
            "sigma" => Ok(Param::Sigma),
            "mu" => Ok(Param::Mu),
            _ => Err(CoreError::InvalidArgument(format!(
                "unknown parameter '{s}' (expected lambda, sigma or mu)"
            ))),
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    pub fn get(&self, which: Param) -> T {
        match which {
            Param::Lambda => self.lambda,
            Param::Sigma => self.sigma,
            Param::Mu => self.mu,
        }
    }

    /// Copy with one parameter replaced (validated like [`ModelParams::new`]).
    pub fn with(&self, which: Param, value: T) -> Result<Self> {
        let mut out = self.clone();
        match which {
            Param::Lambda => out.lambda = value,
            Param::Sigma => out.sigma = value,
            Param::Mu => out.mu = value,
        }
        Self::with_nonlinearity(out.lambda, out.sigma, out.mu, out.f)
    }
}

fn require_zero_mean<C: Coeff>(u: &CosineSeries<C>) -> Result<()> {
    if u.is_zero_mean() {
        Ok(())
    } else {
        Err(CoreError::NonzeroMean)
    }
}

/// `F(p, u)` as an exact cosine series. The `k = 0` coefficient is zero.
pub fn operator_series<C: Coeff>(
    p: &ModelParams<C::Real>,
    u: &CosineSeries<C>,
) -> Result<CosineSeries<C>> {
    require_zero_mean(u)?;
    let g = p.f.eval_series(&u.add_constant(C::from_real(p.mu)))?;
    let extent: Vec<usize> = (0..u.dim())
        .map(|a| g.extent()[a].max(u.extent()[a]))
        .collect();
    let g = g.resized(&extent)?;
    let lambda = Interval::point(p.lambda);
    let lambda_sigma = C::from_interval(lambda * Interval::point(p.sigma));
    let lambda = C::from_interval(lambda);
    let pi2 = pi_pow::<C::Real>(2);
    let pi4 = pi_pow::<C::Real>(4);
    Ok(g.map(|k, gk| {
        let n = k.norm_sq();
        if n == 0 {
            return C::zero();
        }
        let nn = Interval::from_usize(n);
        let kappa = C::from_interval(pi2 * nn);
        let kappa2 = C::from_interval(pi4 * nn.sqr());
        let a = u.get(&k);
        lambda * kappa * gk - (kappa2 + lambda_sigma) * a
    }))
}

/// Rigorous residual: enclosure of `‖F(p,u)‖_{H̄^{-2}}`. Its upper end is `ρ`.
pub fn residual<C: Coeff>(p: &ModelParams<C::Real>, u: &CosineSeries<C>) -> Result<Interval<C::Real>> {
    operator_series(p, &u.to_interval())?.norm(NormTag::HbarL(-2))
}

/// `q = λ f'(u + μ)` together with the bounds entering the inverse estimate.
#[derive(Clone, Debug)]
pub struct QSeries<C: Coeff> {
    pub q: CosineSeries<C>,
    /// Upper bound on `‖q‖_∞` (the `ℓ¹` bound `Σ |q_k| c_k`).
    pub sup: C::Real,
    /// Upper bound on `‖q‖_{H²}`.
    pub h2: C::Real,
}

pub fn q_series<C: Coeff>(p: &ModelParams<C::Real>, u: &CosineSeries<C>) -> Result<QSeries<C>> {
    let fp = p.f.derivative();
    let q = fp
        .eval_series(&u.add_constant(C::from_real(p.mu)))?
        .scale(C::from_real(p.lambda));
    let sup = q.norm(NormTag::SupBound)?.hi();
    let h2 = q.norm(NormTag::HL(2))?.hi();
    Ok(QSeries { q, sup, h2 })
}

/// The multi-indices `0 < |k|_∞ < N` in lexicographic order.
pub fn galerkin_basis(dim: usize, n: usize) -> Result<Vec<MultiIndex>> {
    check_dim(dim)?;
    if n < 2 {
        return Err(CoreError::InvalidArgument("truncation N must be at least 2".into()));
    }
    let total = n.pow(dim as u32);
    let mut out = Vec::with_capacity(total - 1);
    for i in 1..total {
        let mut k = [0usize; 3];
        let mut r = i;
        for a in (0..dim).rev() {
            k[a] = r % n;
            r /= n;
        }
        out.push(MultiIndex::new(&k[..dim])?);
    }
    Ok(out)
}

/// Row-major matrix of `(q φ_l, φ_k)_{L²}` with rows `k` and columns `l`
/// drawn from `basis`. Each entry is a short signed combination of `q`'s
/// coefficients read off by index arithmetic.
pub fn inner_product_matrix<C: Coeff>(q: &CosineSeries<C>, basis: &[MultiIndex]) -> Vec<C> {
    let dim = q.dim();
    let weights: Vec<C> = (0..=dim)
        .map(|m| C::from_interval(inv_sqrt2_pow::<C::Real>(m)))
        .collect();
    let n = basis.len();
    let mut out = vec![C::zero(); n * n];
    out.par_chunks_mut(n.max(1))
        .zip(basis.par_iter())
        .for_each(|(row, k)| {
            let kc = k.components();
            for (entry, l) in row.iter_mut().zip(basis) {
                let lc = l.components();
                let t: Vec<_> = (0..dim).map(|a| axis_terms(kc[a], lc[a])).collect();
                let mut bins = [C::zero(); 4];
                let mut m = [0usize; 3];
                let t1 = if dim > 1 { t[1].terms() } else { &[(0, 0)][..] };
                let t2 = if dim > 2 { t[2].terms() } else { &[(0, 0)][..] };
                for &(m0, w0) in t[0].terms() {
                    m[0] = m0;
                    for &(m1, w1) in t1 {
                        m[1] = m1;
                        for &(m2, w2) in t2 {
                            m[2] = m2;
                            let idx = MultiIndex::new(&m[..dim]).expect("valid dimension");
                            let c = q.get(&idx);
                            let w = (w0 + w1 + w2) as usize;
                            bins[w] = bins[w] + c;
                        }
                    }
                }
                let mut total = bins[0];
                for w in 1..=dim {
                    if !bins[w].is_zero() {
                        total = total + bins[w] * weights[w];
                    }
                }
                *entry = total;
            }
        });
    out
}

/// Unscaled Galerkin Jacobian `b_{kl} = -(κ_k² + λσ)δ_{kl} + κ_k (q φ_l, φ_k)`,
/// i.e. the matrix of `P_N D_uF` in coefficient space.
pub fn jacobian_matrix<C: Coeff>(
    p: &ModelParams<C::Real>,
    q: &CosineSeries<C>,
    basis: &[MultiIndex],
) -> Vec<C> {
    let n = basis.len();
    let mut m = inner_product_matrix(q, basis);
    let pi2 = pi_pow::<C::Real>(2);
    let pi4 = pi_pow::<C::Real>(4);
    let lambda_sigma = Interval::point(p.lambda) * Interval::point(p.sigma);
    m.par_chunks_mut(n.max(1))
        .zip(basis.par_iter())
        .enumerate()
        .for_each(|(i, (row, k))| {
            let nn = Interval::from_usize(k.norm_sq());
            let kappa = C::from_interval(pi2 * nn);
            for v in row.iter_mut() {
                *v = kappa * *v;
            }
            row[i] = row[i] - C::from_interval(pi4 * nn.sqr() + lambda_sigma);
        });
    m
}

/// The scaled Galerkin matrix `B̃` with entries
/// `b̃_{kl} = -(1 + λσ/κ_k²)δ_{kl} + (q φ_l, φ_k)/κ_l`.
#[derive(Clone, Debug)]
pub struct GalerkinMatrix<T> {
    pub n: usize,
    pub dim: usize,
    pub basis: Vec<MultiIndex>,
    pub entries: IntervalMatrix<T>,
}

impl<T: Scalar> GalerkinMatrix<T> {
    pub fn size(&self) -> usize {
        self.basis.len()
    }
}

/// Assembles `B̃` from an interval enclosure of `q`.
pub fn galerkin_from_q<T: Scalar>(
    p: &ModelParams<T>,
    q: &CosineSeries<Interval<T>>,
    n: usize,
) -> Result<GalerkinMatrix<T>> {
    let dim = q.dim();
    let basis = galerkin_basis(dim, n)?;
    let size = basis.len();
    let mut m = inner_product_matrix(q, &basis);
    let pi2 = pi_pow::<T>(2);
    let pi4 = pi_pow::<T>(4);
    let inv_kappa: Vec<Interval<T>> = basis
        .iter()
        .map(|l| {
            (pi2 * Interval::from_usize(l.norm_sq()))
                .recip()
                .expect("κ > 0 off the mean mode")
        })
        .collect();
    let lambda_sigma = Interval::point(p.lambda) * Interval::point(p.sigma);
    m.par_chunks_mut(size.max(1))
        .zip(basis.par_iter())
        .enumerate()
        .for_each(|(i, (row, k))| {
            for (v, &ik) in row.iter_mut().zip(&inv_kappa) {
                *v = *v * ik;
            }
            let kappa2 = pi4 * Interval::from_usize(k.norm_sq()).sqr();
            let diag = Interval::one() + lambda_sigma.checked_div(&kappa2).expect("κ > 0");
            row[i] = row[i] - diag;
        });
    Ok(GalerkinMatrix {
        n,
        dim,
        basis,
        entries: IntervalMatrix::new(size, size, m)?,
    })
}

pub fn build_galerkin<C: Coeff>(
    p: &ModelParams<C::Real>,
    u: &CosineSeries<C>,
    n: usize,
) -> Result<GalerkinMatrix<C::Real>> {
    require_zero_mean(u)?;
    let q = q_series(p, &u.to_interval())?;
    galerkin_from_q(p, &q.q, n)
}

/// Outcome of certifying `‖B̃^{-1}‖₂ <= K_N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteInverseBound<T> {
    pub kn: T,
    /// Upper bound on `‖C B̃ - I‖₂` for the approximate inverse `C`.
    pub defect: T,
    /// Upper bound on `‖C‖₂`.
    pub approx_inverse_norm: T,
}

/// Rigorous `K_N >= ‖M^{-1}‖₂` for every `M ∈ b`, via an approximate
/// inverse and a Neumann series argument.
pub fn kn_bound<T: Scalar>(b: &IntervalMatrix<T>) -> Result<FiniteInverseBound<T>> {
    let n = b.rows();
    if n != b.cols() {
        return Err(CoreError::DimensionMismatch("Galerkin matrix is not square".into()));
    }
    let mid = b.mid();
    let c = Lu::new(n, mid)?.inverse()?;
    let cm = IntervalMatrix::from_points(n, n, &c)?;
    let defect_matrix = cm.mul_mid_rad(b)?.sub_identity()?;
    let mut e = defect_matrix.norm_2_upper(false);
    if e >= T::from_f64_lossy(0.5) {
        e = e.min(defect_matrix.norm_2_upper(true));
    }
    if !(e < T::one()) {
        return Err(CoreError::FiniteInverseNotCertified {
            residual_norm: e.to_f64().unwrap_or(f64::INFINITY),
            size: n,
        });
    }
    let cheap = cm.norm_2_cheap_upper();
    let estimate = spectral_norm_estimate(n, n, &c, 60);
    let cnorm = if cheap > estimate * T::from_f64_lossy(1.1) {
        cheap.min(cm.norm_2_gershgorin_upper())
    } else {
        cheap
    };
    let kn = Interval::point(cnorm)
        .checked_div(&(Interval::one() - Interval::point(e)))
        .expect("e < 1")
        .hi();
    Ok(FiniteInverseBound {
        kn,
        defect: e,
        approx_inverse_norm: cnorm,
    })
}

/// Rigorous bound `K >= ‖D_uF(p,u)^{-1}‖` as a map `H̄^{-2} → H̄²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseBound<T> {
    pub kn: T,
    pub tau: T,
    pub k: T,
    pub n: usize,
    pub q_sup: T,
    pub q_h2: T,
    pub defect: T,
}

/// `τ = (π²N²)^{-1} √(K_N² ‖q‖_∞² + C_b² (1+π⁴)/π⁴ ‖q‖_{H²}²)`, enclosed.
pub fn tau<T: Scalar>(kn: T, q_sup: T, q_h2: T, cb: T, n: usize) -> Interval<T> {
    let pi4 = pi_pow::<T>(4);
    let ratio = (Interval::one() + pi4).checked_div(&pi4).expect("π⁴ > 0");
    let a = (Interval::point(kn) * Interval::point(q_sup)).sqr();
    let b = Interval::point(cb).sqr() * ratio * Interval::point(q_h2).sqr();
    let denom = pi_pow::<T>(2) * Interval::from_usize(n).sqr();
    (a + b)
        .sqrt()
        .expect("non-negative")
        .checked_div(&denom)
        .expect("N >= 1")
}

/// `K = max(K_N, 1)/(1 - τ)`, rounded upward.
pub fn k_from_tau<T: Scalar>(kn: T, tau: T) -> T {
    Interval::point(kn.max(T::one()))
        .checked_div(&(Interval::one() - Interval::point(tau)))
        .expect("τ < 1")
        .hi()
}

/// Suggested truncation for a failed `τ`: the larger of the `√‖q‖_{H²}`
/// rule of thumb and the `1/N²` extrapolation to `τ = 1/2`.
fn suggest_n<T: Scalar>(n: usize, tau: T, q_h2: T) -> usize {
    let t = tau.to_f64().unwrap_or(f64::INFINITY);
    let scaled = if t.is_finite() {
        (n as f64 * (t / 0.5).sqrt()).ceil() as usize
    } else {
        2 * n
    };
    let thumb = q_h2.to_f64().unwrap_or(0.0).sqrt().ceil() as usize;
    scaled.max(thumb).max(n + 1)
}

/// Inverse bound at a fixed truncation `N`.
pub fn inverse_bound<C: Coeff>(
    p: &ModelParams<C::Real>,
    u: &CosineSeries<C>,
    n: usize,
    consts: &EmbeddingConstants<C::Real>,
) -> Result<InverseBound<C::Real>> {
    require_zero_mean(u)?;
    let q = q_series(p, &u.to_interval())?;
    inverse_bound_from_q(p, &q, n, consts)
}

fn inverse_bound_from_q<T: Scalar>(
    p: &ModelParams<T>,
    q: &QSeries<Interval<T>>,
    n: usize,
    consts: &EmbeddingConstants<T>,
) -> Result<InverseBound<T>> {
    let b = galerkin_from_q(p, &q.q, n)?;
    let fin = kn_bound(&b.entries)?;
    let t = tau(fin.kn, q.sup, q.h2, consts.cb.hi(), n).hi();
    if !(t < T::one()) {
        return Err(CoreError::TauTooLarge {
            tau: t.to_f64().unwrap_or(f64::INFINITY),
            n,
            suggested_n: suggest_n(n, t, q.h2),
        });
    }
    Ok(InverseBound {
        kn: fin.kn,
        tau: t,
        k: k_from_tau(fin.kn, t),
        n,
        q_sup: q.sup,
        q_h2: q.h2,
        defect: fin.defect,
    })
}

/// Largest truncation tried automatically, per dimension.
pub fn n_ceiling(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 96,
        _ => 32,
    }
}

/// Inverse bound with automatic choice of `N`.
///
/// The first guess is the smallest `N` for which the `K_N`-independent part
/// of `τ` is at most `1/2`; afterwards `N` is re-estimated from `τ ∝ 1/N²`
/// until `τ <= 1/2` or the ceiling is reached. A certified `τ < 1` at the
/// ceiling is still accepted.
pub fn inverse_bound_auto<C: Coeff>(
    p: &ModelParams<C::Real>,
    u: &CosineSeries<C>,
    consts: &EmbeddingConstants<C::Real>,
    ceiling: usize,
) -> Result<InverseBound<C::Real>> {
    require_zero_mean(u)?;
    let q = q_series(p, &u.to_interval())?;
    let h2 = q.h2.to_f64().unwrap_or(f64::INFINITY);
    let cb = consts.cb.hi().to_f64().unwrap_or(f64::INFINITY);
    let pi2 = std::f64::consts::PI.powi(2);
    let factor = (1.0 + pi2 * pi2).sqrt() / pi2;
    let start = (cb * factor * h2 / (pi2 * 0.5)).sqrt().ceil() as usize;
    let floor = u.extent().iter().copied().max().unwrap_or(2).max(2);
    let mut n = start.max(floor).min(ceiling);
    let target = C::Real::from_f64_lossy(0.5);
    let mut best: Option<InverseBound<C::Real>> = None;
    let mut last_err = None;
    for _ in 0..8 {
        match inverse_bound_from_q(p, &q, n, consts) {
            Ok(ib) => {
                let done = ib.tau <= target || n >= ceiling;
                let next = suggest_n(n, ib.tau, q.h2).min(ceiling);
                best = Some(ib);
                if done || next <= n {
                    break;
                }
                n = next;
            }
            Err(CoreError::TauTooLarge { suggested_n, .. }) if n < ceiling => {
                n = suggested_n.min(ceiling);
            }
            Err(CoreError::FiniteInverseNotCertified { .. }) if n < ceiling => {
                n = (n + n / 2).min(ceiling);
            }
            Err(e) => {
                last_err = Some(e);
                break;
            }
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or(CoreError::TauTooLarge {
            tau: f64::INFINITY,
            n,
            suggested_n: n,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::table_constants;

    type I = Interval<f64>;

    fn mi(k: &[usize]) -> MultiIndex {
        MultiIndex::new(k).unwrap()
    }

    #[test]
    fn trivial_state_has_zero_residual() {
        let p = ModelParams::new(150.0, 6.0, 0.0).unwrap();
        let u = CosineSeries::<I>::zeros_cube(1, 8).unwrap();
        assert_eq!(residual(&p, &u).unwrap(), I::zero());
    }

    #[test]
    fn linear_single_mode() {
        let f = Polynomial::new(vec![0.0, 1.0]).unwrap();
        let p = ModelParams::with_nonlinearity(1.0, 1.0, 0.0, f).unwrap();
        let eps = 1e-3;
        let u = CosineSeries::mode(&mi(&[1]), I::point(eps)).unwrap();
        let fu = operator_series(&p, &u).unwrap();
        let k = std::f64::consts::PI.powi(2);
        let expect = eps * (k - k * k - 1.0);
        let c = fu.get(&mi(&[1]));
        assert!((c.mid() - expect).abs() < 1e-12 * expect.abs() && c.width() < 1e-12);
        assert!(fu.mean().is_zero());
    }

    #[test]
    fn nonzero_mean_rejected() {
        let p = ModelParams::new(1.0, 1.0, 0.0).unwrap();
        let u = CosineSeries::constant(1, I::one()).unwrap();
        assert_eq!(residual(&p, &u), Err(CoreError::NonzeroMean));
    }

    #[test]
    fn constant_q_for_trivial_state() {
        let p = ModelParams::new(2.0, 0.0, 0.5).unwrap();
        let u = CosineSeries::<I>::zeros_cube(2, 3).unwrap();
        let q = q_series(&p, &u).unwrap();
        assert!(q.q.mean().contains(2.0 * (1.0 - 3.0 * 0.25)));
        assert!(q.q.coeffs()[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn basis_is_lexicographic() {
        let b = galerkin_basis(2, 3).unwrap();
        let comps: Vec<Vec<usize>> = b.iter().map(|k| k.components().to_vec()).collect();
        assert_eq!(
            comps,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2],
                vec![2, 0],
                vec![2, 1],
                vec![2, 2]
            ]
        );
        assert_eq!(galerkin_basis(3, 4).unwrap().len(), 63);
    }

    fn diagonal_value(lambda: f64, sigma: f64, k: usize) -> f64 {
        let kappa = std::f64::consts::PI.powi(2) * (k * k) as f64;
        -(1.0 + lambda * sigma / (kappa * kappa)) + lambda / kappa
    }

    #[test]
    fn trivial_state_matrix_is_diagonal() {
        let p = ModelParams::new(150.0, 6.0, 0.0).unwrap();
        let u = CosineSeries::<I>::zeros_cube(1, 4).unwrap();
        let g = build_galerkin(&p, &u, 8).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let e = g.entries.get(i, j);
                if i == j {
                    let v = diagonal_value(150.0, 6.0, i + 1);
                    assert!((e.mid() - v).abs() < 1e-12 && e.width() < 1e-12);
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn zero_q_gives_minus_identity() {
        let f = Polynomial::new(vec![0.0]).unwrap();
        let p = ModelParams::with_nonlinearity(1.0, 0.0, 0.0, f).unwrap();
        let u = CosineSeries::<I>::zeros_cube(2, 2).unwrap();
        let g = build_galerkin(&p, &u, 5).unwrap();
        let kn = kn_bound(&g.entries).unwrap();
        assert!(kn.kn >= 1.0 && kn.kn <= 1.0 + 1e-10);
        let consts = table_constants::<f64>(2).unwrap();
        let ib = inverse_bound(&p, &u, 5, &consts).unwrap();
        assert_eq!(ib.tau, 0.0);
        assert_eq!(ib.k, ib.kn.max(1.0));
    }

    #[test]
    fn diagonal_kn_matches_formula() {
        let p = ModelParams::new(10.0, 1.0, 0.0).unwrap();
        let u = CosineSeries::<I>::zeros_cube(1, 2).unwrap();
        let g = build_galerkin(&p, &u, 32).unwrap();
        let kn = kn_bound(&g.entries).unwrap().kn;
        let exact = 1.0
            / (1..32)
                .map(|k| diagonal_value(10.0, 1.0, k).abs())
                .fold(f64::INFINITY, f64::min);
        assert!(kn >= exact && kn <= exact * 1.01);
    }

    #[test]
    fn tau_formula() {
        let t = tau(2.0, 3.0, 4.0, 1.5, 10);
        let pi = std::f64::consts::PI;
        let direct = (4.0f64 * 9.0 + 2.25 * (1.0 + pi.powi(4)) / pi.powi(4) * 16.0).sqrt()
            / (pi * pi * 100.0);
        assert!((t.mid() - direct).abs() < 1e-14 * direct);
        assert_eq!(k_from_tau(0.5, 0.0), 1.0);
    }
}
