//! Embedding constants for `H̄² ⊂ L^∞` and the Banach algebra `H²`.
//!
//! `C_m` and `C_b` are compiled-in published bounds. `C̄_m`, the bound in
//! `‖u‖_∞ <= C̄_m ‖u‖_{H̄²}` for zero-mean `u`, can also be recomputed from
//! its lattice-sum formula with a rigorous tail estimate.

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::spectral::{check_dim, pi_pow};

/// Default cutoff for [`recompute_cmbar`].
pub const DEFAULT_NCUT: usize = 1000;

const CM: [f64; 3] = [1.010947, 1.030255, 1.081202];
const CM_BAR: [f64; 3] = [0.149072, 0.248740, 0.411972];
const CB: [f64; 3] = [1.471443, 1.488231, 1.554916];

/// Embedding constants for one dimension. The upper endpoints are the
/// rigorous bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddingConstants<T> {
    pub dim: usize,
    pub cm: Interval<T>,
    pub cm_bar: Interval<T>,
    pub cb: Interval<T>,
    pub equiv_factor: Interval<T>,
}

pub fn table_constants<T: Scalar>(dim: usize) -> Result<EmbeddingConstants<T>> {
    check_dim(dim)?;
    let i = dim - 1;
    Ok(EmbeddingConstants {
        dim,
        cm: Interval::from_decimal(CM[i]),
        cm_bar: Interval::from_decimal(CM_BAR[i]),
        cb: Interval::from_decimal(CB[i]),
        equiv_factor: equiv_factor(),
    })
}

/// Enclosure of `√(1+π⁴)/π²`, the factor relating `H²` and `H̄²` norms.
pub fn equiv_factor<T: Scalar>() -> Interval<T> {
    let p4 = pi_pow::<T>(4);
    (Interval::one() + p4)
        .sqrt()
        .expect("positive")
        .checked_div(&pi_pow::<T>(2))
        .expect("π² > 0")
}

/// `W(n)`: number of `m ∈ Z^d` with `|m|² = n`, for `n < limit`.
fn lattice_counts(dim: usize, limit: usize) -> Vec<u64> {
    let mut w = vec![0u64; limit];
    w[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u64; limit];
        let mut j = 0usize;
        while j * j < limit {
            let off = j * j;
            let mult = if j == 0 { 1 } else { 2 };
            for (dst, &src) in next[off..].iter_mut().zip(&w[..limit - off]) {
                *dst += mult * src;
            }
            j += 1;
        }
        w = next;
    }
    w
}

/// Upper bound on `Σ_{m ∈ Z^d, |m| >= n} |m|^{-4}`.
///
/// Each lattice point owns the unit cube centred at it, on which
/// `|m|^{-4} <= (|x| - h)^{-4}` with `h = √d/2`; the cubes lie outside the
/// ball of radius `n - h`, so the sum is dominated by a radial integral.
fn lattice_tail<T: Scalar>(dim: usize, n: usize) -> Interval<T> {
    let nn = Interval::<T>::from_usize(n);
    let one = Interval::one();
    let two = Interval::from_usize(2);
    let three = Interval::from_usize(3);
    let div = |a: Interval<T>, b: Interval<T>| a.checked_div(&b).expect("positive divisor");
    match dim {
        1 => two * (div(one, nn.powi(4)) + div(one, three * nn.powi(3))),
        _ => {
            let h = div(
                Interval::from_usize(dim).sqrt().expect("positive"),
                two,
            );
            let s0 = nn - two * h;
            let pi = Interval::pi();
            if dim == 2 {
                two * pi * (div(one, two * s0.sqr()) + div(h, three * s0.powi(3)))
            } else {
                Interval::from_usize(4)
                    * pi
                    * (div(one, s0) + div(h, s0.sqr()) + div(h.sqr(), three * s0.powi(3)))
            }
        }
    }
}

/// Enclosure of `(Σ_{k≠0} c_k² κ_k^{-2})^{1/2}`: the exact sum over
/// `0 < |k| < ncut` plus a rigorous bound for the remaining modes.
pub fn recompute_cmbar<T: Scalar>(dim: usize, ncut: usize) -> Result<Interval<T>> {
    check_dim(dim)?;
    if ncut < 2 {
        return Err(CoreError::InvalidArgument("ncut must be at least 2".into()));
    }
    // Σ_{k ∈ N_0^d} c_k² g(|k|²) = Σ_{m ∈ Z^d} g(|m|²): every k with s
    // non-zero entries stands for 2^s sign patterns, and c_k² = 2^s.
    let limit = ncut * ncut;
    let counts = lattice_counts(dim, limit);
    let mut finite = Interval::<T>::zero();
    for (n, &w) in counts.iter().enumerate().skip(1).rev() {
        if w == 0 {
            continue;
        }
        let nn = Interval::<T>::from_usize(n);
        finite += Interval::from_usize(w as usize)
            .checked_div(&nn.sqr())
            .expect("n > 0");
    }
    let inv_pi4 = pi_pow::<T>(-4);
    let finite = finite * inv_pi4;
    let tail = lattice_tail::<T>(dim, ncut) * inv_pi4;
    let lo = finite.sqrt()?.lo();
    let hi = (finite + tail).sqrt()?.hi();
    Interval::try_new(lo, hi)
}
