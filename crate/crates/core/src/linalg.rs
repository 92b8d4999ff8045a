//! Floating-point dense LU factorisation (partial pivoting). Non-rigorous:
//! used for Newton steps and for approximate inverses that are verified
//! afterwards.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Factorises the row-major `n × n` matrix `a`.
    pub fn new(n: usize, mut a: Vec<T>) -> Result<Self> {
        if a.len() != n * n {
            return Err(CoreError::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                a.len()
            )));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, pmax) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(CoreError::SingularMatrix);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
            }
            let d = a[col * n + col];
            let (top, bottom) = a.split_at_mut((col + 1) * n);
            let pivot_row = &top[col * n..];
            for row in bottom.chunks_mut(n) {
                let factor = row[col] / d;
                row[col] = factor;
                if factor != T::zero() {
                    for j in col + 1..n {
                        row[j] = row[j] - factor * pivot_row[j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return Err(CoreError::DimensionMismatch(format!(
                "right-hand side of length {} for size {n}",
                b.len()
            )));
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = row.iter().zip(&x[..i]).fold(T::zero(), |acc, (&l, &xj)| acc + l * xj);
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = row
                .iter()
                .zip(&x[i + 1..])
                .fold(T::zero(), |acc, (&u, &xj)| acc + u * xj);
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::SingularMatrix);
        }
        Ok(x)
    }

    /// Row-major approximate inverse.
    pub fn inverse(&self) -> Result<Vec<T>> {
        let n = self.n;
        let mut inv = vec![T::zero(); n * n];
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[i * n + j] = v;
            }
        }
        Ok(inv)
    }
}
