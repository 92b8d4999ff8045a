//! Initial-guess descriptions for `solve`.
//!
//! ```text
//! zero                      the trivial state
//! mode:K[,A]                A·φ_K, K like `1` or `2x1`, A defaults to 0.2
//! mode:1x0,0.2+mode:0x1     sums of modes
//! file:PATH                 coefficients of a solution file
//! ```
//!
//! Missing trailing components of `K` are zero, so `mode:1` in two
//! dimensions is `φ_(1,0)`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use okvalid_core::newton::seed_series;
use okvalid_core::spectral::{CosineSeries, MultiIndex};

use crate::files::SolutionFile;

pub const DEFAULT_AMPLITUDE: f64 = 0.2;

fn parse_index(s: &str, dim: usize) -> Result<MultiIndex> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad mode index '{s}'")))
        .collect::<Result<_>>()?;
    if parts.len() > dim {
        bail!("mode '{s}' has more than {dim} components");
    }
    let mut k = parts;
    k.resize(dim, 0);
    let k = MultiIndex::new(&k)?;
    if k.is_zero() {
        bail!("mode '{s}' is the mean mode, which must stay zero");
    }
    Ok(k)
}

fn parse_mode(s: &str, dim: usize) -> Result<(MultiIndex, f64)> {
    let (k, a) = match s.split_once(',') {
        Some((k, a)) => {
            let a: f64 = a.trim().parse().with_context(|| format!("bad amplitude in '{s}'"))?;
            if !a.is_finite() {
                bail!("amplitude in '{s}' is not finite");
            }
            (k, a)
        }
        None => (s, DEFAULT_AMPLITUDE),
    };
    Ok((parse_index(k, dim)?, a))
}

/// Builds the initial guess described by `spec` in dimension `dim`.
pub fn parse_seed(spec: &str, dim: usize) -> Result<CosineSeries<f64>> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok(CosineSeries::zeros_cube(dim, 1)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let f = SolutionFile::read(Path::new(path))?;
        if f.dim != dim {
            bail!("seed file is {}-dimensional, expected {dim}", f.dim);
        }
        return f.series();
    }
    let modes = spec
        .split('+')
        .map(|term| match term.trim().strip_prefix("mode:") {
            Some(rest) => parse_mode(rest, dim),
            None => bail!("unrecognised seed term '{term}' (expected zero, mode:K[,A] or file:PATH)"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(seed_series(dim, &modes)?)
}
