//! JSON file formats. Floats are stored as decimal strings in shortest
//! round-trip form so a reload is bit-exact.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use okvalid_core::cift::{Certificate, Radii, Stage, Status};
use okvalid_core::lipschitz::LipschitzBounds;
use okvalid_core::operator::{InverseBound, ModelParams, Param};
use okvalid_core::polynomial::Polynomial;
use okvalid_core::spectral::CosineSeries;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

/// Mapping of the Lipschitz estimates onto the theorem's constants.
pub const LIPSCHITZ_MAPPING: &str = "L1=M1, L2=M2 (derivative in u); L3=M3, L4=M4 (derivative in p)";

mod dec {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn to_string(x: f64) -> String {
        // `{:?}` prints the shortest string that parses back to `x`.
        format!("{x:?}")
    }

    pub fn parse(s: &str) -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|e| format!("bad number '{s}': {e}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite number '{s}'"))
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(&String::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&to_string(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&to_string(*v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| parse(&s).map_err(D::Error::custom))
                .transpose()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    #[serde(with = "dec")]
    pub lambda: f64,
    #[serde(with = "dec")]
    pub sigma: f64,
    #[serde(with = "dec")]
    pub mu: f64,
    /// Coefficients of `f`, constant term first.
    #[serde(with = "dec::vec")]
    pub f_coeffs: Vec<f64>,
}

impl ParamsJson {
    pub fn from_model(p: &ModelParams<f64>) -> Self {
        Self {
            lambda: p.lambda,
            sigma: p.sigma,
            mu: p.mu,
            f_coeffs: p.f.coeffs().to_vec(),
        }
    }

    pub fn to_model(&self) -> Result<ModelParams<f64>> {
        let f = Polynomial::new(self.f_coeffs.clone())?;
        Ok(ModelParams::with_nonlinearity(self.lambda, self.sigma, self.mu, f)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub created: String,
    pub tool_version: String,
    #[serde(with = "dec")]
    pub residual_float: f64,
    /// SHA-256 of the canonical content (everything except `meta`).
    pub content_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format_version: u32,
    pub dim: usize,
    pub extent: Vec<usize>,
    pub params: ParamsJson,
    /// Row-major, last axis fastest (lexicographic multi-index order).
    #[serde(with = "dec::vec")]
    pub coeffs: Vec<f64>,
    pub meta: SolutionMeta,
}

#[derive(Serialize)]
struct Canonical<'a> {
    format_version: u32,
    dim: usize,
    extent: &'a [usize],
    params: &'a ParamsJson,
    #[serde(with = "dec::vec")]
    coeffs: &'a [f64],
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl SolutionFile {
    pub fn new(p: &ModelParams<f64>, u: &CosineSeries<f64>, residual_float: f64) -> Self {
        let mut s = Self {
            format_version: FORMAT_VERSION,
            dim: u.dim(),
            extent: u.extent().to_vec(),
            params: ParamsJson::from_model(p),
            coeffs: u.coeffs().to_vec(),
            meta: SolutionMeta {
                created: chrono::Utc::now().to_rfc3339(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                residual_float,
                content_hash: String::new(),
            },
        };
        s.meta.content_hash = s.compute_hash();
        s
    }

    pub fn compute_hash(&self) -> String {
        let c = Canonical {
            format_version: self.format_version,
            dim: self.dim,
            extent: &self.extent,
            params: &self.params,
            coeffs: &self.coeffs,
        };
        sha256_hex(&serde_json::to_vec(&c).expect("serialisable"))
    }

    pub fn series(&self) -> Result<CosineSeries<f64>> {
        Ok(CosineSeries::new(self.dim, &self.extent, self.coeffs.clone())?)
    }

    pub fn model(&self) -> Result<ModelParams<f64>> {
        self.params.to_model()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let s: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if s.format_version != FORMAT_VERSION {
            bail!("unsupported solution format version {}", s.format_version);
        }
        if s.compute_hash() != s.meta.content_hash {
            bail!("content hash mismatch in {}: the file was modified", path.display());
        }
        let u = s.series()?;
        if !u.is_zero_mean() {
            bail!("solution in {} has a nonzero mean coefficient", path.display());
        }
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseJson {
    pub n: usize,
    #[serde(with = "dec")]
    pub kn: f64,
    #[serde(with = "dec")]
    pub tau: f64,
    #[serde(with = "dec")]
    pub k: f64,
    #[serde(with = "dec")]
    pub q_sup: f64,
    #[serde(with = "dec")]
    pub q_h2: f64,
    #[serde(with = "dec")]
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzJson {
    #[serde(with = "dec")]
    pub l1: f64,
    #[serde(with = "dec")]
    pub l2: f64,
    #[serde(with = "dec")]
    pub l3: f64,
    #[serde(with = "dec")]
    pub l4: f64,
    #[serde(with = "dec")]
    pub fmax1: f64,
    #[serde(with = "dec")]
    pub fmax2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiJson {
    #[serde(with = "dec")]
    pub delta_alpha: f64,
    #[serde(with = "dec")]
    pub delta_x: f64,
    #[serde(with = "dec")]
    pub delta_x_unique: f64,
    #[serde(with = "dec::opt", default)]
    pub infeasible_witness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format_version: u32,
    pub tool_version: String,
    pub created: String,
    /// Content hash of the validated solution file.
    pub solution_hash: String,
    pub basis_ordering: String,
    pub lipschitz_mapping: String,
    pub dim: usize,
    pub params: ParamsJson,
    pub parameter: String,
    pub status: String,
    pub stage: Option<String>,
    pub reason: Option<String>,
    pub suggested_n: Option<usize>,
    #[serde(with = "dec")]
    pub ell_alpha: f64,
    #[serde(with = "dec")]
    pub ell_x: f64,
    #[serde(with = "dec::opt", default)]
    pub rho: Option<f64>,
    pub inverse: Option<InverseJson>,
    pub lipschitz: Option<LipschitzJson>,
    pub radii: Option<RadiiJson>,
}

impl CertificateFile {
    pub fn from_certificate(c: &Certificate<f64>, solution_hash: &str) -> Self {
        let (stage, reason) = match &c.status {
            Status::Invalid { stage, reason } => (Some(stage.name().to_string()), Some(reason.clone())),
            _ => (None, None),
        };
        Self {
            format_version: FORMAT_VERSION,
            tool_version: c.tool_version.clone(),
            created: chrono::Utc::now().to_rfc3339(),
            solution_hash: solution_hash.to_string(),
            basis_ordering: c.ordering.clone(),
            lipschitz_mapping: LIPSCHITZ_MAPPING.to_string(),
            dim: c.dim,
            params: ParamsJson::from_model(&c.params),
            parameter: c.which.name().to_string(),
            status: c.status.name().to_string(),
            stage,
            reason,
            suggested_n: c.suggested_n,
            ell_alpha: c.ell_alpha,
            ell_x: c.ell_x,
            rho: c.rho,
            inverse: c.inverse.map(|i| InverseJson {
                n: i.n,
                kn: i.kn,
                tau: i.tau,
                k: i.k,
                q_sup: i.q_sup,
                q_h2: i.q_h2,
                defect: i.defect,
            }),
            lipschitz: c.lipschitz.map(|l| LipschitzJson {
                l1: l.l1,
                l2: l.l2,
                l3: l.l3,
                l4: l.l4,
                fmax1: l.fmax1,
                fmax2: l.fmax2,
            }),
            radii: c.radii.map(|r| RadiiJson {
                delta_alpha: r.delta_alpha,
                delta_x: r.delta_x,
                delta_x_unique: r.delta_x_unique,
                infeasible_witness: r.witness,
            }),
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate<f64>> {
        let status = match self.status.as_str() {
            "valid" => Status::Valid,
            "point_only" => Status::PointOnly,
            "invalid" => Status::Invalid {
                stage: self
                    .stage
                    .as_deref()
                    .ok_or_else(|| anyhow!("invalid certificate without a stage"))?
                    .parse::<Stage>()?,
                reason: self.reason.clone().unwrap_or_default(),
            },
            other => bail!("unknown status '{other}'"),
        };
        Ok(Certificate {
            params: self.params.to_model()?,
            which: self.parameter.parse::<Param>()?,
            ell_alpha: self.ell_alpha,
            ell_x: self.ell_x,
            dim: self.dim,
            ordering: self.basis_ordering.clone(),
            tool_version: self.tool_version.clone(),
            rho: self.rho,
            inverse: self.inverse.as_ref().map(|i| InverseBound {
                kn: i.kn,
                tau: i.tau,
                k: i.k,
                n: i.n,
                q_sup: i.q_sup,
                q_h2: i.q_h2,
                defect: i.defect,
            }),
            lipschitz: self.lipschitz.as_ref().map(|l| LipschitzBounds {
                l1: l.l1,
                l2: l.l2,
                l3: l.l3,
                l4: l.l4,
                fmax1: l.fmax1,
                fmax2: l.fmax2,
            }),
            radii: self.radii.as_ref().map(|r| Radii {
                delta_alpha: r.delta_alpha,
                delta_x: r.delta_x,
                delta_x_unique: r.delta_x_unique,
                witness: r.infeasible_witness,
            }),
            suggested_n: self.suggested_n,
            status,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let c: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if c.format_version != FORMAT_VERSION {
            bail!("unsupported certificate format version {}", c.format_version);
        }
        Ok(c)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
