//! Gaussian-copula sampling of the informative features.
//!
//! A copula separates the dependence structure of a multivariate
//! distribution from its marginals. Sampling one row: draw latent standard
//! normals `g`, correlate them through the Cholesky factor (`z = L g`),
//! push each coordinate to the probability scale (`u_j = Phi(z_j)`), then
//! through the target marginal's quantile (`x_j = Q_j(u_j)`).
//!
//! The correlation matrix is specified on the latent normal scale. For
//! Gaussian marginals this equals the Pearson correlation of the output;
//! for other marginals the observed Pearson/Spearman correlation differs
//! in the usual, well-understood ways (the Spearman correlation of any
//! continuous marginals under a Gaussian copula is `(6/pi) asin(rho/2)`).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::stats::{cholesky, std_normal_cdf, std_normal_quantile, CholeskyError, Prng};

/// Marginal distribution family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalKind {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

impl MarginalKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            MarginalKind::Uniform { .. } => "uniform",
            MarginalKind::Gaussian { .. } => "gaussian",
            MarginalKind::Exponential { .. } => "exponential",
        }
    }
}

/// A named marginal: one column of the informative block.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpec {
    pub name: String,
    pub kind: MarginalKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum CopulaError {
    #[error("quantile argument {0} outside (0, 1)")]
    QuantileDomain(f64),
    #[error(transparent)]
    Correlation(#[from] CholeskyError),
}

/// Marginals plus latent correlation; the full recipe for the informative
/// feature block.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    pub marginals: Vec<MarginalSpec>,
    pub correlation: Matrix,
}

impl CopulaSpec {
    pub fn dim(&self) -> usize {
        self.marginals.len()
    }
}

/// Closed-form quantile of a marginal, defined on the open unit interval.
pub fn marginal_quantile(kind: &MarginalKind, u: f64) -> Result<f64, CopulaError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(CopulaError::QuantileDomain(u));
    }
    Ok(match kind {
        MarginalKind::Uniform { lo, hi } => lo + (hi - lo) * u,
        MarginalKind::Gaussian { mean, sd } => {
            mean + sd * std_normal_quantile(u).expect("u checked above")
        }
        MarginalKind::Exponential { rate } => -(1.0 - u).ln() / rate,
    })
}

/// Analytic CDF of a marginal (used by distribution-fit checks).
pub fn marginal_cdf(kind: &MarginalKind, x: f64) -> f64 {
    match kind {
        MarginalKind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        MarginalKind::Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
        MarginalKind::Exponential { rate } => {
            if x <= 0.0 {
                0.0
            } else {
                1.0 - (-rate * x).exp()
            }
        }
    }
}

/// Samples `n` rows of informative features. Column order follows the
/// marginal list. `n = 0` yields an empty matrix.
///
/// Each row consumes exactly `dim` uniforms from `prng` (one latent normal
/// per column via the inverse CDF), so the draw count is computable from
/// the spec alone.
pub fn sample_informative(
    spec: &CopulaSpec,
    n: usize,
    prng: &mut Prng,
) -> Result<Matrix, CopulaError> {
    let d = spec.dim();
    let factor = cholesky(&spec.correlation)?;
    let mut out = Matrix::zeros(n, d);
    let mut latent = vec![0.0; d];
    let mut correlated = vec![0.0; d];
    for i in 0..n {
        for g in latent.iter_mut() {
            *g = prng.standard_normal();
        }
        factor.mul_vec(&latent, &mut correlated);
        let row = out.row_mut(i);
        for (j, marginal) in spec.marginals.iter().enumerate() {
            let u = std_normal_cdf(correlated[j]);
            // Phi of a finite normal is strictly inside (0, 1) until |z|
            // exceeds ~38; the latent draws cannot reach that.
            row[j] = marginal_quantile(&marginal.kind, u)?;
        }
    }
    Ok(out)
}

// Serialized form: {"name": ..., "kind": "uniform", "params": {...}}.
// Hand-rolled so that misspelled parameter keys are errors, matching the
// unknown-key policy of the surrounding spec file.
impl Serialize for MarginalSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("MarginalSpec", 3)?;
        s.serialize_field("name", &self.name)?;
        s.serialize_field("kind", self.kind.kind_name())?;
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => {
                s.serialize_field("params", &UniformParams { lo: *lo, hi: *hi })?
            }
            MarginalKind::Gaussian { mean, sd } => {
                s.serialize_field("params", &GaussianParams { mean: *mean, sd: *sd })?
            }
            MarginalKind::Exponential { rate } => {
                s.serialize_field("params", &ExponentialParams { rate: *rate })?
            }
        }
        s.end()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniformParams {
    lo: f64,
    hi: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianParams {
    mean: f64,
    sd: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExponentialParams {
    rate: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarginalRepr {
    name: String,
    kind: String,
    params: serde_json::Value,
}

impl<'de> Deserialize<'de> for MarginalSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MarginalRepr::deserialize(deserializer)?;
        let kind = match repr.kind.as_str() {
            "uniform" => {
                let p: UniformParams =
                    serde_json::from_value(repr.params).map_err(D::Error::custom)?;
                MarginalKind::Uniform { lo: p.lo, hi: p.hi }
            }
            "gaussian" => {
                let p: GaussianParams =
                    serde_json::from_value(repr.params).map_err(D::Error::custom)?;
                MarginalKind::Gaussian { mean: p.mean, sd: p.sd }
            }
            "exponential" => {
                let p: ExponentialParams =
                    serde_json::from_value(repr.params).map_err(D::Error::custom)?;
                MarginalKind::Exponential { rate: p.rate }
            }
            other => {
                return Err(D::Error::custom(format!(
                    "unknown marginal kind '{other}' (expected uniform, gaussian, or exponential)"
                )))
            }
        };
        Ok(MarginalSpec { name: repr.name, kind })
    }
}
