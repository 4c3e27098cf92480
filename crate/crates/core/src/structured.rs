//! Structured dataset `D(ε)` and its Gaussian basis map `Φ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{column_mean_std, Matrix};
use crate::mhp::HypothesisEnsemble;

/// Lower bound on basis widths; keeps `Φ` finite for constant columns.
pub const SIGMA_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Train,
    Test,
}

/// `N × M` matrix of hypothesis outputs, `d[i][j] = f_j(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredDataset {
    pub d: Matrix,
    pub epsilon: f64,
    pub source: Source,
}

/// Per-column Gaussian centres and widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl BasisParams {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// Evaluates every hypothesis on `x`, which must already be standardized with
/// the ensemble's standardizer.
pub fn build_structured(
    ens: &HypothesisEnsemble,
    x: &Matrix,
    source: Source,
) -> Result<StructuredDataset> {
    let d = ens.predict_matrix(x)?;
    if !d.is_finite() {
        return Err(Error::NumericalDivergence {
            eta: ens.config.eta,
            chi: ens.config.chi,
            kappa: ens.config.kappa,
            step: 0,
        });
    }
    Ok(StructuredDataset {
        d,
        epsilon: ens.config.epsilon,
        source,
    })
}

/// Column means and sample standard deviations of a training `D(ε)`.
pub fn fit_basis(sd: &StructuredDataset) -> Result<BasisParams> {
    if sd.source != Source::Train {
        return Err(Error::InvalidConfig(
            "basis parameters must come from the training structured dataset".into(),
        ));
    }
    let (mu, sigma) = column_mean_std(&sd.d)?;
    Ok(BasisParams {
        mu,
        sigma: sigma.into_iter().map(|s| s.max(SIGMA_MIN)).collect(),
    })
}

#[inline]
pub fn gaussian(v: f64, mu: f64, sigma: f64) -> f64 {
    let z = v - mu;
    (-(z * z) / (2.0 * sigma * sigma)).exp()
}

/// `Φ[i][j] = exp(−(D[i][j] − μ_j)² / (2σ_j²))`.
pub fn feature_map(sd: &StructuredDataset, basis: &BasisParams) -> Result<Matrix> {
    let m = basis.len();
    if sd.d.cols() != m {
        return Err(Error::ShapeMismatch(format!(
            "structured matrix has {} columns, basis has {m}",
            sd.d.cols()
        )));
    }
    let mut phi = sd.d.clone();
    for i in 0..phi.rows() {
        for (j, v) in phi.row_mut(i).iter_mut().enumerate() {
            *v = gaussian(*v, basis.mu[j], basis.sigma[j]);
        }
    }
    Ok(phi)
}
