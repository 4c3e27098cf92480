//! The s-RBFN: Gaussian features of the structured matrix combined linearly,
//! with weights from the ridge normal equations `(ΦᵀΦ + λ_s I) w = Φᵀ y`.

use serde::{Deserialize, Serialize};

use crate::dataset::RegressionDataset;
use crate::error::{Error, Result};
use crate::matrix::{gram, solve_spd, Matrix};
use crate::mhp::{self, HypothesisEnsemble, MhpConfig};
use crate::structured::{build_structured, feature_map, fit_basis, BasisParams, Source};

/// Diagonal jitter for the single retry after a failed factorization.
pub const SOLVE_JITTER: f64 = 1e-10;

/// Closed-form ridge weights for the basis matrix `phi`.
pub fn fit(phi: &Matrix, y: &[f64], lambda_s: f64) -> Result<Vec<f64>> {
    if phi.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "Φ has {} rows, y has {}",
            phi.rows(),
            y.len()
        )));
    }
    if lambda_s.is_nan() || lambda_s < 0.0 {
        return Err(Error::InvalidConfig(format!("lambda_s must be >= 0, got {lambda_s}")));
    }
    let mut a = gram(phi);
    a.add_diagonal(lambda_s);
    let rhs = phi.tr_matvec(y)?;
    match solve_spd(&a, &rhs) {
        Err(Error::NotPositiveDefinite { .. }) => {
            a.add_diagonal(SOLVE_JITTER);
            solve_spd(&a, &rhs)
        }
        other => other,
    }
}

/// `||(ΦᵀΦ + λ I) w − Φᵀ y||∞ / (1 + ||Φᵀ y||∞)`.
pub fn normal_equation_residual(phi: &Matrix, y: &[f64], lambda_s: f64, w: &[f64]) -> Result<f64> {
    let mut a = gram(phi);
    a.add_diagonal(lambda_s);
    let rhs = phi.tr_matvec(y)?;
    let aw = a.matvec(w)?;
    let num = aw
        .iter()
        .zip(&rhs)
        .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()));
    let den = 1.0 + rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SRbfnModel {
    pub ensemble: HypothesisEnsemble,
    pub basis: BasisParams,
    pub w: Vec<f64>,
    pub lambda_s: f64,
}

impl SRbfnModel {
    /// Trains the hypotheses on `data`, then fits basis and weights.
    pub fn train(data: &RegressionDataset, cfg: &MhpConfig, lambda_s: f64) -> Result<Self> {
        let ens = mhp::train(data, cfg)?;
        Self::from_ensemble(ens, &data.features, &data.targets, lambda_s)
    }

    /// Fits basis and weights on top of an already trained ensemble using the
    /// raw (unstandardized) training inputs it was trained on.
    pub fn from_ensemble(
        ensemble: HypothesisEnsemble,
        x_raw: &Matrix,
        y: &[f64],
        lambda_s: f64,
    ) -> Result<Self> {
        let x = ensemble.standardize(x_raw)?;
        let sd = build_structured(&ensemble, &x, Source::Train)?;
        let basis = fit_basis(&sd)?;
        let phi = feature_map(&sd, &basis)?;
        let w = fit(&phi, y, lambda_s)?;
        Ok(Self {
            ensemble,
            basis,
            w,
            lambda_s,
        })
    }

    /// `Φ′ w` for raw inputs.
    pub fn predict(&self, x_raw: &Matrix) -> Result<Vec<f64>> {
        let x = self.ensemble.standardize(x_raw)?;
        self.predict_standardized(&x)
    }

    pub fn predict_standardized(&self, x: &Matrix) -> Result<Vec<f64>> {
        let sd = build_structured(&self.ensemble, x, Source::Test)?;
        let phi = feature_map(&sd, &self.basis)?;
        phi.matvec(&self.w)
    }
}
