//! Joint training of `M` hypotheses with the relaxed winner-takes-all rule.
//!
//! For every sample each predictor is evaluated; the one closest to the label
//! owns that label's Voronoi cell. The owner is updated with weight `1 − ε`
//! and every other predictor with `ε / (M − 1)`. Gradients are taken from the
//! pre-step parameters of each predictor, so the order in which predictors are
//! stepped within a sample does not matter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{RegressionDataset, Standardizer};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::predictor::{MlpParams, Workspace};

/// Parameters are scanned for non-finite values this often (in samples).
pub const DIVERGENCE_CHECK_INTERVAL: u64 = 1000;

/// Hyper-parameters of the hypothesis ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhpConfig {
    /// Number of hypotheses `M`.
    pub m: usize,
    /// Diversity parameter `ε`.
    pub epsilon: f64,
    /// Learning rate `η`.
    pub eta: f64,
    /// Predictor regularizer `λ_p`.
    pub lambda_p: f64,
    /// Initial weight scale `χ`.
    pub chi: f64,
    /// Neurons per hidden layer `κ`.
    pub kappa: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MhpConfig {
    fn default() -> Self {
        Self {
            m: 10,
            epsilon: 0.35,
            eta: 0.03,
            lambda_p: 0.0001,
            chi: 0.01,
            kappa: 200,
            epochs: 50,
            seed: 0,
        }
    }
}

impl MhpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 1 && self.epsilon != 0.0 {
            return Err(Error::DegenerateConfig(format!(
                "M = 1 requires eps = 0 (got eps = {})",
                self.epsilon
            )));
        }
        let problems = [
            (self.m >= 1, "M must be >= 1"),
            ((0.0..1.0).contains(&self.epsilon), "eps must lie in [0, 1)"),
            (self.eta > 0.0 && self.eta.is_finite(), "eta must be > 0"),
            (self.lambda_p >= 0.0 && self.lambda_p.is_finite(), "lambda_p must be >= 0"),
            (self.chi >= 0.0 && self.chi.is_finite(), "chi must be >= 0"),
            (self.kappa >= 1, "kappa must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
        ];
        match problems.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidConfig((*msg).into())),
            None => Ok(()),
        }
    }
}

/// `M` trained predictors together with the scaling applied to their inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEnsemble {
    pub predictors: Vec<MlpParams>,
    pub config: MhpConfig,
    /// Input dimension seen by the predictors (after standardization).
    pub input_dim: usize,
    pub standardizer: Standardizer,
}

impl HypothesisEnsemble {
    pub fn m(&self) -> usize {
        self.predictors.len()
    }

    /// Applies the stored standardizer to raw features.
    pub fn standardize(&self, raw: &Matrix) -> Result<Matrix> {
        self.standardizer.apply(raw)
    }

    /// `N × M` matrix of predictions on already standardized inputs.
    pub fn predict_matrix(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim {
            return Err(Error::ShapeMismatch(format!(
                "ensemble expects {} standardized columns, got {}",
                self.input_dim,
                x.cols()
            )));
        }
        let m = self.m();
        let mut out = Matrix::zeros(x.rows(), m);
        let mut ws: Vec<Workspace> = self
            .predictors
            .iter()
            .map(|p| Workspace::new(p.width()))
            .collect();
        for (i, row) in x.row_iter().enumerate() {
            for (j, p) in self.predictors.iter().enumerate() {
                out.set(i, j, p.forward_ws(row, &mut ws[j]));
            }
        }
        Ok(out)
    }
}

/// Index of the prediction closest to `y` under squared error; ties go to the
/// lowest index.
pub fn winner_index(predictions: &[f64], y: f64) -> usize {
    let mut best = 0;
    let mut best_loss = f64::INFINITY;
    for (j, &p) in predictions.iter().enumerate() {
        let loss = (p - y) * (p - y);
        if loss < best_loss {
            best = j;
            best_loss = loss;
        }
    }
    best
}

/// Update weights: `1 − ε` for the winner and `ε / (M − 1)` for the rest.
pub fn delta_weights(m: usize, epsilon: f64, winner: usize) -> Result<Vec<f64>> {
    if m == 1 {
        if epsilon != 0.0 {
            return Err(Error::DegenerateConfig(format!(
                "M = 1 requires eps = 0 (got eps = {epsilon})"
            )));
        }
        return Ok(vec![1.0]);
    }
    if winner >= m {
        return Err(Error::ShapeMismatch(format!("winner {winner} out of range for M = {m}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!("eps must lie in [0, 1), got {epsilon}")));
    }
    let mut w = vec![epsilon / (m - 1) as f64; m];
    w[winner] = 1.0 - epsilon;
    Ok(w)
}

/// Fits a standardizer on `data`, then trains `cfg.m` predictors on the
/// standardized inputs with the relaxed winner-takes-all rule.
pub fn train(data: &RegressionDataset, cfg: &MhpConfig) -> Result<HypothesisEnsemble> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyAfterCleaning);
    }
    let standardizer = Standardizer::fit(&data.features)?;
    let x = standardizer.apply(&data.features)?;
    let predictors = train_standardized(&x, &data.targets, cfg)?;
    Ok(HypothesisEnsemble {
        predictors,
        config: cfg.clone(),
        input_dim: x.cols(),
        standardizer,
    })
}

/// Initial parameters of all `cfg.m` predictors, drawn in order from `rng`.
pub fn init_predictors<R: Rng + ?Sized>(d: usize, cfg: &MhpConfig, rng: &mut R) -> Vec<MlpParams> {
    (0..cfg.m)
        .map(|_| MlpParams::init(d, cfg.kappa, cfg.chi, rng))
        .collect()
}

/// One relaxed winner-takes-all SGD iteration on sample `(x, y)`.
///
/// Every gradient is taken at the pre-step parameters. Returns the winner,
/// or `None` if some prediction was not finite (nothing is updated then).
/// `ws` needs one workspace per predictor; `n` is the training-set size.
pub fn wta_step(
    predictors: &mut [MlpParams],
    ws: &mut [Workspace],
    x: &[f64],
    y: f64,
    cfg: &MhpConfig,
    n: usize,
) -> Result<Option<usize>> {
    let preds: Vec<f64> = predictors
        .iter()
        .zip(ws.iter_mut())
        .map(|(p, w)| p.forward_ws(x, w))
        .collect();
    if preds.iter().any(|p| !p.is_finite()) {
        return Ok(None);
    }
    let winner = winner_index(&preds, y);
    let weights = delta_weights(predictors.len(), cfg.epsilon, winner)?;
    for (j, p) in predictors.iter_mut().enumerate() {
        p.sgd_update(x, y, preds[j], cfg.lambda_p, n, &mut ws[j], cfg.eta, weights[j]);
    }
    Ok(Some(winner))
}

/// Training loop on inputs that are already scaled.
pub fn train_standardized(x: &Matrix, y: &[f64], cfg: &MhpConfig) -> Result<Vec<MlpParams>> {
    cfg.validate()?;
    if x.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} targets",
            x.rows(),
            y.len()
        )));
    }
    let n = x.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut predictors = init_predictors(x.cols(), cfg, &mut rng);
    let mut ws: Vec<Workspace> = (0..cfg.m).map(|_| Workspace::new(cfg.kappa)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let diverged = |step| Error::NumericalDivergence {
        eta: cfg.eta,
        chi: cfg.chi,
        kappa: cfg.kappa,
        step,
    };

    let mut step: u64 = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            if wta_step(&mut predictors, &mut ws, x.row(i), y[i], cfg, n)?.is_none() {
                return Err(diverged(step));
            }
            step += 1;
            if step.is_multiple_of(DIVERGENCE_CHECK_INTERVAL) && !predictors.iter().all(MlpParams::is_finite)
            {
                return Err(diverged(step));
            }
        }
    }
    if !predictors.iter().all(MlpParams::is_finite) {
        return Err(diverged(step));
    }
    Ok(predictors)
}
