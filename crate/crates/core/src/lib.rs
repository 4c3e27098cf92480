//! Structured radial basis function networks for multiple-hypothesis
//! regression.
//!
//! The pipeline has two stages:
//!
//! 1. [`mhp::train`] fits `M` small perceptrons jointly with a relaxed
//!    winner-takes-all rule. Each sample's label is assigned to the closest
//!    hypothesis (a Voronoi cell in label space); the winner receives most of
//!    the update and the others share a fraction `ε` of it. `ε` is the
//!    diversity knob.
//! 2. The trained hypotheses' outputs on the training inputs form an `N × M`
//!    structured matrix. Each column gets a Gaussian basis function centred
//!    at its mean with its sample standard deviation as width
//!    ([`structured`]), and the basis weights are fitted in closed form by
//!    ridge least squares ([`model`]).
//!
//! ```no_run
//! use srbfn::{dataset::synthetic, mhp::MhpConfig, model::SRbfnModel};
//!
//! let data = synthetic::two_branch(400, 0.3, 7);
//! let cfg = MhpConfig { m: 5, epsilon: 0.1, kappa: 20, epochs: 20, ..MhpConfig::default() };
//! let model = SRbfnModel::train(&data, &cfg, 3.0)?;
//! let y_hat = model.predict(&data.features)?;
//! # Ok::<(), srbfn::Error>(())
//! ```
//!
//! [`evaluation`] holds the cross-validation and sweep harness used to study
//! diversity and regularization, and [`cli`] backs the `srbfn` binary.

pub mod baselines;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod mhp;
pub mod model;
pub mod persist;
pub mod predictor;
pub mod structured;

pub use error::{Error, Result};
pub use matrix::Matrix;
