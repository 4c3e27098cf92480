//! The base learner: a perceptron with two tanh hidden layers of width `κ`
//! and a scalar linear output, trained by per-sample SGD.
//!
//! Forward pass:
//!
//! ```text
//! a1 = tanh(W1 x + b1)
//! a2 = tanh(W2 a1 + b2)
//! f  = w_out · a2 + b_out
//! ```
//!
//! The per-sample loss is `(f - y)^2 + λ_p / (2N) * |θ|^2` where `θ` collects
//! every weight and bias of this predictor.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Parameters of one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

/// Gradient with the same layout as [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient(pub MlpParams);

/// Reusable activation buffers for the hot path.
#[derive(Debug, Clone)]
pub struct Workspace {
    a1: Vec<f64>,
    a2: Vec<f64>,
    dz1: Vec<f64>,
    dz2: Vec<f64>,
}

impl Workspace {
    pub fn new(width: usize) -> Self {
        Self {
            a1: vec![0.0; width],
            a2: vec![0.0; width],
            dz1: vec![0.0; width],
            dz2: vec![0.0; width],
        }
    }
}

impl MlpParams {
    /// All-zero parameters for input dimension `d` and width `width`.
    pub fn zeros(d: usize, width: usize) -> Self {
        Self {
            w1: Matrix::zeros(width, d),
            b1: vec![0.0; width],
            w2: Matrix::zeros(width, width),
            b2: vec![0.0; width],
            w_out: vec![0.0; width],
            b_out: 0.0,
        }
    }

    /// Standard-normal weights scaled by `scale`, zero biases.
    ///
    /// `d = 0` is accepted: when every input column has been dropped the
    /// network degenerates to a bias-driven constant predictor.
    pub fn init<R: Rng + ?Sized>(d: usize, width: usize, scale: f64, rng: &mut R) -> Self {
        assert!(width >= 1, "width must be at least 1");
        let mut p = Self::zeros(d, width);
        for v in p
            .w1
            .data_mut()
            .iter_mut()
            .chain(p.w2.data_mut().iter_mut())
            .chain(p.w_out.iter_mut())
        {
            let z: f64 = rng.sample(StandardNormal);
            *v = z * scale;
        }
        p
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.w1.cols()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.b1.len()
    }

    pub fn param_count(&self) -> usize {
        let k = self.width();
        k * self.input_dim() + k + k * k + k + k + 1
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "predictor expects {} inputs, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut ws = Workspace::new(self.width());
        Ok(self.forward_ws(x, &mut ws))
    }

    /// Forward pass that leaves the hidden activations in `ws`.
    /// `x` must have `input_dim` entries.
    pub fn forward_ws(&self, x: &[f64], ws: &mut Workspace) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim());
        let k = self.width();
        ws.a1.resize(k, 0.0);
        ws.a2.resize(k, 0.0);
        for i in 0..k {
            ws.a1[i] = (dot(self.w1.row(i), x) + self.b1[i]).tanh();
        }
        for i in 0..k {
            ws.a2[i] = (dot(self.w2.row(i), &ws.a1) + self.b2[i]).tanh();
        }
        dot(&self.w_out, &ws.a2) + self.b_out
    }

    pub fn squared_norm(&self) -> f64 {
        self.flat_iter().map(|v| v * v).sum()
    }

    fn flat_iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1
            .data()
            .iter()
            .chain(&self.b1)
            .chain(self.w2.data())
            .chain(&self.b2)
            .chain(&self.w_out)
            .chain(std::iter::once(&self.b_out))
            .copied()
    }

    fn flat_iter_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.w1
            .data_mut()
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.data_mut().iter_mut())
            .chain(self.b2.iter_mut())
            .chain(self.w_out.iter_mut())
            .chain(std::iter::once(&mut self.b_out))
    }

    /// Every parameter in a fixed order: W1, b1, W2, b2, w_out, b_out.
    pub fn to_flat(&self) -> Vec<f64> {
        self.flat_iter().collect()
    }

    /// Inverse of [`MlpParams::to_flat`] for the same `(d, width)`.
    pub fn from_flat(d: usize, width: usize, flat: &[f64]) -> Result<Self> {
        let mut p = Self::zeros(d, width);
        if flat.len() != p.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                p.param_count(),
                flat.len()
            )));
        }
        for (dst, &src) in p.flat_iter_mut().zip(flat) {
            *dst = src;
        }
        Ok(p)
    }

    pub fn is_finite(&self) -> bool {
        self.flat_iter().all(f64::is_finite)
    }

    /// Loss and its exact gradient for one sample.
    ///
    /// `n` is the training-set size dividing the weight-decay term.
    pub fn loss_and_gradient(
        &self,
        x: &[f64],
        y: f64,
        lambda_p: f64,
        n: usize,
    ) -> Result<(f64, MlpGradient)> {
        self.check_input(x)?;
        let mut ws = Workspace::new(self.width());
        let mut g = MlpParams::zeros(self.input_dim(), self.width());
        let loss = self.loss_and_gradient_into(x, y, lambda_p, n, &mut ws, &mut g);
        Ok((loss, MlpGradient(g)))
    }

    /// Allocation-free variant of [`MlpParams::loss_and_gradient`]; `grad`
    /// must have this network's shape and is overwritten.
    pub fn loss_and_gradient_into(
        &self,
        x: &[f64],
        y: f64,
        lambda_p: f64,
        n: usize,
        ws: &mut Workspace,
        grad: &mut MlpParams,
    ) -> f64 {
        let f = self.forward_ws(x, ws);
        self.backward_into(x, y, f, lambda_p, n, ws, grad)
    }

    /// Backward pass using the activations left in `ws` by a preceding
    /// [`MlpParams::forward_ws`] call on the same `x` that returned `f`.
    /// Returns the loss.
    #[allow(clippy::too_many_arguments)]
    pub fn backward_into(
        &self,
        x: &[f64],
        y: f64,
        f: f64,
        lambda_p: f64,
        n: usize,
        ws: &mut Workspace,
        grad: &mut MlpParams,
    ) -> f64 {
        let k = self.width();
        let d = self.input_dim();
        let r = f - y;
        let e = 2.0 * r;
        let decay = lambda_p / n.max(1) as f64;

        grad.b_out = e;
        ws.dz2.resize(k, 0.0);
        ws.dz1.resize(k, 0.0);
        for i in 0..k {
            grad.w_out[i] = e * ws.a2[i];
            ws.dz2[i] = e * self.w_out[i] * (1.0 - ws.a2[i] * ws.a2[i]);
            grad.b2[i] = ws.dz2[i];
        }
        ws.dz1.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..k {
            let dz = ws.dz2[i];
            let w2_row = self.w2.row(i);
            let g_row = grad.w2.row_mut(i);
            for j in 0..k {
                g_row[j] = dz * ws.a1[j];
                ws.dz1[j] += w2_row[j] * dz;
            }
        }
        for j in 0..k {
            ws.dz1[j] *= 1.0 - ws.a1[j] * ws.a1[j];
            grad.b1[j] = ws.dz1[j];
            let g_row = grad.w1.row_mut(j);
            for c in 0..d {
                g_row[c] = ws.dz1[j] * x[c];
            }
        }

        let mut loss = r * r;
        if lambda_p != 0.0 {
            loss += 0.5 * decay * self.squared_norm();
            for (g, p) in grad.flat_iter_mut().zip(self.flat_iter()) {
                *g += decay * p;
            }
        }
        loss
    }

    /// One SGD step on a single sample, fused with the backward pass so each
    /// weight matrix is traversed once. Uses the activations left in `ws` by
    /// [`MlpParams::forward_ws`] on `x`, which returned `f`. Gives the same
    /// result as [`MlpParams::backward_into`] followed by
    /// [`MlpParams::apply_step`].
    #[allow(clippy::too_many_arguments)]
    pub fn sgd_update(
        &mut self,
        x: &[f64],
        y: f64,
        f: f64,
        lambda_p: f64,
        n: usize,
        ws: &mut Workspace,
        eta: f64,
        weight: f64,
    ) {
        if weight == 0.0 {
            return;
        }
        let k = self.width();
        let e = 2.0 * (f - y);
        let decay = lambda_p / n.max(1) as f64;
        let s = eta * weight;
        ws.dz1.resize(k, 0.0);
        ws.dz2.resize(k, 0.0);

        for i in 0..k {
            let a2 = ws.a2[i];
            let w = self.w_out[i];
            ws.dz2[i] = e * w * (1.0 - a2 * a2);
            self.w_out[i] = w - s * (e * a2 + decay * w);
        }
        self.b_out -= s * (e + decay * self.b_out);

        ws.dz1.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..k {
            let dz = ws.dz2[i];
            let row = self.w2.row_mut(i);
            for ((w, g), a) in row.iter_mut().zip(ws.dz1.iter_mut()).zip(&ws.a1) {
                let old = *w;
                *g += old * dz;
                *w = old - s * (dz * a + decay * old);
            }
            self.b2[i] -= s * (dz + decay * self.b2[i]);
        }
        for j in 0..k {
            let a1 = ws.a1[j];
            let dz = ws.dz1[j] * (1.0 - a1 * a1);
            self.b1[j] -= s * (dz + decay * self.b1[j]);
            for (w, xc) in self.w1.row_mut(j).iter_mut().zip(x) {
                *w -= s * (dz * xc + decay * *w);
            }
        }
    }

    /// `θ ← θ − η·weight·g`, in place. A zero weight leaves `self` untouched.
    pub fn apply_step(&mut self, grad: &MlpParams, eta: f64, weight: f64) {
        if weight == 0.0 {
            return;
        }
        let s = eta * weight;
        for (p, g) in self.flat_iter_mut().zip(grad.flat_iter()) {
            *p -= s * g;
        }
    }
}

/// `θ' = θ − η·weight·g`.
pub fn sgd_step(p: &MlpParams, g: &MlpGradient, eta: f64, weight: f64) -> MlpParams {
    let mut next = p.clone();
    next.apply_step(&g.0, eta, weight);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_net(w1: f64, w2: f64, w_out: f64) -> MlpParams {
        let mut p = MlpParams::zeros(1, 1);
        p.w1.set(0, 0, w1);
        p.w2.set(0, 0, w2);
        p.w_out[0] = w_out;
        p
    }

    #[test]
    fn zero_params_forward_zero() {
        let p = MlpParams::zeros(3, 4);
        assert_eq!(p.forward(&[1.0, -2.0, 3.0]).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = MlpParams::init(3, 4, 0.0, &mut rng);
        assert_eq!(p.forward(&[1.0, -2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn scalar_forward_values() {
        let p = scalar_net(1.0, 1.0, 1.0);
        assert_eq!(p.forward(&[0.0]).unwrap(), 0.0);
        let f = p.forward(&[1.0]).unwrap();
        // tanh(tanh(1)) computed independently
        let oracle = (1f64).tanh().tanh();
        assert_eq!(f, oracle);
        assert!((f - 0.642015).abs() < 1e-6);
    }

    #[test]
    fn fused_update_matches_two_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for lambda_p in [0.0, 0.07] {
            let p = MlpParams::init(3, 6, 0.5, &mut rng);
            let x = [0.3, -1.2, 0.8];
            let mut ws = Workspace::new(6);
            let mut grad = MlpParams::zeros(3, 6);
            let f = p.forward_ws(&x, &mut ws);
            p.backward_into(&x, 0.4, f, lambda_p, 50, &mut ws, &mut grad);
            let mut two = p.clone();
            two.apply_step(&grad, 0.03, 0.65);

            let mut fused = p.clone();
            let f = fused.forward_ws(&x, &mut ws);
            fused.sgd_update(&x, 0.4, f, lambda_p, 50, &mut ws, 0.03, 0.65);
            assert_eq!(fused, two);
        }
    }

    #[test]
    fn forward_shape_mismatch() {
        let p = MlpParams::zeros(2, 3);
        assert!(matches!(p.forward(&[1.0]), Err(Error::ShapeMismatch(_))));
        assert!(p.loss_and_gradient(&[1.0], 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn init_is_seeded() {
        let a = MlpParams::init(4, 5, 0.1, &mut ChaCha8Rng::seed_from_u64(11));
        let b = MlpParams::init(4, 5, 0.1, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert!(a.b1.iter().chain(&a.b2).all(|&v| v == 0.0));
        assert_eq!(a.b_out, 0.0);
    }

    #[test]
    fn init_scale_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // 500 x 20 = 10k draws for W1
        let p = MlpParams::init(500, 20, 0.01, &mut rng);
        let w = p.w1.data();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64).sqrt();
        assert!((0.008..=0.012).contains(&sd), "sd = {sd}");
    }

    #[test]
    fn zero_case_gradient() {
        let p = MlpParams::zeros(2, 3);
        let (loss, g) = p.loss_and_gradient(&[0.5, -0.5], 0.0, 0.0, 10).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.0.w_out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_output_weight_gradient() {
        let (w1, x, y) = (0.7, 1.3, 0.2);
        let p = scalar_net(w1, 1.0, 1.5);
        let (_, g) = p.loss_and_gradient(&[x], y, 0.0, 1).unwrap();
        let h = (w1 * x).tanh().tanh();
        let f = 1.5 * h;
        let expected = 2.0 * (f - y) * h;
        assert!((g.0.w_out[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn flat_round_trip() {
        let p = MlpParams::init(3, 4, 0.5, &mut ChaCha8Rng::seed_from_u64(2));
        let flat = p.to_flat();
        assert_eq!(flat.len(), p.param_count());
        assert_eq!(MlpParams::from_flat(3, 4, &flat).unwrap(), p);
        assert!(MlpParams::from_flat(3, 4, &flat[1..]).is_err());
    }

    #[test]
    fn sgd_step_cases() {
        let p = MlpParams::init(2, 3, 0.3, &mut ChaCha8Rng::seed_from_u64(8));
        let g = MlpGradient(p.clone());
        assert_eq!(sgd_step(&p, &g, 0.5, 0.0), p);
        let zeroed = sgd_step(&p, &g, 1.0, 1.0);
        assert!(zeroed.to_flat().iter().all(|&v| v == 0.0));

        // weight scales eta
        let (_, g) = p.loss_and_gradient(&[0.3, 0.1], 1.0, 0.0, 1).unwrap();
        assert_eq!(sgd_step(&p, &g, 0.2, 0.5), sgd_step(&p, &g, 0.1, 1.0));
    }

    #[test]
    fn zero_input_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = MlpParams::init(0, 3, 1.0, &mut rng);
        p.b1 = vec![0.5, -0.2, 0.1];
        assert!(p.forward(&[]).unwrap().is_finite());
        let (_, g) = p.loss_and_gradient(&[], 1.0, 0.0, 1).unwrap();
        assert_eq!(g.0.w1.cols(), 0);
    }
}
