//! Winner-takes-all training on a target with two modes at the same input.
//! A single predictor regresses to the mean; two hypotheses split the modes.

use srbfn::dataset::synthetic;
use srbfn::matrix::Matrix;
use srbfn::mhp::{self, MhpConfig};

fn main() -> srbfn::Result<()> {
    let data = synthetic::bimodal_at_zero(400, 3);
    let x = Matrix::zeros(1, 1);

    for (m, epsilon) in [(1, 0.0), (2, 0.0), (2, 0.2), (4, 0.0)] {
        let cfg = MhpConfig {
            m,
            epsilon,
            kappa: 20,
            lambda_p: 0.0,
            chi: 0.1,
            epochs: 100,
            seed: 7,
            ..MhpConfig::default()
        };
        let ens = mhp::train(&data, &cfg)?;
        // The single input column is constant, so standardization maps it to 0.
        let preds = ens.predict_matrix(&ens.standardize(&x)?)?;
        let outs: Vec<String> = preds.row(0).iter().map(|v| format!("{v:+.3}")).collect();
        println!("M={m} eps={epsilon:<4} f(0) = [{}]", outs.join(", "));
    }
    Ok(())
}
