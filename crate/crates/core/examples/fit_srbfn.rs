//! Train an ensemble on a two-branch synthetic problem and compare the
//! s-RBFN against the arithmetic combiner and a ridge linear model.

use srbfn::baselines::{arithmetic_combine, linear_fit, linear_predict};
use srbfn::dataset::{synthetic, Standardizer};
use srbfn::evaluation::rmse;
use srbfn::mhp::MhpConfig;
use srbfn::model::SRbfnModel;

fn main() -> srbfn::Result<()> {
    let train = synthetic::two_branch(800, 0.3, 1);
    let test = synthetic::two_branch(400, 0.3, 2);

    let cfg = MhpConfig {
        m: 5,
        epsilon: 0.1,
        kappa: 20,
        epochs: 30,
        seed: 11,
        ..MhpConfig::default()
    };
    let t = std::time::Instant::now();
    let model = SRbfnModel::train(&train, &cfg, 3.0)?;
    println!("trained {} hypotheses in {:.2?}", model.ensemble.m(), t.elapsed());
    println!("basis weights: {:?}", model.w);

    let srbfn = rmse(&model.predict(&test.features)?, &test.targets)?;
    let x_test = model.ensemble.standardize(&test.features)?;
    let arith = rmse(&arithmetic_combine(&model.ensemble, &x_test)?, &test.targets)?;

    let scaler = Standardizer::fit(&train.features)?;
    let lm = linear_fit(&scaler.apply(&train.features)?, &train.targets, 3.0)?;
    let linear = rmse(&linear_predict(&lm, &scaler.apply(&test.features)?)?, &test.targets)?;

    println!("test RMSE  s-RBFN {srbfn:.4}  arithmetic {arith:.4}  linear {linear:.4}");
    Ok(())
}
