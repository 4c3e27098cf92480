//! Build the structured dataset from a trained ensemble and inspect the
//! Gaussian features and ridge weights fitted on it.

use srbfn::dataset::synthetic;
use srbfn::mhp::{self, MhpConfig};
use srbfn::model::{fit, normal_equation_residual};
use srbfn::structured::{build_structured, feature_map, fit_basis, Source};

fn main() -> srbfn::Result<()> {
    let data = synthetic::two_branch(300, 0.3, 4);
    let cfg = MhpConfig { m: 4, epsilon: 0.1, kappa: 16, epochs: 20, seed: 2, ..MhpConfig::default() };
    let ens = mhp::train(&data, &cfg)?;

    let x = ens.standardize(&data.features)?;
    let sd = build_structured(&ens, &x, Source::Train)?;
    println!("D is {} x {}", sd.d.rows(), sd.d.cols());
    for i in 0..3 {
        println!("  row {i}: {:?}  y = {:.3}", sd.d.row(i), data.targets[i]);
    }

    let basis = fit_basis(&sd)?;
    println!("mu    {:?}", basis.mu);
    println!("sigma {:?}", basis.sigma);

    let phi = feature_map(&sd, &basis)?;
    println!("phi row 0 {:?}", phi.row(0));

    for lambda_s in [0.0, 1.0, 5.0] {
        let w = fit(&phi, &data.targets, lambda_s)?;
        let res = normal_equation_residual(&phi, &data.targets, lambda_s, &w)?;
        println!("lambda_s={lambda_s}: w = {w:.3?}  residual {res:.1e}");
    }
    Ok(())
}
