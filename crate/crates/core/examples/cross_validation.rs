//! Repeated k-fold cross-validation of one configuration, with the per-fold
//! scores of all three models.

use srbfn::dataset::synthetic;
use srbfn::evaluation::{cross_validate, HyperParams, RunSettings};

fn main() -> srbfn::Result<()> {
    let data = synthetic::two_branch(400, 0.3, 5);
    let hyper = HyperParams {
        m: 5,
        epsilon: 0.1,
        eta: 0.03,
        lambda_p: 0.0001,
        chi: 0.01,
        kappa: 16,
        lambda_s: 3.0,
    };
    let settings = RunSettings {
        dataset: "two-branch".into(),
        epochs: 10,
        k: 5,
        n_sims: 2,
        ..RunSettings::default()
    };
    let cv = cross_validate(&data, &hyper, &settings)?;

    println!("{}", cv.srbfn.key);
    for r in [&cv.srbfn, &cv.arithmetic, &cv.linear] {
        let folds: Vec<String> = r
            .test_rmse
            .iter()
            .map(|v| v.map_or("fail".into(), |v| format!("{v:.3}")))
            .collect();
        println!(
            "{:<20} mean {:.4} std {:.4}  [{}]",
            r.model.label(),
            r.mean_rmse.unwrap_or(f64::NAN),
            r.std_rmse.unwrap_or(f64::NAN),
            folds.join(" ")
        );
    }
    Ok(())
}
