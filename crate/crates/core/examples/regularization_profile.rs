//! How the ridge penalty on the basis weights changes the spread of
//! cross-validated error across configurations.

use srbfn::dataset::synthetic;
use srbfn::evaluation::{grid_sweep, regularization_profile, HyperParams, RunSettings};

fn main() -> srbfn::Result<()> {
    let data = synthetic::two_branch(300, 0.3, 8);
    let base = HyperParams {
        m: 4,
        epsilon: 0.1,
        eta: 0.03,
        lambda_p: 0.0001,
        chi: 0.01,
        kappa: 12,
        lambda_s: 0.0,
    };
    let mut configs = Vec::new();
    for (m, epsilon) in [(2, 0.0), (4, 0.1), (8, 0.35)] {
        for lambda_s in [0.0, 1.0, 3.0, 5.0] {
            configs.push(HyperParams { m, epsilon, lambda_s, ..base });
        }
    }
    let settings = RunSettings {
        dataset: "two-branch".into(),
        epochs: 8,
        k: 4,
        n_sims: 2,
        ..RunSettings::default()
    };
    let out = grid_sweep(&data, &configs, &settings, None, 1)?;

    println!("{:>8} {:>10} {:>10} {:>10}", "lambda_s", "mean", "mean std", "spread");
    for p in regularization_profile(&out.results)? {
        println!(
            "{:>8} {:>10.4} {:>10.4} {:>10.4}",
            p.lambda_s, p.mean_of_means, p.mean_of_stds, p.std_of_means
        );
    }
    Ok(())
}
