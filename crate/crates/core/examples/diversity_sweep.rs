//! Sweep the number of hypotheses and the diversity parameter, then compare
//! the error with and without relaxation at fixed M.

use srbfn::dataset::synthetic;
use srbfn::evaluation::{
    diversity_comparison, diversity_curve, grid_sweep, HyperParams, RunSettings,
};

fn main() -> srbfn::Result<()> {
    let data = synthetic::two_branch(300, 0.3, 6);
    let base = HyperParams {
        m: 1,
        epsilon: 0.0,
        eta: 0.03,
        lambda_p: 0.0001,
        chi: 0.01,
        kappa: 12,
        lambda_s: 3.0,
    };
    let mut configs = vec![base];
    for m in [3, 6] {
        for epsilon in [0.0, 0.1, 0.35] {
            configs.push(HyperParams { m, epsilon, ..base });
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

    println!("{:<14} {:>8} {:>8} {:>4}", "cell", "rmse", "ci90", "n");
    for c in diversity_curve(&out.results)? {
        println!("{:<14} {:>8.4} {:>8.4} {:>4}", c.label(), c.mean, c.ci_half_width, c.n);
    }
    for m in [3, 6] {
        let p = diversity_comparison(&out.results, m, 0.0, 0.35)?;
        println!(
            "M={m}: eps 0.35 minus eps 0 = {:+.4} +/- {:.4} over {} pairs",
            p.mean_diff, p.ci_half_width, p.pairs
        );
    }
    Ok(())
}
