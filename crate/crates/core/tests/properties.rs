use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use srbfn::dataset::{kfold_split, Standardizer};
use srbfn::evaluation::{mean_std, percentile_sorted, rmse};
use srbfn::matrix::{gram, solve_spd, Matrix};
use srbfn::mhp::{delta_weights, winner_index};
use srbfn::model::{fit, normal_equation_residual};
use srbfn::persist;
use srbfn::predictor::{sgd_step, MlpGradient, MlpParams};
use srbfn::structured::{feature_map, fit_basis, Source, StructuredDataset};

fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..hi, rows * cols).prop_map(move |d| Matrix::new(rows, cols, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_central_differences(
        seed in any::<u64>(),
        d in 1usize..4,
        k in 1usize..5,
        decay in prop::bool::ANY,
        y in -2.0f64..2.0,
        n in 1usize..200,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = MlpParams::init(d, k, 0.5, &mut rng);
        let x: Vec<f64> = (0..d).map(|i| (i as f64 * 0.7).sin()).collect();
        let lambda_p = if decay { 0.07 } else { 0.0 };
        let (_, g) = p.loss_and_gradient(&x, y, lambda_p, n).unwrap();
        let g = g.0.to_flat();
        let theta = p.to_flat();
        let h = 1e-5;
        for i in 0..theta.len() {
            let mut t = theta.clone();
            t[i] += h;
            let up = MlpParams::from_flat(d, k, &t).unwrap().loss_and_gradient(&x, y, lambda_p, n).unwrap().0;
            t[i] -= 2.0 * h;
            let dn = MlpParams::from_flat(d, k, &t).unwrap().loss_and_gradient(&x, y, lambda_p, n).unwrap().0;
            let fd = (up - dn) / (2.0 * h);
            let err = (g[i] - fd).abs() / g[i].abs().max(fd.abs()).max(1e-4);
            prop_assert!(err < 1e-5, "coord {}: {} vs {}", i, g[i], fd);
        }
    }

    #[test]
    fn ridge_solution_satisfies_normal_equations(
        (phi, y) in (1usize..12).prop_flat_map(|m| {
            (m * 2..m * 2 + 30).prop_flat_map(move |n| (matrix(n, m, 0.001, 1.0), prop::collection::vec(-5.0f64..5.0, n)))
        }),
        lambda_s in 0.0f64..6.0,
    ) {
        let w = fit(&phi, &y, lambda_s).unwrap();
        prop_assert!(normal_equation_residual(&phi, &y, lambda_s, &w).unwrap() < 1e-8);
    }

    #[test]
    fn cholesky_solves_spd_systems(a in matrix(6, 4, -3.0, 3.0), b in prop::collection::vec(-3.0f64..3.0, 4)) {
        let mut g = gram(&a);
        g.add_diagonal(0.5);
        let x = solve_spd(&g, &b).unwrap();
        let back = g.matvec(&x).unwrap();
        for (u, v) in back.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn delta_weights_are_a_distribution(m in 2usize..60, eps in 0.0f64..0.999, w in any::<prop::sample::Index>()) {
        let winner = w.index(m);
        let v = delta_weights(m, eps, winner).unwrap();
        prop_assert_eq!(v[winner], 1.0 - eps);
        prop_assert!(v.iter().all(|&x| x >= 0.0));
        let sum: f64 = v.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-13);
        let other = v[(winner + 1) % m];
        prop_assert!(v.iter().enumerate().all(|(j, &x)| j == winner || x == other));
    }

    #[test]
    fn winner_is_first_argmin(preds in prop::collection::vec(-4i32..4, 1..40), y in -4i32..4) {
        let preds: Vec<f64> = preds.into_iter().map(f64::from).collect();
        let y = f64::from(y);
        let w = winner_index(&preds, y);
        let loss = |p: f64| (p - y) * (p - y);
        prop_assert!(preds.iter().all(|&p| loss(preds[w]) <= loss(p)));
        prop_assert!(preds[..w].iter().all(|&p| loss(p) > loss(preds[w])));
    }

    #[test]
    fn basis_map_is_in_unit_interval(d in matrix(30, 5, -100.0, 100.0), probe in matrix(10, 5, -1e3, 1e3)) {
        let sd = StructuredDataset { d, epsilon: 0.0, source: Source::Train };
        let basis = fit_basis(&sd).unwrap();
        let phi = feature_map(&sd, &basis).unwrap();
        prop_assert!(phi.data().iter().all(|&v| v > 0.0 && v <= 1.0));
        // Far-away test points may underflow to 0 but never leave [0, 1].
        let test = StructuredDataset { d: probe, epsilon: 0.0, source: Source::Test };
        let phi = feature_map(&test, &basis).unwrap();
        prop_assert!(phi.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn folds_partition_the_rows(n in 4usize..300, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(n >= 2 * k);
        let split = kfold_split(n, k, seed).unwrap();
        let mut seen = vec![0usize; n];
        for f in 0..k {
            let test = split.test_indices(f);
            let train = split.train_indices(f);
            prop_assert_eq!(test.len() + train.len(), n);
            prop_assert!(test.iter().all(|i| !train.contains(i)));
            for i in test {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let sizes = split.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn standardized_columns_are_unit_scale(x in matrix(25, 3, -50.0, 50.0)) {
        let s = Standardizer::fit(&x).unwrap();
        let z = s.apply(&x).unwrap();
        for j in 0..z.cols() {
            let (m, sd) = mean_std(&z.col_values(j)).unwrap();
            prop_assert!(m.abs() < 1e-12);
            prop_assert!((sd - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn params_survive_persistence(seed in any::<u64>(), d in 0usize..4, k in 1usize..6) {
        let p = MlpParams::init(d, k, 3.7, &mut ChaCha8Rng::seed_from_u64(seed));
        let back: MlpParams = persist::from_json(&persist::to_json(&p).unwrap()).unwrap();
        let bits = |q: &MlpParams| q.to_flat().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&p), bits(&back));
    }

    #[test]
    fn zero_weight_step_is_identity(seed in any::<u64>(), eta in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = MlpParams::init(2, 3, 1.0, &mut rng);
        let g = MlpGradient(MlpParams::init(2, 3, 1.0, &mut rng));
        prop_assert_eq!(sgd_step(&p, &g, eta, 0.0), p);
    }

    #[test]
    fn rmse_is_scale_equivariant(v in prop::collection::vec(-10.0f64..10.0, 1..50), c in 0.1f64..10.0) {
        let zeros = vec![0.0; v.len()];
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let a = rmse(&v, &zeros).unwrap() * c;
        let b = rmse(&scaled, &zeros).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn quartiles_are_ordered(mut v in prop::collection::vec(-10.0f64..10.0, 1..60)) {
        v.sort_by(f64::total_cmp);
        let (q1, q3) = (percentile_sorted(&v, 0.25), percentile_sorted(&v, 0.75));
        prop_assert!(v[0] <= q1 && q1 <= q3 && q3 <= v[v.len() - 1]);
    }
}
