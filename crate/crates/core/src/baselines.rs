//! Comparison models: the uniform average of the hypotheses and a ridge
//! linear model with intercept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{gram, solve_spd, Matrix};
use crate::mhp::HypothesisEnsemble;

/// Mean of the `M` hypotheses on already standardized inputs.
pub fn arithmetic_combine(ens: &HypothesisEnsemble, x: &Matrix) -> Result<Vec<f64>> {
    let d = ens.predict_matrix(x)?;
    Ok(row_means(&d))
}

pub fn row_means(d: &Matrix) -> Vec<f64> {
    let m = d.cols() as f64;
    d.row_iter().map(|r| r.iter().sum::<f64>() / m).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

/// Ridge regression on centred data; the intercept restores the means.
pub fn linear_fit(x: &Matrix, y: &[f64], lambda: f64) -> Result<LinearModel> {
    if x.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} targets",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() == 0 {
        return Err(Error::InsufficientRows(0));
    }
    let n = x.rows() as f64;
    let d = x.cols();
    let mut x_mean = vec![0.0; d];
    for r in x.row_iter() {
        for (m, v) in x_mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    x_mean.iter_mut().for_each(|m| *m /= n);
    let y_mean = y.iter().sum::<f64>() / n;

    let mut xc = x.clone();
    for i in 0..xc.rows() {
        for (v, m) in xc.row_mut(i).iter_mut().zip(&x_mean) {
            *v -= m;
        }
    }
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let coefficients = if d == 0 {
        Vec::new()
    } else {
        let mut a = gram(&xc);
        a.add_diagonal(lambda);
        solve_spd(&a, &xc.tr_matvec(&yc)?)?
    };
    let intercept = y_mean
        - coefficients
            .iter()
            .zip(&x_mean)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    Ok(LinearModel {
        coefficients,
        intercept,
        lambda,
    })
}

pub fn linear_predict(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    Ok(x
        .matvec(&model.coefficients)?
        .into_iter()
        .map(|v| v + model.intercept)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_recovery() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0], [0.5, 3.0]])
            .unwrap();
        let y: Vec<f64> = x.row_iter().map(|r| 3.0 * r[0] - 2.0 * r[1] + 0.5).collect();
        let m = linear_fit(&x, &y, 0.0).unwrap();
        assert!((m.coefficients[0] - 3.0).abs() < 1e-8);
        assert!((m.coefficients[1] + 2.0).abs() < 1e-8);
        assert!((m.intercept - 0.5).abs() < 1e-8);
        let p = linear_predict(&m, &x).unwrap();
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_column_gets_zero_coefficient() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [2.0, 0.0], [4.0, 0.0]]).unwrap();
        let m = linear_fit(&x, &[1.0, 2.0, 5.0], 1.0).unwrap();
        assert_eq!(m.coefficients[1], 0.0);
    }

    #[test]
    fn symmetric_combiner() {
        let d = Matrix::from_rows(&[[1.0, -1.0], [1.0, -1.0]]).unwrap();
        assert_eq!(row_means(&d), vec![0.0, 0.0]);
    }
}
