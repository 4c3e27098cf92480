//! Dense row-major matrices and the handful of kernels the model needs:
//! Gram products, SPD solves via Cholesky, and column statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major `f64` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Single-column matrix.
    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics; an N x 0 matrix still has N (empty) rows.
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn col_values(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// New matrix holding the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// New matrix holding the given columns, in order.
    pub fn select_cols(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for r in self.row_iter() {
            data.extend(indices.iter().map(|&j| r[j]));
        }
        Self {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matvec: {} columns vs vector of {}",
                self.cols,
                x.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// `Aᵀ v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "tr_matvec: {} rows vs vector of {}",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &vi) in self.row_iter().zip(v) {
            for (o, &a) in out.iter_mut().zip(r) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    /// Adds `value` to every diagonal entry of a square matrix.
    pub fn add_diagonal(&mut self, value: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i] += value;
        }
    }
}

#[inline]
/// Inner product with four independent accumulators so the loop vectorizes.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `AᵀA`. Only the upper triangle is accumulated; the lower one is a mirror,
/// so the result is exactly symmetric.
pub fn gram(a: &Matrix) -> Matrix {
    let n = a.cols;
    let mut g = Matrix::zeros(n, n);
    for r in a.row_iter() {
        for i in 0..n {
            let ri = r[i];
            if ri == 0.0 {
                continue;
            }
            let gi = &mut g.data[i * n..(i + 1) * n];
            for j in i..n {
                gi[j] += ri * r[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            g.data[i * n + j] = g.data[j * n + i];
        }
    }
    g
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::ShapeMismatch(format!(
                "cholesky needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        check_symmetric(a)?;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: j, value: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs has length {}, system is {n}x{n}",
                b.len()
            )));
        }
        // L z = b
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.l[i * n + k] * z[k];
            }
            z[i] = s / self.l[i * n + i];
        }
        // Lᵀ x = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * z[k];
            }
            z[i] = s / self.l[i * n + i];
        }
        Ok(z)
    }
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    let n = a.rows;
    let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (a.get(i, j) - a.get(j, i)).abs() > tol {
                return Err(Error::ShapeMismatch(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Cholesky::factor(a)?.solve(b)
}

/// Per-column mean and sample standard deviation (`N - 1` denominator).
pub fn column_mean_std(a: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.rows < 2 {
        return Err(Error::InsufficientRows(a.rows));
    }
    let n = a.rows as f64;
    let mut mean = vec![0.0; a.cols];
    for r in a.row_iter() {
        for (m, &v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; a.cols];
    for r in a.row_iter() {
        for ((s, &v), &m) in var.iter_mut().zip(r).zip(&mean) {
            let d = v - m;
            *s += d * d;
        }
    }
    let std = var.into_iter().map(|s| (s / (n - 1.0)).sqrt()).collect();
    Ok((mean, std))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    // Independent oracles: textbook triple loop, partial-pivot elimination,
    // two-pass statistics.
    fn triple_loop_gram(a: &Matrix) -> Vec<f64> {
        let n = a.cols();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..a.rows() {
                    out[i * n + j] += a.get(k, i) * a.get(k, j);
                }
            }
        }
        out
    }

    fn gauss_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = a.rows();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = a.row(i).to_vec();
                r.push(b[i]);
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap())
                .unwrap();
            m.swap(c, p);
            for r in (c + 1)..n {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|k| m[i][k] * x[k]).sum();
            x[i] = (m[i][n] - s) / m[i][i];
        }
        x
    }

    #[test]
    fn gram_small_cases() {
        let a = Matrix::column(&[1.0, 2.0]);
        assert_eq!(gram(&a).data(), &[5.0]);
        assert_eq!(gram(&Matrix::identity(3)), Matrix::identity(3));
    }

    #[test]
    fn gram_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 5, 3);
        let g = gram(&a);
        for (x, y) in g.data().iter().zip(triple_loop_gram(&a)) {
            assert!((x - y).abs() < 1e-12);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(i, j).to_bits(), g.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn solve_spd_trivial() {
        assert_eq!(solve_spd(&Matrix::identity(2), &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let a = Matrix::from_rows(&[[4.0, 0.0], [0.0, 9.0]]).unwrap();
        assert_eq!(solve_spd(&a, &[8.0, 27.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn solve_spd_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = random_matrix(&mut rng, 6, 6);
        let mut a = gram(&b);
        a.add_diagonal(1.0);
        let rhs: Vec<f64> = (0..6).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = solve_spd(&a, &rhs).unwrap();
        for (u, v) in x.iter().zip(gauss_solve(&a, &rhs)) {
            assert!((u - v).abs() < 1e-9, "{u} vs {v}");
        }
    }

    #[test]
    fn solve_spd_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_spd(&a, &[1.0, 1.0]),
            Err(Error::NotPositiveDefinite { row: 1, .. })
        ));
        let singular = Matrix::zeros(2, 2);
        assert!(matches!(
            solve_spd(&singular, &[0.0, 0.0]),
            Err(Error::NotPositiveDefinite { row: 0, .. })
        ));
    }

    #[test]
    fn solve_spd_rejects_asymmetric() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(solve_spd(&a, &[1.0, 1.0]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn column_stats_small_cases() {
        let (m, s) = column_mean_std(&Matrix::column(&[1.0, 3.0])).unwrap();
        assert_eq!(m, vec![2.0]);
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-15);
        let (m, s) = column_mean_std(&Matrix::column(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!((m[0], s[0]), (5.0, 0.0));
        assert!(matches!(
            column_mean_std(&Matrix::column(&[1.0])),
            Err(Error::InsufficientRows(1))
        ));
    }

    #[test]
    fn column_stats_match_two_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 100, 4);
        let (m, s) = column_mean_std(&a).unwrap();
        for j in 0..4 {
            let col = a.col_values(j);
            let mean = col.iter().sum::<f64>() / 100.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 99.0;
            assert!((m[j] - mean).abs() < 1e-12);
            assert!((s[j] - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_column_matrix_rows() {
        let m = Matrix::zeros(3, 0);
        assert_eq!(m.row_iter().count(), 3);
        assert_eq!(m.matvec(&[]).unwrap(), vec![0.0; 3]);
    }
}
