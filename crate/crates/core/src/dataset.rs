//! Dataset ingestion, per-fold standardization and seeded k-fold splits.
//!
//! Two published UCI regression files are supported directly:
//!
//! * `AirQualityUCI.csv`: `;`-separated, decimal commas, `-200` marks a missing
//!   reading. Target is absolute humidity (`AH`).
//! * `energydata_complete.csv`: `,`-separated with a leading `date` column.
//!   Target is `Appliances`.
//!
//! Any other all-numeric CSV can be loaded with [`load_csv`] by naming its
//! target column.
//!
//! Features are kept in their raw units here. Standardization is fitted per
//! training fold (see [`Standardizer`]) so held-out rows never leak into it.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{column_mean_std, Matrix};

/// Missing-value sentinel used throughout the air-quality file.
pub const AIR_QUALITY_MISSING: f64 = -200.0;
pub const AIR_QUALITY_TARGET: &str = "AH";
pub const ENERGY_TARGET: &str = "Appliances";

/// Columns with a fitted standard deviation below this are dropped.
pub const MIN_FEATURE_STD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    pub features: Matrix,
    pub targets: Vec<f64>,
    pub feature_names: Vec<String>,
    pub target_name: String,
}

/// What the loader saw and what it did about it.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    /// Non-blank data rows in the file.
    pub raw_rows: usize,
    pub raw_columns: usize,
    pub dropped_missing_target: usize,
    /// Missing cells per retained feature column, before imputation.
    pub missing_by_feature: BTreeMap<String, usize>,
    /// Feature columns dropped because every value was missing.
    pub dropped_columns: Vec<String>,
}

impl LoadReport {
    pub fn total_missing(&self) -> usize {
        self.missing_by_feature.values().sum()
    }
}

impl RegressionDataset {
    pub fn new(
        features: Matrix,
        targets: Vec<f64>,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        if features.rows() != targets.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} feature rows vs {} targets",
                features.rows(),
                targets.len()
            )));
        }
        if feature_names.len() != features.cols() {
            return Err(Error::ShapeMismatch(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.cols()
            )));
        }
        Ok(Self {
            features,
            targets,
            feature_names,
            target_name: target_name.into(),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
        }
    }

    /// A seeded random subset of `n` rows kept in original order. Returns a
    /// clone when `n >= len`.
    pub fn subsample(&self, n: usize, seed: u64) -> Self {
        if n >= self.len() {
            return self.clone();
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        idx.truncate(n);
        idx.sort_unstable();
        self.select(&idx)
    }
}

struct RawTable {
    headers: Vec<String>,
    /// `None` for empty cells.
    rows: Vec<Vec<Option<f64>>>,
}

fn read_table(
    path: &Path,
    delimiter: u8,
    decimal_comma: bool,
    skip: &[&str],
) -> Result<RawTable> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::MalformedCsv(e.to_string()))?;
    let header_record = reader
        .headers()
        .map_err(|e| Error::MalformedCsv(e.to_string()))?
        .clone();
    // Trailing delimiters leave unnamed columns; those are dropped along with
    // any explicitly skipped ones.
    let keep: Vec<(usize, String)> = header_record
        .iter()
        .enumerate()
        .map(|(i, h)| (i, h.trim().to_string()))
        .filter(|(_, h)| !h.is_empty() && !skip.iter().any(|s| s.eq_ignore_ascii_case(h)))
        .collect();
    if keep.is_empty() {
        return Err(Error::MalformedCsv("no data columns in header".into()));
    }

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(keep.len());
        for (i, name) in &keep {
            let cell = record.get(*i).unwrap_or("").trim();
            if cell.is_empty() {
                row.push(None);
                continue;
            }
            let text = if decimal_comma {
                cell.replace(',', ".")
            } else {
                cell.to_string()
            };
            let v: f64 = text.parse().map_err(|_| {
                Error::MalformedCsv(format!(
                    "non-numeric value {cell:?} in column {name:?} (data line {})",
                    line + 1
                ))
            })?;
            row.push(Some(v));
        }
        rows.push(row);
    }
    Ok(RawTable {
        headers: keep.into_iter().map(|(_, h)| h).collect(),
        rows,
    })
}

/// Drops rows with a missing target and mean-imputes missing feature cells.
fn clean(
    table: RawTable,
    target: &str,
    sentinel: Option<f64>,
) -> Result<(RegressionDataset, LoadReport)> {
    let target_col = table
        .headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::MalformedCsv(format!("target column {target:?} not found")))?;
    let is_missing = |v: Option<f64>| match v {
        None => true,
        Some(x) => sentinel.is_some_and(|s| x == s),
    };

    let mut report = LoadReport {
        raw_rows: table.rows.len(),
        raw_columns: table.headers.len(),
        ..LoadReport::default()
    };
    let rows: Vec<&Vec<Option<f64>>> = table
        .rows
        .iter()
        .filter(|r| !is_missing(r[target_col]))
        .collect();
    report.dropped_missing_target = report.raw_rows - rows.len();
    if rows.is_empty() {
        return Err(Error::EmptyAfterCleaning);
    }

    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (j, name) in table.headers.iter().enumerate() {
        if j == target_col {
            continue;
        }
        let present: Vec<f64> = rows
            .iter()
            .filter(|r| !is_missing(r[j]))
            .map(|r| r[j].unwrap())
            .collect();
        if present.is_empty() {
            report.dropped_columns.push(name.clone());
            continue;
        }
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        let missing = rows.len() - present.len();
        report.missing_by_feature.insert(name.clone(), missing);
        columns.push(
            rows.iter()
                .map(|r| if is_missing(r[j]) { mean } else { r[j].unwrap() })
                .collect(),
        );
        names.push(name.clone());
    }

    let n = rows.len();
    let d = columns.len();
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        data.extend(columns.iter().map(|c| c[i]));
    }
    let targets = rows.iter().map(|r| r[target_col].unwrap()).collect();
    let ds = RegressionDataset::new(Matrix::new(n, d, data)?, targets, names, target)?;
    Ok((ds, report))
}

pub fn load_air_quality(path: impl AsRef<Path>) -> Result<RegressionDataset> {
    load_air_quality_with_report(path).map(|(d, _)| d)
}

pub fn load_air_quality_with_report(
    path: impl AsRef<Path>,
) -> Result<(RegressionDataset, LoadReport)> {
    let table = read_table(path.as_ref(), b';', true, &["Date", "Time"])?;
    if table.headers.len() < 2 {
        return Err(Error::MalformedCsv(
            "expected ';'-separated columns; is this the UCI AirQualityUCI file?".into(),
        ));
    }
    clean(table, AIR_QUALITY_TARGET, Some(AIR_QUALITY_MISSING))
}

pub fn load_energy(path: impl AsRef<Path>) -> Result<RegressionDataset> {
    load_energy_with_report(path).map(|(d, _)| d)
}

pub fn load_energy_with_report(path: impl AsRef<Path>) -> Result<(RegressionDataset, LoadReport)> {
    let table = read_table(path.as_ref(), b',', false, &["date"])?;
    clean(table, ENERGY_TARGET, None)
}

/// Generic all-numeric CSV with a header row; empty cells are mean-imputed.
pub fn load_csv(
    path: impl AsRef<Path>,
    target: &str,
    delimiter: u8,
) -> Result<(RegressionDataset, LoadReport)> {
    let table = read_table(path.as_ref(), delimiter, false, &[])?;
    clean(table, target, None)
}

/// Per-column z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    /// Column count of the raw input.
    pub input_dim: usize,
    /// Raw columns retained, in order.
    pub kept: Vec<usize>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &Matrix) -> Result<Self> {
        let (mean, std) = column_mean_std(features)?;
        let kept: Vec<usize> = (0..features.cols())
            .filter(|&j| std[j] >= MIN_FEATURE_STD)
            .collect();
        Ok(Self {
            input_dim: features.cols(),
            means: kept.iter().map(|&j| mean[j]).collect(),
            stds: kept.iter().map(|&j| std[j]).collect(),
            kept,
        })
    }

    /// Column count after standardization.
    pub fn output_dim(&self) -> usize {
        self.kept.len()
    }

    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.input_dim {
            return Err(Error::ShapeMismatch(format!(
                "standardizer fitted on {} columns, got {}",
                self.input_dim,
                features.cols()
            )));
        }
        let d = self.kept.len();
        let mut data = Vec::with_capacity(features.rows() * d);
        for r in features.row_iter() {
            for (k, &j) in self.kept.iter().enumerate() {
                data.push((r[j] - self.means[k]) / self.stds[k]);
            }
        }
        Matrix::new(features.rows(), d, data)
    }
}

/// Assignment of each sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldSplit {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Seeded shuffle, then round-robin deal into `k` folds.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldSplit> {
    if k < 2 || n < 2 * k {
        return Err(Error::InvalidFoldCount { n, k });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldSplit { k, assignments })
}

/// Small generated datasets used by tests and examples.
pub mod synthetic {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use super::RegressionDataset;
    use crate::matrix::Matrix;

    /// `y = slope * x` with `x` uniform on `[-1, 1]`.
    pub fn linear(n: usize, slope: f64, seed: u64) -> RegressionDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ys = xs.iter().map(|x| slope * x).collect();
        RegressionDataset::new(Matrix::column(&xs), ys, vec!["x".into()], "y").unwrap()
    }

    /// Every input is `x = 0`; targets are `+1` or `-1` with equal probability.
    pub fn bimodal_at_zero(n: usize, seed: u64) -> RegressionDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys = (0..n)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        RegressionDataset::new(Matrix::zeros(n, 1), ys, vec!["x".into()], "y").unwrap()
    }

    /// A multimodal regression problem: the target follows one of two
    /// branches of a smooth curve, chosen by a latent switch that is only
    /// partially visible through a noisy input feature.
    pub fn two_branch(n: usize, noise: f64, seed: u64) -> RegressionDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = Normal::new(0.0, noise.max(1e-12)).unwrap();
        let z = Normal::new(0.0, 0.8).unwrap();
        let mut rows = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x1: f64 = rng.random_range(-2.0..2.0);
            let x2: f64 = rng.random_range(-1.0..1.0);
            let branch = rng.random_bool(0.5);
            let hint = if branch { 1.0 } else { -1.0 } + z.sample(&mut rng);
            let base = 10.0 + 3.0 * x1.sin() + x2;
            let y = if branch { base + 4.0 } else { base - 4.0 } + eps.sample(&mut rng);
            rows.push([x1, x2, hint]);
            ys.push(y);
        }
        RegressionDataset::new(
            Matrix::from_rows(&rows).unwrap(),
            ys,
            vec!["x1".into(), "x2".into(), "hint".into()],
            "y",
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const AIR_HEADER: &str = "Date;Time;CO(GT);PT08.S1(CO);T;RH;AH;;\n";

    #[test]
    fn air_quality_drops_missing_target() {
        let f = write_tmp(&format!(
            "{AIR_HEADER}\
             10/03/2004;18.00.00;2,6;1360;13,6;48,9;0,7578;;\n\
             10/03/2004;19.00.00;2;1292;13,3;47,7;-200;;\n\
             10/03/2004;20.00.00;2,2;1402;11,9;54,0;0,7502;;\n\
             ;;;;;;;;\n"
        ));
        let (ds, rep) = load_air_quality_with_report(f.path()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(rep.raw_rows, 3);
        assert_eq!(rep.dropped_missing_target, 1);
        assert_eq!(ds.target_name, "AH");
        assert_eq!(ds.feature_names, vec!["CO(GT)", "PT08.S1(CO)", "T", "RH"]);
        assert_eq!(ds.targets, vec![0.7578, 0.7502]);
        assert_eq!(ds.features.row(0), &[2.6, 1360.0, 13.6, 48.9]);
    }

    #[test]
    fn air_quality_imputes_feature_mean() {
        let f = write_tmp(&format!(
            "{AIR_HEADER}\
             10/03/2004;18.00.00;2,6;1360;13,6;48,9;0,7578;;\n\
             10/03/2004;19.00.00;-200;1292;13,3;47,7;0,7255;;\n\
             10/03/2004;20.00.00;2,2;1402;11,9;54,0;0,7502;;\n"
        ));
        let (ds, rep) = load_air_quality_with_report(f.path()).unwrap();
        assert_eq!(ds.len(), 3);
        // (2.6 + 2.2) / 2
        assert!((ds.features.get(1, 0) - 2.4).abs() < 1e-15);
        assert_eq!(rep.missing_by_feature["CO(GT)"], 1);
        assert_eq!(rep.total_missing(), 1);
    }

    #[test]
    fn air_quality_rejects_comma_file() {
        let f = write_tmp("Date,Time,CO,AH\n1,2,3,4\n");
        assert!(matches!(load_air_quality(f.path()), Err(Error::MalformedCsv(_))));
    }

    #[test]
    fn air_quality_rejects_text_cell() {
        let f = write_tmp(&format!("{AIR_HEADER}10/03/2004;18.00.00;abc;1;2;3;0,5;;\n"));
        assert!(matches!(load_air_quality(f.path()), Err(Error::MalformedCsv(_))));
    }

    #[test]
    fn all_targets_missing_is_empty() {
        let f = write_tmp(&format!("{AIR_HEADER}10/03/2004;18.00.00;1;1;2;3;-200;;\n"));
        assert!(matches!(load_air_quality(f.path()), Err(Error::EmptyAfterCleaning)));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_energy("/definitely/not/here.csv"),
            Err(Error::FileNotFound(_))
        ));
    }

    fn energy_fixture(extra_cols: usize, rows: usize, with_target: bool) -> String {
        let mut header = vec!["\"date\"".to_string()];
        header.push(if with_target { "\"Appliances\"" } else { "\"Other\"" }.to_string());
        for c in 0..extra_cols {
            header.push(format!("\"c{c}\""));
        }
        let mut s = header.join(",") + "\n";
        for r in 0..rows {
            let mut cells = vec![format!("\"2016-01-11 17:{:02}:00\"", r * 10)];
            cells.push(format!("{}", 50 + 10 * r));
            for c in 0..extra_cols {
                cells.push(format!("{}.5", r * c));
            }
            s += &(cells.join(",") + "\n");
        }
        s
    }

    #[test]
    fn energy_column_arithmetic() {
        let f = write_tmp(&energy_fixture(28, 5, true));
        let ds = load_energy(f.path()).unwrap();
        assert_eq!(ds.len(), 5);
        assert_eq!(ds.dim(), 28);
        assert_eq!(ds.targets, vec![50.0, 60.0, 70.0, 80.0, 90.0]);
    }

    #[test]
    fn energy_missing_target_header() {
        let f = write_tmp(&energy_fixture(3, 5, false));
        assert!(matches!(load_energy(f.path()), Err(Error::MalformedCsv(_))));
    }

    #[test]
    fn loading_is_idempotent() {
        let f = write_tmp(&energy_fixture(4, 6, true));
        assert_eq!(load_energy(f.path()).unwrap(), load_energy(f.path()).unwrap());
    }

    #[test]
    fn standardizer_two_point() {
        let m = Matrix::from_rows(&[[0.0, 7.0], [2.0, 7.0]]).unwrap();
        let s = Standardizer::fit(&m).unwrap();
        assert_eq!(s.kept, vec![0]);
        assert_eq!(s.means, vec![1.0]);
        assert!((s.stds[0] - 2f64.sqrt()).abs() < 1e-15);
        let out = s.apply(&m).unwrap();
        assert_eq!(out.cols(), 1);
        assert!((out.get(0, 0) + 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn standardizer_rejects_wrong_width() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        let s = Standardizer::fit(&m).unwrap();
        assert!(s.apply(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn kfold_sizes() {
        let s = kfold_split(10, 5, 1).unwrap();
        assert_eq!(s.fold_sizes(), vec![2; 5]);
        let mut sizes = kfold_split(10, 3, 1).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert_eq!(kfold_split(10, 3, 9).unwrap(), kfold_split(10, 3, 9).unwrap());
    }

    #[test]
    fn kfold_rejects_bad_k() {
        assert!(matches!(kfold_split(10, 1, 0), Err(Error::InvalidFoldCount { .. })));
        assert!(matches!(kfold_split(5, 3, 0), Err(Error::InvalidFoldCount { .. })));
    }

    #[test]
    fn subsample_is_seeded_and_ordered() {
        let ds = synthetic::linear(50, 2.0, 1);
        let a = ds.subsample(10, 4);
        assert_eq!(a.len(), 10);
        assert_eq!(a, ds.subsample(10, 4));
        assert_eq!(ds.subsample(100, 4), ds);
    }
}
