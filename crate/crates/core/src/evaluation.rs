//! Cross-validation harness, hyper-parameter sweeps and the summaries built
//! from their results.
//!
//! One trained ensemble per (configuration, fold, simulation) feeds the
//! s-RBFN and the arithmetic combiner, so their errors are paired. Configs
//! that differ only in `λ_s` also share ensembles: `λ_s` only enters the
//! closed-form fit.
//!
//! Seeds are derived by hashing a label with the master seed, so adding a
//! configuration never changes the numbers of any other one:
//!
//! * fold split of simulation `s`: `("folds", master, s)`
//! * ensemble of `(config, s, fold)`: `("ensemble", master, ensemble_key, s, fold)`

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{linear_fit, linear_predict, row_means};
use crate::dataset::{kfold_split, RegressionDataset, Standardizer};
use crate::error::{Error, Result};
use crate::mhp::{self, MhpConfig};
use crate::model;
use crate::structured::{build_structured, feature_map, fit_basis, Source};

/// Version tag carried by every results-file record.
pub const RESULTS_SCHEMA: u32 = 1;

/// z-value of a two-sided 90% normal interval.
pub const Z_90: f64 = 1.645;

const CURATED_FIXTURE: &str = include_str!("../fixtures/curated_80.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Srbfn,
    Arithmetic,
    Linear,
}

impl ModelTag {
    pub const ALL: [ModelTag; 3] = [ModelTag::Srbfn, ModelTag::Arithmetic, ModelTag::Linear];

    pub fn label(self) -> &'static str {
        match self {
            ModelTag::Srbfn => "s-RBFN",
            ModelTag::Arithmetic => "Arithmetic Combiner",
            ModelTag::Linear => "Linear Model",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::Srbfn => "srbfn",
            ModelTag::Arithmetic => "arithmetic",
            ModelTag::Linear => "linear",
        })
    }
}

/// The seven swept hyper-parameters of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub m: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub lambda_p: f64,
    pub chi: f64,
    pub kappa: usize,
    pub lambda_s: f64,
}

impl HyperParams {
    /// Identifies the trained ensemble; excludes `λ_s`.
    pub fn ensemble_key(&self) -> String {
        format!(
            "M={};eps={};eta={};lambda_p={};chi={};kappa={}",
            self.m, self.epsilon, self.eta, self.lambda_p, self.chi, self.kappa
        )
    }

    pub fn key(&self) -> String {
        format!("{};lambda_s={}", self.ensemble_key(), self.lambda_s)
    }

    pub fn mhp_config(&self, epochs: usize, seed: u64) -> MhpConfig {
        MhpConfig {
            m: self.m,
            epsilon: self.epsilon,
            eta: self.eta,
            lambda_p: self.lambda_p,
            chi: self.chi,
            kappa: self.kappa,
            epochs,
            seed,
        }
    }
}

/// Everything besides the hyper-parameters that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    /// Free-form dataset label, recorded in every result.
    pub dataset: String,
    pub epochs: usize,
    pub k: usize,
    pub n_sims: usize,
    pub subsample: Option<usize>,
    pub master_seed: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            dataset: "unnamed".into(),
            epochs: 50,
            k: 10,
            n_sims: 10,
            subsample: None,
            master_seed: 0,
        }
    }
}

impl RunSettings {
    pub fn key(&self) -> String {
        let sub = self.subsample.map_or_else(|| "all".to_string(), |n| n.to_string());
        format!(
            "dataset={};epochs={};k={};sims={};subsample={};seed={}",
            self.dataset, self.epochs, self.k, self.n_sims, sub, self.master_seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    #[serde(flatten)]
    pub hyper: HyperParams,
    #[serde(flatten)]
    pub settings: RunSettings,
}

impl ConfigSnapshot {
    pub fn key(&self) -> String {
        format!("{}|{}", self.settings.key(), self.hyper.key())
    }
}

/// Cross-validated errors of one model under one configuration.
///
/// `test_rmse[sim * k + fold]` is `None` when that cell failed numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema: u32,
    pub key: String,
    pub model: ModelTag,
    pub config: ConfigSnapshot,
    pub test_rmse: Vec<Option<f64>>,
    pub train_rmse: Vec<Option<f64>>,
    pub failed: usize,
    pub mean_rmse: Option<f64>,
    pub std_rmse: Option<f64>,
    pub wall_seconds: f64,
}

impl RunResult {
    fn new(
        model: ModelTag,
        config: ConfigSnapshot,
        test_rmse: Vec<Option<f64>>,
        train_rmse: Vec<Option<f64>>,
        wall_seconds: f64,
    ) -> Self {
        let ok: Vec<f64> = test_rmse.iter().flatten().copied().collect();
        let (mean_rmse, std_rmse) = match mean_std(&ok) {
            Some((m, s)) => (Some(m), Some(s)),
            None => (None, None),
        };
        Self {
            schema: RESULTS_SCHEMA,
            key: config.key(),
            model,
            failed: test_rmse.len() - ok.len(),
            config,
            test_rmse,
            train_rmse,
            mean_rmse,
            std_rmse,
            wall_seconds,
        }
    }

    /// Successful test RMSEs.
    pub fn observations(&self) -> Vec<f64> {
        self.test_rmse.iter().flatten().copied().collect()
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

pub fn rmse(y_hat: &[f64], y: &[f64]) -> Result<f64> {
    if y_hat.len() != y.len() || y.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "rmse of {} predictions vs {} targets",
            y_hat.len(),
            y.len()
        )));
    }
    let sse: f64 = y_hat.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / y.len() as f64).sqrt())
}

/// Stable 64-bit seed from labelled parts.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let digest = Sha256::digest(parts.join("\u{1f}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn fold_seed(master: u64, sim: usize) -> u64 {
    derive_seed(&["folds", &master.to_string(), &sim.to_string()])
}

pub fn ensemble_seed(master: u64, ensemble_key: &str, sim: usize, fold: usize) -> u64 {
    derive_seed(&[
        "ensemble",
        &master.to_string(),
        ensemble_key,
        &sim.to_string(),
        &fold.to_string(),
    ])
}

pub fn subsample_seed(master: u64) -> u64 {
    derive_seed(&["subsample", &master.to_string()])
}

/// Applies `settings.subsample`, if any.
pub fn prepare_data(data: &RegressionDataset, settings: &RunSettings) -> RegressionDataset {
    match settings.subsample {
        Some(n) => data.subsample(n, subsample_seed(settings.master_seed)),
        None => data.clone(),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Pair {
    test: Option<f64>,
    train: Option<f64>,
}

struct CellOutcome {
    srbfn: Vec<Pair>,
    arithmetic: Pair,
    linear: Vec<Pair>,
}

fn is_numerical(e: &Error) -> bool {
    matches!(e, Error::NumericalDivergence { .. } | Error::NotPositiveDefinite { .. })
}

fn run_cell(
    data: &RegressionDataset,
    train_idx: &[usize],
    test_idx: &[usize],
    ens_cfg: &MhpConfig,
    lambdas: &[f64],
) -> Result<CellOutcome> {
    let train = data.select(train_idx);
    let test = data.select(test_idx);

    let linear = {
        let scaler = Standardizer::fit(&train.features)?;
        let xtr = scaler.apply(&train.features)?;
        let xte = scaler.apply(&test.features)?;
        lambdas
            .iter()
            .map(|&lam| match linear_fit(&xtr, &train.targets, lam) {
                Ok(lm) => Ok(Pair {
                    test: Some(rmse(&linear_predict(&lm, &xte)?, &test.targets)?),
                    train: Some(rmse(&linear_predict(&lm, &xtr)?, &train.targets)?),
                }),
                Err(e) if is_numerical(&e) => Ok(Pair::default()),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?
    };

    let failed = CellOutcome {
        srbfn: vec![Pair::default(); lambdas.len()],
        arithmetic: Pair::default(),
        linear: linear.clone(),
    };
    let ens = match mhp::train(&train, ens_cfg) {
        Ok(e) => e,
        Err(e) if is_numerical(&e) => return Ok(failed),
        Err(e) => return Err(e),
    };
    let xtr = ens.standardize(&train.features)?;
    let xte = ens.standardize(&test.features)?;
    let (sd_tr, sd_te) = match (
        build_structured(&ens, &xtr, Source::Train),
        build_structured(&ens, &xte, Source::Test),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) if is_numerical(&e) => return Ok(failed),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let arithmetic = Pair {
        test: Some(rmse(&row_means(&sd_te.d), &test.targets)?),
        train: Some(rmse(&row_means(&sd_tr.d), &train.targets)?),
    };
    let basis = fit_basis(&sd_tr)?;
    let phi_tr = feature_map(&sd_tr, &basis)?;
    let phi_te = feature_map(&sd_te, &basis)?;
    let srbfn = lambdas
        .iter()
        .map(|&lam| match model::fit(&phi_tr, &train.targets, lam) {
            Ok(w) => Ok(Pair {
                test: Some(rmse(&phi_te.matvec(&w)?, &test.targets)?),
                train: Some(rmse(&phi_tr.matvec(&w)?, &train.targets)?),
            }),
            Err(e) if is_numerical(&e) => Ok(Pair::default()),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellOutcome {
        srbfn,
        arithmetic,
        linear,
    })
}

/// Cross-validates a group of configurations sharing one ensemble key.
///
/// Returns three results (s-RBFN, arithmetic, linear) per entry of `group`,
/// in order.
pub fn cross_validate_group(
    data: &RegressionDataset,
    group: &[HyperParams],
    settings: &RunSettings,
) -> Result<Vec<RunResult>> {
    let Some(first) = group.first() else {
        return Ok(Vec::new());
    };
    let ens_key = first.ensemble_key();
    if group.iter().any(|h| h.ensemble_key() != ens_key) {
        return Err(Error::InvalidConfig("group mixes ensemble configurations".into()));
    }
    first.mhp_config(settings.epochs, 0).validate()?;
    if settings.n_sims == 0 {
        return Err(Error::InvalidConfig("n_sims must be >= 1".into()));
    }
    let start = Instant::now();
    let data = prepare_data(data, settings);
    let k = settings.k;
    let splits = (0..settings.n_sims)
        .map(|s| kfold_split(data.len(), k, fold_seed(settings.master_seed, s)))
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = group.iter().map(|h| h.lambda_s).collect();

    let cells: Vec<(usize, usize)> = (0..settings.n_sims)
        .flat_map(|s| (0..k).map(move |f| (s, f)))
        .collect();
    let outcomes = cells
        .par_iter()
        .map(|&(s, f)| {
            let cfg = first.mhp_config(
                settings.epochs,
                ensemble_seed(settings.master_seed, &ens_key, s, f),
            );
            run_cell(
                &data,
                &splits[s].train_indices(f),
                &splits[s].test_indices(f),
                &cfg,
                &lambdas,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = Vec::with_capacity(group.len() * 3);
    for (li, h) in group.iter().enumerate() {
        let snapshot = ConfigSnapshot {
            hyper: *h,
            settings: settings.clone(),
        };
        let collect = |pick: &dyn Fn(&CellOutcome) -> Pair| {
            let pairs: Vec<Pair> = outcomes.iter().map(pick).collect();
            (
                pairs.iter().map(|p| p.test).collect::<Vec<_>>(),
                pairs.iter().map(|p| p.train).collect::<Vec<_>>(),
            )
        };
        let (te, tr) = collect(&|c| c.srbfn[li]);
        out.push(RunResult::new(ModelTag::Srbfn, snapshot.clone(), te, tr, elapsed));
        let (te, tr) = collect(&|c| c.arithmetic);
        out.push(RunResult::new(ModelTag::Arithmetic, snapshot.clone(), te, tr, elapsed));
        let (te, tr) = collect(&|c| c.linear[li]);
        out.push(RunResult::new(ModelTag::Linear, snapshot, te, tr, elapsed));
    }
    Ok(out)
}

/// Results of all three models for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResults {
    pub srbfn: RunResult,
    pub arithmetic: RunResult,
    pub linear: RunResult,
}

/// `k`-fold cross-validation repeated over `n_sims` simulations.
pub fn cross_validate(
    data: &RegressionDataset,
    hyper: &HyperParams,
    settings: &RunSettings,
) -> Result<CvResults> {
    let mut v = cross_validate_group(data, std::slice::from_ref(hyper), settings)?.into_iter();
    Ok(CvResults {
        srbfn: v.next().unwrap(),
        arithmetic: v.next().unwrap(),
        linear: v.next().unwrap(),
    })
}

/// Value lists to sweep; the default is the full published grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub m: Vec<usize>,
    pub kappa: Vec<usize>,
    pub eta: Vec<f64>,
    pub chi: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub lambda_p: Vec<f64>,
    pub lambda_s: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            m: vec![2, 5, 10, 20, 35],
            kappa: vec![20, 200, 2000],
            eta: vec![0.03, 0.3],
            chi: vec![0.0001, 0.01, 0.1, 1.0],
            epsilon: vec![0.0, 0.1, 0.35, 0.5],
            lambda_p: vec![0.0, 0.0001, 0.01, 0.07],
            lambda_s: vec![0.0, 3.0, 5.0],
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let empty = [
            self.m.is_empty(),
            self.kappa.is_empty(),
            self.eta.is_empty(),
            self.chi.is_empty(),
            self.epsilon.is_empty(),
            self.lambda_p.is_empty(),
            self.lambda_s.is_empty(),
        ];
        if empty.iter().any(|&e| e) {
            return Err(Error::InvalidConfig("every grid axis needs at least one value".into()));
        }
        Ok(())
    }

    /// Cartesian product, skipping `M = 1` with non-zero `ε`.
    pub fn product(&self) -> Vec<HyperParams> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &kappa in &self.kappa {
                for &eta in &self.eta {
                    for &chi in &self.chi {
                        for &epsilon in &self.epsilon {
                            if m == 1 && epsilon != 0.0 {
                                continue;
                            }
                            for &lambda_p in &self.lambda_p {
                                for &lambda_s in &self.lambda_s {
                                    out.push(HyperParams {
                                        m,
                                        epsilon,
                                        eta,
                                        lambda_p,
                                        chi,
                                        kappa,
                                        lambda_s,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// The shipped 80-configuration list (`fixtures/curated_80.csv`).
pub fn curated_configs() -> Vec<HyperParams> {
    parse_config_list(CURATED_FIXTURE).expect("bundled config fixture is valid")
}

/// Parses a config list CSV with header `M,kappa,eta,chi,eps,lambda_p,lambda_s`.
pub fn parse_config_list(text: &str) -> Result<Vec<HyperParams>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::MalformedCsv(format!("bad config row {:?}", rec)))
        };
        out.push(HyperParams {
            m: f(0)? as usize,
            kappa: f(1)? as usize,
            eta: f(2)?,
            chi: f(3)?,
            epsilon: f(4)?,
            lambda_p: f(5)?,
            lambda_s: f(6)?,
        });
    }
    Ok(out)
}

/// Groups configs by ensemble key, keeping first-seen order.
pub fn group_by_ensemble(configs: &[HyperParams]) -> Vec<Vec<HyperParams>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<HyperParams>> = BTreeMap::new();
    for c in configs {
        let key = c.ensemble_key();
        let g = groups.entry(key.clone()).or_default();
        if g.is_empty() {
            order.push(key);
        }
        if !g.iter().any(|h| h.key() == c.key()) {
            g.push(*c);
        }
    }
    order.into_iter().map(|k| groups.remove(&k).unwrap()).collect()
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// All results for the requested configs, including ones loaded from an
    /// existing results file, ordered by config list then model tag.
    pub results: Vec<RunResult>,
    /// Configurations whose computation raised an error.
    pub failed_configs: Vec<(String, String)>,
    /// Number of configurations actually computed in this call.
    pub computed: usize,
}

/// Runs every configuration in `configs`, streaming results to
/// `results_path` as groups complete. Configurations already present in the
/// file (same key, all three models) are not recomputed.
pub fn grid_sweep(
    data: &RegressionDataset,
    configs: &[HyperParams],
    settings: &RunSettings,
    results_path: Option<&Path>,
    workers: usize,
) -> Result<SweepOutcome> {
    let mut existing: Vec<RunResult> = match results_path {
        Some(p) if p.exists() => read_results(p)?,
        _ => Vec::new(),
    };
    if let Some(p) = results_path {
        // Rewrite to drop any partial trailing record left by an interruption.
        write_results(p, &existing)?;
    }
    let complete: HashSet<String> = {
        let mut by_key: BTreeMap<&str, BTreeSet<ModelTag>> = BTreeMap::new();
        for r in &existing {
            by_key.entry(&r.key).or_default().insert(r.model);
        }
        by_key
            .into_iter()
            .filter(|(_, tags)| tags.len() == ModelTag::ALL.len())
            .map(|(k, _)| k.to_string())
            .collect()
    };
    let snapshot_key = |h: &HyperParams| {
        ConfigSnapshot {
            hyper: *h,
            settings: settings.clone(),
        }
        .key()
    };
    let todo: Vec<HyperParams> = configs
        .iter()
        .filter(|h| !complete.contains(&snapshot_key(h)))
        .copied()
        .collect();
    let groups = group_by_ensemble(&todo);

    let writer = match results_path {
        Some(p) => Some(Mutex::new(OpenOptions::new().append(true).create(true).open(p)?)),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let computed: Vec<std::result::Result<Vec<RunResult>, (String, String)>> = pool.install(|| {
        groups
            .par_iter()
            .map(|g| {
                let res = cross_validate_group(data, g, settings)
                    .map_err(|e| (g[0].ensemble_key(), e.to_string()))?;
                if let Some(w) = &writer {
                    let mut file = w.lock().unwrap();
                    for r in &res {
                        let line = serde_json::to_string(r)
                            .map_err(|e| (g[0].ensemble_key(), e.to_string()))?;
                        writeln!(file, "{line}").map_err(|e| (g[0].ensemble_key(), e.to_string()))?;
                    }
                    file.flush().map_err(|e| (g[0].ensemble_key(), e.to_string()))?;
                }
                Ok(res)
            })
            .collect()
    });

    let mut failed_configs = Vec::new();
    let mut n_computed = 0;
    for c in computed {
        match c {
            Ok(v) => {
                n_computed += v.len() / ModelTag::ALL.len();
                existing.extend(v);
            }
            Err(f) => failed_configs.push(f),
        }
    }

    let mut by_key: BTreeMap<(String, ModelTag), RunResult> = BTreeMap::new();
    for r in existing {
        by_key.insert((r.key.clone(), r.model), r);
    }
    let mut results = Vec::new();
    let mut seen = HashSet::new();
    for h in configs {
        let key = snapshot_key(h);
        if !seen.insert(key.clone()) {
            continue;
        }
        for tag in ModelTag::ALL {
            if let Some(r) = by_key.remove(&(key.clone(), tag)) {
                results.push(r);
            }
        }
    }
    Ok(SweepOutcome {
        results,
        failed_configs,
        computed: n_computed,
    })
}

/// Reads a line-delimited results file. A final line without a newline that
/// fails to parse is treated as an interrupted write and skipped.
pub fn read_results(path: &Path) -> Result<Vec<RunResult>> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let ends_clean = text.is_empty() || text.ends_with('\n');
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let value: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(_) if i + 1 == lines.len() && !ends_clean => break,
            Err(e) => return Err(e.into()),
        };
        let schema = value.get("schema").and_then(|s| s.as_u64());
        if schema != Some(u64::from(RESULTS_SCHEMA)) {
            return Err(Error::SchemaMismatch(format!(
                "results line {} has schema {:?}, expected {RESULTS_SCHEMA}",
                i + 1,
                schema
            )));
        }
        out.push(serde_json::from_value(value)?);
    }
    Ok(out)
}

pub fn write_results(path: &Path, results: &[RunResult]) -> Result<()> {
    let mut text = String::new();
    for r in results {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: ModelTag,
    pub top_mean: f64,
    pub top_std: f64,
    pub top_key: String,
    pub first_quartile: f64,
    pub third_quartile: f64,
    pub configs: usize,
    pub failed_runs: usize,
    /// Configurations with no successful cell at all.
    pub failed_configs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub models: Vec<ModelSummary>,
    pub config_count: usize,
}

impl SummaryReport {
    pub fn get(&self, tag: ModelTag) -> Option<&ModelSummary> {
        self.models.iter().find(|m| m.model == tag)
    }
}

/// Best configuration and quartiles of per-config mean RMSE, per model.
pub fn quartile_summary(results: &[RunResult]) -> Result<SummaryReport> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut models = Vec::new();
    for tag in ModelTag::ALL {
        let rs: Vec<&RunResult> = results.iter().filter(|r| r.model == tag).collect();
        if rs.is_empty() {
            continue;
        }
        let failed_runs = rs.iter().map(|r| r.failed).sum();
        let ok: Vec<&RunResult> = rs.iter().copied().filter(|r| r.mean_rmse.is_some()).collect();
        if ok.is_empty() {
            return Err(Error::InsufficientObservations(format!(
                "every {tag} configuration failed"
            )));
        }
        let top = ok
            .iter()
            .min_by(|a, b| {
                a.mean_rmse
                    .unwrap()
                    .total_cmp(&b.mean_rmse.unwrap())
                    .then_with(|| a.key.cmp(&b.key))
            })
            .unwrap();
        let mut means: Vec<f64> = ok.iter().map(|r| r.mean_rmse.unwrap()).collect();
        means.sort_by(f64::total_cmp);
        models.push(ModelSummary {
            model: tag,
            top_mean: top.mean_rmse.unwrap(),
            top_std: top.std_rmse.unwrap(),
            top_key: top.key.clone(),
            first_quartile: percentile_sorted(&means, 0.25),
            third_quartile: percentile_sorted(&means, 0.75),
            configs: rs.len(),
            failed_runs,
            failed_configs: rs.len() - ok.len(),
        });
    }
    let config_count = results
        .iter()
        .map(|r| r.key.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    Ok(SummaryReport {
        models,
        config_count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversityCell {
    pub m: usize,
    pub epsilon: f64,
    pub mean: f64,
    pub ci_half_width: f64,
    pub n: usize,
}

impl DiversityCell {
    pub fn label(&self) -> String {
        format!("M={} eps={}", self.m, self.epsilon)
    }
}

/// 90% normal-approximation half width `1.645 · s / √n`.
pub fn ci90_half_width(values: &[f64]) -> Option<f64> {
    let (_, s) = mean_std(values)?;
    Some(Z_90 * s / (values.len() as f64).sqrt())
}

/// s-RBFN test RMSE per `(M, ε)`, pooling every fold, simulation and
/// configuration in the cell.
pub fn diversity_curve(results: &[RunResult]) -> Result<Vec<DiversityCell>> {
    let mut cells: BTreeMap<(usize, u64), Vec<f64>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.model == ModelTag::Srbfn) {
        let h = &r.config.hyper;
        cells
            .entry((h.m, h.epsilon.to_bits()))
            .or_default()
            .extend(r.observations());
    }
    if cells.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut out: Vec<DiversityCell> = Vec::with_capacity(cells.len());
    for ((m, eps_bits), obs) in cells {
        let epsilon = f64::from_bits(eps_bits);
        if obs.len() < 2 {
            return Err(Error::InsufficientObservations(format!(
                "cell M={m} eps={epsilon} has {} observations",
                obs.len()
            )));
        }
        let (mean, _) = mean_std(&obs).unwrap();
        out.push(DiversityCell {
            m,
            epsilon,
            mean,
            ci_half_width: ci90_half_width(&obs).unwrap(),
            n: obs.len(),
        });
    }
    out.sort_by(|a, b| a.m.cmp(&b.m).then(a.epsilon.total_cmp(&b.epsilon)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationPoint {
    pub lambda_s: f64,
    pub mean_of_means: f64,
    pub mean_of_stds: f64,
    /// Spread of mean RMSE across configurations.
    pub std_of_means: f64,
    pub configs: usize,
}

/// s-RBFN error statistics aggregated across configurations for each `λ_s`.
pub fn regularization_profile(results: &[RunResult]) -> Result<Vec<RegularizationPoint>> {
    let mut by_lambda: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.model == ModelTag::Srbfn) {
        if let (Some(m), Some(s)) = (r.mean_rmse, r.std_rmse) {
            by_lambda
                .entry(r.config.hyper.lambda_s.to_bits())
                .or_default()
                .push((m, s));
        }
    }
    if by_lambda.len() < 2 {
        return Err(Error::InsufficientObservations(format!(
            "need results for at least 2 lambda_s values, have {}",
            by_lambda.len()
        )));
    }
    let mut out: Vec<RegularizationPoint> = by_lambda
        .into_iter()
        .map(|(bits, v)| {
            let means: Vec<f64> = v.iter().map(|p| p.0).collect();
            let stds: Vec<f64> = v.iter().map(|p| p.1).collect();
            RegularizationPoint {
                lambda_s: f64::from_bits(bits),
                mean_of_means: mean_std(&means).unwrap().0,
                mean_of_stds: mean_std(&stds).unwrap().0,
                std_of_means: mean_std(&means).unwrap().1,
                configs: v.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.lambda_s.total_cmp(&b.lambda_s));
    Ok(out)
}

/// Paired difference of s-RBFN test RMSE between two `ε` values at fixed `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedComparison {
    pub m: usize,
    pub eps_base: f64,
    pub eps_alt: f64,
    pub mean_base: f64,
    pub mean_alt: f64,
    /// Mean of `alt − base` over matched cells.
    pub mean_diff: f64,
    pub ci_half_width: f64,
    pub pairs: usize,
}

impl PairedComparison {
    /// `alt` is better and the 90% interval excludes zero.
    pub fn alt_significantly_lower(&self) -> bool {
        self.mean_diff + self.ci_half_width < 0.0
    }
}

/// Matches configurations that differ only in `ε` and pairs their cells.
pub fn diversity_comparison(
    results: &[RunResult],
    m: usize,
    eps_base: f64,
    eps_alt: f64,
) -> Result<PairedComparison> {
    let strip = |r: &RunResult| {
        let mut h = r.config.hyper;
        h.epsilon = 0.0;
        format!("{}|{}", r.config.settings.key(), h.key())
    };
    let srbfn = results
        .iter()
        .filter(|r| r.model == ModelTag::Srbfn && r.config.hyper.m == m);
    let mut base: BTreeMap<String, &RunResult> = BTreeMap::new();
    let mut alt: BTreeMap<String, &RunResult> = BTreeMap::new();
    for r in srbfn {
        if r.config.hyper.epsilon == eps_base {
            base.insert(strip(r), r);
        } else if r.config.hyper.epsilon == eps_alt {
            alt.insert(strip(r), r);
        }
    }
    let (mut b_all, mut a_all, mut diffs) = (Vec::new(), Vec::new(), Vec::new());
    for (key, b) in &base {
        let Some(a) = alt.get(key) else { continue };
        for (tb, ta) in b.test_rmse.iter().zip(&a.test_rmse) {
            if let (Some(tb), Some(ta)) = (tb, ta) {
                b_all.push(*tb);
                a_all.push(*ta);
                diffs.push(ta - tb);
            }
        }
    }
    if diffs.len() < 2 {
        return Err(Error::InsufficientObservations(format!(
            "only {} matched cells for M={m}, eps {eps_base} vs {eps_alt}",
            diffs.len()
        )));
    }
    Ok(PairedComparison {
        m,
        eps_base,
        eps_alt,
        mean_base: mean_std(&b_all).unwrap().0,
        mean_alt: mean_std(&a_all).unwrap().0,
        mean_diff: mean_std(&diffs).unwrap().0,
        ci_half_width: ci90_half_width(&diffs).unwrap(),
        pairs: diffs.len(),
    })
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(header).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the results table (`summary.csv`) plus all plot data.
pub fn write_report(results: &[RunResult], dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let summary = quartile_summary(results)?;
    let rows = summary
        .models
        .iter()
        .map(|s| {
            vec![
                s.model.label().to_string(),
                fmt6(s.top_mean),
                fmt6(s.top_std),
                fmt6(s.first_quartile),
                fmt6(s.third_quartile),
                s.configs.to_string(),
                s.failed_runs.to_string(),
                s.top_key.clone(),
            ]
        })
        .collect();
    write_csv(
        &dir.join("summary.csv"),
        &[
            "model",
            "top_model",
            "std_dev",
            "first_quartile",
            "third_quartile",
            "configs",
            "failed_runs",
            "top_config",
        ],
        rows,
    )?;
    write_config_table(results, &dir.join("configs.csv"))?;
    let mut written = vec!["summary.csv".to_string(), "configs.csv".to_string()];
    written.extend(write_plot_data(results, dir)?);
    Ok(written)
}

/// One row per configuration with every model's mean, std and failure count.
pub fn write_config_table(results: &[RunResult], path: &Path) -> Result<()> {
    let mut rows: BTreeMap<String, (HyperParams, BTreeMap<ModelTag, &RunResult>)> = BTreeMap::new();
    for r in results {
        rows.entry(r.key.clone())
            .or_insert_with(|| (r.config.hyper, BTreeMap::new()))
            .1
            .insert(r.model, r);
    }
    let opt = |v: Option<f64>| v.map_or_else(String::new, fmt6);
    let table = rows
        .into_values()
        .map(|(h, models)| {
            let mut row = vec![
                h.m.to_string(),
                h.kappa.to_string(),
                h.eta.to_string(),
                h.chi.to_string(),
                h.epsilon.to_string(),
                h.lambda_p.to_string(),
                h.lambda_s.to_string(),
            ];
            for tag in ModelTag::ALL {
                let r = models.get(&tag);
                row.push(opt(r.and_then(|r| r.mean_rmse)));
                row.push(opt(r.and_then(|r| r.std_rmse)));
                row.push(r.map_or_else(String::new, |r| r.failed.to_string()));
            }
            row
        })
        .collect();
    let header = [
        "M",
        "kappa",
        "eta",
        "chi",
        "eps",
        "lambda_p",
        "lambda_s",
        "srbfn_mean",
        "srbfn_std",
        "srbfn_failed",
        "arithmetic_mean",
        "arithmetic_std",
        "arithmetic_failed",
        "linear_mean",
        "linear_std",
        "linear_failed",
    ];
    write_csv(path, &header, table)
}

/// Writes `diversity.csv`, `regularization.csv` and `diversity_pairs.csv`
/// whenever the results support them. Returns the file names written.
pub fn write_plot_data(results: &[RunResult], dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if let Ok(cells) = diversity_curve(results) {
        let rows = cells
            .iter()
            .map(|c| {
                vec![
                    c.label(),
                    c.m.to_string(),
                    c.epsilon.to_string(),
                    fmt6(c.mean),
                    fmt6(c.ci_half_width),
                    c.n.to_string(),
                ]
            })
            .collect();
        write_csv(
            &dir.join("diversity.csv"),
            &["label", "M", "eps", "mean_rmse", "ci90_half_width", "n"],
            rows,
        )?;
        written.push("diversity.csv".into());
    }
    if let Ok(profile) = regularization_profile(results) {
        let rows = profile
            .iter()
            .map(|p| {
                vec![
                    p.lambda_s.to_string(),
                    fmt6(p.mean_of_means),
                    fmt6(p.mean_of_stds),
                    fmt6(p.std_of_means),
                    p.configs.to_string(),
                ]
            })
            .collect();
        write_csv(
            &dir.join("regularization.csv"),
            &["lambda_s", "mean_rmse", "mean_std_rmse", "std_of_mean_rmse", "configs"],
            rows,
        )?;
        written.push("regularization.csv".into());
    }
    let ms: BTreeSet<usize> = results
        .iter()
        .filter(|r| r.config.hyper.m > 1)
        .map(|r| r.config.hyper.m)
        .collect();
    let eps: BTreeSet<u64> = results
        .iter()
        .map(|r| r.config.hyper.epsilon.to_bits())
        .filter(|&b| f64::from_bits(b) != 0.0)
        .collect();
    let mut rows = Vec::new();
    for &m in &ms {
        for &e in &eps {
            if let Ok(c) = diversity_comparison(results, m, 0.0, f64::from_bits(e)) {
                rows.push(vec![
                    m.to_string(),
                    c.eps_base.to_string(),
                    c.eps_alt.to_string(),
                    fmt6(c.mean_base),
                    fmt6(c.mean_alt),
                    fmt6(c.mean_diff),
                    fmt6(c.ci_half_width),
                    c.pairs.to_string(),
                    c.alt_significantly_lower().to_string(),
                ]);
            }
        }
    }
    if !rows.is_empty() {
        write_csv(
            &dir.join("diversity_pairs.csv"),
            &[
                "M",
                "eps_base",
                "eps_alt",
                "mean_base",
                "mean_alt",
                "mean_diff",
                "ci90_half_width",
                "pairs",
                "alt_significantly_lower",
            ],
            rows,
        )?;
        written.push("diversity_pairs.csv".into());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(tag: ModelTag, m: usize, eps: f64, lambda_s: f64, obs: &[f64]) -> RunResult {
        let hyper = HyperParams {
            m,
            epsilon: eps,
            eta: 0.03,
            lambda_p: 0.0001,
            chi: 0.01,
            kappa: 200,
            lambda_s,
        };
        let config = ConfigSnapshot {
            hyper,
            settings: RunSettings::default(),
        };
        RunResult::new(
            tag,
            config,
            obs.iter().map(|&v| Some(v)).collect(),
            vec![None; obs.len()],
            0.0,
        )
    }

    #[test]
    fn rmse_cases() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn percentile_textbook() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile_sorted(&v, 0.25), 1.75);
        assert_eq!(percentile_sorted(&v, 0.75), 3.25);
        assert_eq!(percentile_sorted(&[7.0], 0.25), 7.0);
    }

    #[test]
    fn singleton_summary() {
        let r = fake(ModelTag::Srbfn, 2, 0.0, 0.0, &[1.0, 3.0]);
        let s = quartile_summary(&[r]).unwrap();
        let m = s.get(ModelTag::Srbfn).unwrap();
        assert_eq!((m.top_mean, m.first_quartile, m.third_quartile), (2.0, 2.0, 2.0));
        assert!((m.top_std - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(quartile_summary(&[]), Err(Error::EmptyResults)));
    }

    #[test]
    fn ci_formula() {
        assert_eq!(ci90_half_width(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        // 100 values with sample std exactly 1: alternate around a mean
        let s = (99.0f64 / 100.0).sqrt();
        let v: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 5.0 + s } else { 5.0 - s }).collect();
        assert!((ci90_half_width(&v).unwrap() - 0.1645).abs() < 1e-12);
    }

    #[test]
    fn diversity_needs_two_observations() {
        let r = fake(ModelTag::Srbfn, 2, 0.0, 0.0, &[1.0]);
        assert!(matches!(
            diversity_curve(&[r]),
            Err(Error::InsufficientObservations(_))
        ));
    }

    #[test]
    fn regularization_needs_two_lambdas() {
        let r = fake(ModelTag::Srbfn, 2, 0.0, 0.0, &[1.0, 2.0]);
        assert!(regularization_profile(&[r]).is_err());
    }

    #[test]
    fn regularization_passthrough_and_flat() {
        let a = fake(ModelTag::Srbfn, 2, 0.0, 0.0, &[1.0, 3.0]);
        let b = fake(ModelTag::Srbfn, 2, 0.0, 5.0, &[4.0, 4.0]);
        let p = regularization_profile(&[a.clone(), b]).unwrap();
        assert_eq!(p[0].mean_of_means, 2.0);
        assert_eq!(p[1].mean_of_means, 4.0);
        assert_eq!(p[1].mean_of_stds, 0.0);
        let c = fake(ModelTag::Srbfn, 2, 0.0, 5.0, &[1.0, 3.0]);
        let p = regularization_profile(&[a, c]).unwrap();
        assert_eq!(p[0].mean_of_means, p[1].mean_of_means);
        assert_eq!(p[0].mean_of_stds, p[1].mean_of_stds);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(SweepGrid::default().product().len(), 5 * 3 * 2 * 4 * 4 * 4 * 3);
        assert_eq!(SweepGrid::default().product().len(), 5760);
        let g = SweepGrid {
            m: vec![2, 5],
            kappa: vec![20],
            eta: vec![0.03],
            chi: vec![0.01],
            epsilon: vec![0.0, 0.35],
            lambda_p: vec![0.0],
            lambda_s: vec![3.0],
        };
        assert_eq!(g.product().len(), 4);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(fold_seed(1, 2), fold_seed(1, 2));
        assert_ne!(fold_seed(1, 2), fold_seed(1, 3));
        assert_ne!(ensemble_seed(0, "a", 0, 0), ensemble_seed(0, "b", 0, 0));
    }
}
