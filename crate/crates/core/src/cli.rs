//! The `srbfn` command line: `validate`, `train`, `sweep`, `report` and
//! `plot-data`.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage or input error.
//!
//! Any flag can also come from a TOML file passed with `--config`; keys are
//! flag names without the leading dashes and lists are TOML arrays:
//!
//! ```toml
//! dataset = "air"
//! M = 10
//! eps = 0.35
//! lambda-s = 3
//! ```
//!
//! Flags given on the command line win over the file.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::{self, LoadReport, RegressionDataset};
use crate::error::Error;
use crate::evaluation::{
    self, cross_validate, derive_seed, quartile_summary, read_results, HyperParams, RunResult,
    RunSettings, SweepGrid,
};
use crate::matrix::Matrix;
use crate::model::SRbfnModel;
use crate::persist;
use crate::structured::{build_structured, feature_map, Source};

/// Default directory for `--path`-less `air`/`energy` datasets.
pub const DATA_DIR_ENV: &str = "SRBFN_DATA_DIR";
/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SRBFN_OUT_DIR";

pub const AIR_QUALITY_FILE: &str = "AirQualityUCI.csv";
pub const ENERGY_FILE: &str = "energydata_complete.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetKind {
    Air,
    Energy,
    Csv { target: String },
}

impl FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "air" => Ok(Self::Air),
            "energy" => Ok(Self::Energy),
            _ => match s.strip_prefix("csv:") {
                Some(t) if !t.is_empty() => Ok(Self::Csv { target: t.to_string() }),
                _ => Err(format!("expected air, energy or csv:<target>, got {s:?}")),
            },
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Air => f.write_str("air"),
            Self::Energy => f.write_str("energy"),
            Self::Csv { target } => write!(f, "csv:{target}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "srbfn", version, about = "Structured RBF networks over multiple-hypothesis predictors")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file of flag values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a dataset and print row, column and missing-value counts.
    Validate(DataArgs),
    /// Cross-validate one configuration, then fit and save a final model.
    Train(TrainArgs),
    /// Cross-validate a list or grid of configurations into a results file.
    Sweep(SweepArgs),
    /// Summary tables and plot data from a results file.
    Report(ReportArgs),
    /// Plot-data CSVs only.
    PlotData(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// air, energy, or csv:<target column>
    #[arg(long, default_value = "air")]
    pub dataset: DatasetKind,
    /// Dataset file; defaults to the canonical file name under $SRBFN_DATA_DIR or ./data.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Field delimiter for csv:<target> datasets.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of hypotheses.
    #[arg(long = "M", visible_alias = "m", default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 200)]
    pub kappa: usize,
    #[arg(long, default_value_t = 0.03)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub chi: f64,
    #[arg(long, default_value_t = 0.35)]
    pub eps: f64,
    #[arg(long = "lambda-p", default_value_t = 0.0001)]
    pub lambda_p: f64,
    #[arg(long = "lambda-s", default_value_t = 3.0)]
    pub lambda_s: f64,
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of repeated k-fold simulations.
    #[arg(long, default_value_t = 1)]
    pub sims: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Also write the final model's structured matrix and basis features as CSV.
    #[arg(long)]
    pub dump_structured: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    /// Folds per simulation.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use a seeded random subset of N rows.
    #[arg(long, value_name = "N")]
    pub subsample: Option<usize>,
    /// Output directory; defaults to $SRBFN_OUT_DIR or ./srbfn-out.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plan {
    /// The bundled 80-configuration list.
    Curated,
    /// Cartesian product of the grid flags.
    Product,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Defaults to `product` when any grid flag is given, else `curated`.
    #[arg(long, value_enum)]
    pub plan: Option<Plan>,
    /// Grid axes take comma-separated values, e.g. `--M 5,10`. An axis left
    /// out uses its full default list: M 2,5,10,20,35; kappa 20,200,2000;
    /// eta 0.03,0.3; chi 0.0001,0.01,0.1,1; eps 0,0.1,0.35,0.5;
    /// lambda-p 0,0.0001,0.01,0.07; lambda-s 0,3,5.
    #[arg(long = "M", visible_alias = "m", value_delimiter = ',', action = ArgAction::Set)]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub kappa: Vec<usize>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub eta: Vec<f64>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub chi: Vec<f64>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub eps: Vec<f64>,
    #[arg(long = "lambda-p", value_delimiter = ',', action = ArgAction::Set)]
    pub lambda_p: Vec<f64>,
    #[arg(long = "lambda-s", value_delimiter = ',', action = ArgAction::Set)]
    pub lambda_s: Vec<f64>,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 10)]
    pub sims: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Results file; defaults to <out>/results.jsonl. Existing entries are kept.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Results file written by `sweep`.
    #[arg(long)]
    pub results: PathBuf,
    /// Output directory; defaults to $SRBFN_OUT_DIR or ./srbfn-out.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                Error::NotPositiveDefinite { .. }
                | Error::NumericalDivergence { .. }
                | Error::InsufficientObservations(_) => 1,
                Error::Io(_) => 1,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// its exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Validate(a) => cmd_validate(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Report(a) => cmd_report(&a, false),
        Command::PlotData(a) => cmd_report(&a, true),
    }
}

fn config_path(args: &[OsString]) -> CliResult<Option<(usize, usize, PathBuf)>> {
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = args
                .get(i + 1)
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            return Ok(Some((i, 2, PathBuf::from(p))));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some((i, 1, PathBuf::from(p))));
        }
    }
    Ok(None)
}

/// Splices the `--config` file's values in as flags directly after the
/// subcommand, so that explicit flags (which come later) override them.
pub fn expand_config(mut args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some((pos, width, path)) = config_path(&args)? else {
        return Ok(args);
    };
    args.drain(pos..pos + width);
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;

    let root = Cli::command();
    let names: Vec<String> = root.get_subcommands().map(|c| c.get_name().to_string()).collect();
    let Some(sub_pos) = args
        .iter()
        .position(|a| names.iter().any(|n| a.to_string_lossy() == *n))
    else {
        return Ok(args);
    };
    let sub_name = args[sub_pos].to_string_lossy().to_string();
    let sub = root.find_subcommand(&sub_name).unwrap();
    let longs = |c: &clap::Command| -> Vec<String> {
        c.get_arguments()
            .flat_map(|a| {
                a.get_long()
                    .into_iter()
                    .chain(a.get_all_aliases().unwrap_or_default())
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let own = longs(sub);
    let any: Vec<String> = root.get_subcommands().flat_map(longs).collect();

    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &table {
        if !own.contains(key) {
            if any.contains(key) {
                continue;
            }
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
        let flag = format!("--{key}");
        match value {
            toml::Value::Boolean(true) => extra.push(flag.into()),
            toml::Value::Boolean(false) => {}
            v => {
                extra.push(flag.into());
                extra.push(toml_scalar(v, key)?.into());
            }
        }
    }
    args.splice(sub_pos + 1..sub_pos + 1, extra);
    Ok(args)
}

fn toml_scalar(v: &toml::Value, key: &str) -> CliResult<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|i| toml_scalar(i, key))
            .collect::<CliResult<Vec<_>>>()?
            .join(","),
        _ => return Err(CliError::Usage(format!("unsupported value for config key {key:?}"))),
    })
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("srbfn-out"))
}

/// Resolves the dataset file for `args`.
pub fn dataset_path(args: &DataArgs) -> CliResult<PathBuf> {
    if let Some(p) = &args.path {
        return Ok(p.clone());
    }
    let dir = std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"));
    match &args.dataset {
        DatasetKind::Air => Ok(dir.join(AIR_QUALITY_FILE)),
        DatasetKind::Energy => Ok(dir.join(ENERGY_FILE)),
        DatasetKind::Csv { .. } => Err(CliError::Usage("csv datasets need --path".into())),
    }
}

pub fn load_dataset(args: &DataArgs) -> CliResult<(PathBuf, RegressionDataset, LoadReport)> {
    let path = dataset_path(args)?;
    let (ds, report) = match &args.dataset {
        DatasetKind::Air => dataset::load_air_quality_with_report(&path)?,
        DatasetKind::Energy => dataset::load_energy_with_report(&path)?,
        DatasetKind::Csv { target } => {
            if !args.delimiter.is_ascii() {
                return Err(CliError::Usage("delimiter must be a single ASCII character".into()));
            }
            dataset::load_csv(&path, target, args.delimiter as u8)?
        }
    };
    Ok((path, ds, report))
}

fn cmd_validate(args: &DataArgs) -> CliResult<()> {
    let (path, ds, report) = load_dataset(args)?;
    println!("file: {}", path.display());
    println!("kind: {}", args.dataset);
    println!("raw rows: {}", report.raw_rows);
    println!("raw columns: {}", report.raw_columns);
    println!("rows dropped (missing target): {}", report.dropped_missing_target);
    println!("rows: {}", ds.len());
    println!("features: {}", ds.dim());
    println!("target: {}", ds.target_name);
    println!("missing feature values: {}", report.total_missing());
    for (name, n) in report.missing_by_feature.iter().filter(|(_, n)| **n > 0) {
        println!("  {name}: {n}");
    }
    if !report.dropped_columns.is_empty() {
        println!("dropped columns (no values): {}", report.dropped_columns.join(", "));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FoldMetrics {
    sim: usize,
    fold: usize,
    srbfn_train: Option<f64>,
    srbfn_test: Option<f64>,
    arithmetic_train: Option<f64>,
    arithmetic_test: Option<f64>,
    linear_train: Option<f64>,
    linear_test: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ModelMetrics {
    mean_test_rmse: Option<f64>,
    std_test_rmse: Option<f64>,
    failed_cells: usize,
}

impl From<&RunResult> for ModelMetrics {
    fn from(r: &RunResult) -> Self {
        Self {
            mean_test_rmse: r.mean_rmse,
            std_test_rmse: r.std_rmse,
            failed_cells: r.failed,
        }
    }
}

#[derive(Debug, Serialize)]
struct TrainMetrics {
    rows: usize,
    features: usize,
    target: String,
    hyper: HyperParams,
    settings: RunSettings,
    srbfn: ModelMetrics,
    arithmetic: ModelMetrics,
    linear: ModelMetrics,
    folds: Vec<FoldMetrics>,
    final_train_rmse: f64,
}

fn matrix_csv(path: &Path, m: &Matrix, prefix: &str) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    let header: Vec<String> = (0..m.cols()).map(|j| format!("{prefix}{j}")).collect();
    w.write_record(&header).map_err(|e| Error::Io(e.into()))?;
    for r in m.row_iter() {
        w.write_record(r.iter().map(|v| v.to_string()))
            .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_train(a: &TrainArgs) -> CliResult<()> {
    let hyper = HyperParams {
        m: a.m,
        epsilon: a.eps,
        eta: a.eta,
        lambda_p: a.lambda_p,
        chi: a.chi,
        kappa: a.kappa,
        lambda_s: a.lambda_s,
    };
    hyper.mhp_config(a.run.epochs, 0).validate()?;
    if a.lambda_s.is_nan() || a.lambda_s < 0.0 {
        return Err(Error::InvalidConfig(format!("lambda_s must be >= 0, got {}", a.lambda_s)).into());
    }
    let (_, data, _) = load_dataset(&a.data)?;
    let out = out_dir(&a.run.out);
    fs::create_dir_all(&out)?;
    let settings = RunSettings {
        dataset: a.data.dataset.to_string(),
        epochs: a.run.epochs,
        k: a.run.k,
        n_sims: a.sims,
        subsample: a.run.subsample,
        master_seed: a.run.seed,
    };
    let data = evaluation::prepare_data(&data, &settings);

    let final_seed = derive_seed(&["final", &a.run.seed.to_string(), &hyper.ensemble_key()]);
    let model = SRbfnModel::train(&data, &hyper.mhp_config(a.run.epochs, final_seed), a.lambda_s)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cv = pool.install(|| cross_validate(&data, &hyper, &settings))?;

    let k = settings.k;
    let folds = (0..cv.srbfn.test_rmse.len())
        .map(|i| FoldMetrics {
            sim: i / k,
            fold: i % k,
            srbfn_train: cv.srbfn.train_rmse[i],
            srbfn_test: cv.srbfn.test_rmse[i],
            arithmetic_train: cv.arithmetic.train_rmse[i],
            arithmetic_test: cv.arithmetic.test_rmse[i],
            linear_train: cv.linear.train_rmse[i],
            linear_test: cv.linear.test_rmse[i],
        })
        .collect();
    let final_train_rmse = evaluation::rmse(&model.predict(&data.features)?, &data.targets)?;
    let metrics = TrainMetrics {
        rows: data.len(),
        features: data.dim(),
        target: data.target_name.clone(),
        hyper,
        settings,
        srbfn: (&cv.srbfn).into(),
        arithmetic: (&cv.arithmetic).into(),
        linear: (&cv.linear).into(),
        folds,
        final_train_rmse,
    };

    persist::save(out.join("ensemble.json"), &model.ensemble)?;
    persist::save(out.join("model.json"), &model)?;
    let mut text = serde_json::to_string_pretty(&metrics).map_err(Error::from)?;
    text.push('\n');
    fs::write(out.join("metrics.json"), text)?;
    if a.dump_structured {
        let x = model.ensemble.standardize(&data.features)?;
        let sd = build_structured(&model.ensemble, &x, Source::Train)?;
        matrix_csv(&out.join("structured_train.csv"), &sd.d, "f")?;
        matrix_csv(&out.join("phi_train.csv"), &feature_map(&sd, &model.basis)?, "phi")?;
    }

    for (tag, r) in [("s-RBFN", &cv.srbfn), ("arithmetic", &cv.arithmetic), ("linear", &cv.linear)] {
        match (r.mean_rmse, r.std_rmse) {
            (Some(m), Some(s)) => println!("{tag:>10}: test RMSE {m:.4} ± {s:.4} ({} failed cells)", r.failed),
            _ => println!("{tag:>10}: every cell failed"),
        }
    }
    println!("wrote model.json, ensemble.json, metrics.json to {}", out.display());
    if cv.srbfn.mean_rmse.is_none() {
        return Err(Error::InsufficientObservations("every s-RBFN cross-validation cell failed".into()).into());
    }
    Ok(())
}

/// Resolves the configuration list requested by sweep flags.
pub fn sweep_configs(a: &SweepArgs) -> CliResult<Vec<HyperParams>> {
    let any_grid = !(a.m.is_empty()
        && a.kappa.is_empty()
        && a.eta.is_empty()
        && a.chi.is_empty()
        && a.eps.is_empty()
        && a.lambda_p.is_empty()
        && a.lambda_s.is_empty());
    let plan = a.plan.unwrap_or(if any_grid { Plan::Product } else { Plan::Curated });
    match plan {
        Plan::Curated if any_grid => Err(CliError::Usage(
            "grid flags cannot be combined with --plan curated".into(),
        )),
        Plan::Curated => Ok(evaluation::curated_configs()),
        Plan::Product => {
            let d = SweepGrid::default();
            let pick = |v: &Vec<f64>, def: Vec<f64>| if v.is_empty() { def } else { v.clone() };
            let grid = SweepGrid {
                m: if a.m.is_empty() { d.m } else { a.m.clone() },
                kappa: if a.kappa.is_empty() { d.kappa } else { a.kappa.clone() },
                eta: pick(&a.eta, d.eta),
                chi: pick(&a.chi, d.chi),
                epsilon: pick(&a.eps, d.epsilon),
                lambda_p: pick(&a.lambda_p, d.lambda_p),
                lambda_s: pick(&a.lambda_s, d.lambda_s),
            };
            grid.validate()?;
            Ok(grid.product())
        }
    }
}

fn print_summary(results: &[RunResult]) -> CliResult<()> {
    let s = quartile_summary(results)?;
    println!(
        "{:<20} {:>12} {:>10} {:>12} {:>12} {:>8}",
        "model", "top", "std", "Q1", "Q3", "failed"
    );
    for m in &s.models {
        println!(
            "{:<20} {:>12.4} {:>10.4} {:>12.4} {:>12.4} {:>8}",
            m.model.label(),
            m.top_mean,
            m.top_std,
            m.first_quartile,
            m.third_quartile,
            m.failed_runs
        );
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<()> {
    let configs = sweep_configs(a)?;
    for h in &configs {
        h.mhp_config(a.run.epochs, 0).validate()?;
        if h.lambda_s.is_nan() || h.lambda_s < 0.0 {
            return Err(Error::InvalidConfig(format!("lambda_s must be >= 0, got {}", h.lambda_s)).into());
        }
    }
    let (_, data, _) = load_dataset(&a.data)?;
    let out = out_dir(&a.run.out);
    fs::create_dir_all(&out)?;
    let results_path = a.results.clone().unwrap_or_else(|| out.join("results.jsonl"));
    let settings = RunSettings {
        dataset: a.data.dataset.to_string(),
        epochs: a.run.epochs,
        k: a.run.k,
        n_sims: a.sims,
        subsample: a.run.subsample,
        master_seed: a.run.seed,
    };
    let workers = a.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    let outcome = evaluation::grid_sweep(&data, &configs, &settings, Some(&results_path), workers)?;
    println!(
        "{} configurations ({} computed now) -> {}",
        configs.len(),
        outcome.computed,
        results_path.display()
    );
    if !outcome.results.is_empty() {
        print_summary(&outcome.results)?;
    }
    if !outcome.failed_configs.is_empty() {
        for (key, err) in &outcome.failed_configs {
            eprintln!("failed: {key}: {err}");
        }
        return Err(Error::InsufficientObservations(format!(
            "{} configuration groups failed",
            outcome.failed_configs.len()
        ))
        .into());
    }
    Ok(())
}

fn cmd_report(a: &ReportArgs, plot_only: bool) -> CliResult<()> {
    let results = read_results(&a.results)?;
    if results.is_empty() {
        return Err(Error::EmptyResults.into());
    }
    let out = out_dir(&a.out);
    let written = if plot_only {
        evaluation::write_plot_data(&results, &out)?
    } else {
        print_summary(&results)?;
        evaluation::write_report(&results, &out)?
    };
    println!("wrote {} to {}", written.join(", "), out.display());
    Ok(())
}
