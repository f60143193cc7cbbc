mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use tsf_core::baselines::{best_warping_window, nn_error, Metric, WarpingWindow};
use tsf_core::io::{load_ucr, load_ucr_with_labels, save_ucr};
use tsf_core::model::{load_model, save_model};
use tsf_core::synth::{generate_noise_dataset, generate_shifted_dataset, SyntheticSpec};
use tsf_core::{fit, fit_with_threads, importance_curves, Criterion, Dataset, Forest, ForestConfig, TreeConfig};

use report::{append_reports, average_ranks, RunReport};

#[derive(Parser)]
#[command(name = "tsf", version, about = "Time series forest classifier and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a forest on a UCR-format file and save the model
    Train(TrainArgs),
    /// Predict labels for every series in a UCR-format file
    Predict(PredictArgs),
    /// Measure a saved model's error rate on a labelled file
    Evaluate(EvaluateArgs),
    /// Export temporal importance curves as CSV
    Importance(ImportanceArgs),
    /// Run methods over every TRAIN/TEST pair in a directory
    Benchmark(BenchmarkArgs),
    /// Write a synthetic two-class dataset
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Entrance,
    Entropy,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Entrance => Criterion::Entrance,
            CriterionArg::Entropy => Criterion::EntropyOnly,
        }
    }
}

#[derive(Args, Clone)]
struct ForestArgs {
    #[arg(long, default_value_t = 500)]
    n_trees: usize,
    #[arg(long, default_value_t = 20)]
    kappa: usize,
    /// Maximum tree depth (unlimited if omitted)
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 2)]
    min_node_size: usize,
    /// Worker threads; 0 uses all cores. Never changes the model.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl ForestArgs {
    fn config(&self, seed: u64, criterion: Criterion) -> ForestConfig {
        ForestConfig {
            n_trees: self.n_trees,
            tree: TreeConfig {
                kappa: self.kappa,
                max_depth: self.max_depth,
                min_node_size: self.min_node_size,
            },
            master_seed: seed,
            criterion,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "train")]
    train_path: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CriterionArg::Entrance)]
    criterion: CriterionArg,
    #[command(flatten)]
    forest: ForestArgs,
    /// Append the run report (training error) to this CSV file
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long = "model")]
    model_in: PathBuf,
    /// UCR-format file; its label column is ignored
    #[arg(long)]
    input: PathBuf,
    /// Write one predicted label per line here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long = "model")]
    model_in: PathBuf,
    #[arg(long = "test")]
    test_path: PathBuf,
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportanceArgs {
    #[arg(long = "model")]
    model_in: PathBuf,
    #[arg(long)]
    csv_out: PathBuf,
    /// Add columns divided by the number of intervals covering each t
    #[arg(long)]
    normalize: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Tsf,
    TsfEntropy,
    NnEuclidean,
    DtwNowin,
    DtwBest,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Tsf => "tsf",
            Method::TsfEntropy => "tsf-entropy",
            Method::NnEuclidean => "nn-euclidean",
            Method::DtwNowin => "dtw-nowin",
            Method::DtwBest => "dtw-best",
        }
    }
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Directory of <Name>_TRAIN / <Name>_TEST files, flat or one folder per dataset
    #[arg(long)]
    data_dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Tsf])]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
    seeds: Vec<u64>,
    #[arg(long)]
    report_out: PathBuf,
    /// Only run these datasets
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    #[command(flatten)]
    forest: ForestArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    Noise,
    Shifted,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long = "length", default_value_t = 1000)]
    series_length: usize,
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Class-2 mean shift on [201, 250] (shifted only)
    #[arg(long, default_value_t = 2.0)]
    mean_shift: f64,
    /// Class-2 standard deviation factor on [501, 550] (shifted only)
    #[arg(long, default_value_t = 3.0)]
    std_factor: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Importance(a) => cmd_importance(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<Dataset> {
    load_ucr(path).with_context(|| format!("cannot load {}", path.display()))
}

fn dataset_name(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    for suffix in ["_TRAIN", "_TEST"] {
        if let Some(name) = stem.strip_suffix(suffix) {
            return name.to_string();
        }
    }
    stem
}

fn method_name(criterion: Criterion) -> &'static str {
    match criterion {
        Criterion::Entrance => "tsf",
        Criterion::EntropyOnly => "tsf-entropy",
    }
}

fn config_echo(config: &ForestConfig) -> String {
    let depth = config.tree.max_depth.map_or("none".to_string(), |d| d.to_string());
    format!(
        "n_trees={} kappa={} criterion={} max_depth={} min_node_size={}",
        config.n_trees,
        config.tree.kappa,
        config.criterion.name(),
        depth,
        config.tree.min_node_size
    )
}

fn seconds(start: Instant) -> f64 {
    start.elapsed().as_secs_f64().max(1e-9)
}

fn train(data: &Dataset, config: &ForestConfig, threads: usize) -> Result<Forest> {
    let forest = if threads == 0 {
        fit(data, config)?
    } else {
        fit_with_threads(data, config, threads)?
    };
    Ok(forest)
}

fn emit(report: &RunReport, out: Option<&Path>) -> Result<()> {
    println!("{}", report.csv_line());
    if let Some(path) = out {
        append_reports(path, std::slice::from_ref(report))?;
    }
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let data = load(&a.train_path)?;
    let config = a.forest.config(a.seed, a.criterion.into());
    let start = Instant::now();
    let forest = train(&data, &config, a.forest.threads)?;
    let wall = seconds(start);
    save_model(&forest, &a.model_out).with_context(|| format!("cannot write model {}", a.model_out.display()))?;
    let error = forest.evaluate(&data)?;
    info!("trained {} trees in {wall:.3}s", config.n_trees);
    let report = RunReport {
        dataset: dataset_name(&a.train_path),
        method: method_name(config.criterion).into(),
        error,
        wall_time_s: wall,
        seed: Some(config.master_seed),
        config: config_echo(&config),
    };
    emit(&report, a.report_out.as_deref())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let forest = load_model(&a.model_in).with_context(|| format!("cannot load model {}", a.model_in.display()))?;
    let data = load(&a.input)?;
    let mut out = String::new();
    for series in data.instances() {
        let vote = forest.predict(series)?;
        out.push_str(&forest.label_map().original_of(vote.predicted).to_string());
        out.push('\n');
    }
    match a.out {
        Some(path) => fs::write(&path, out).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let forest = load_model(&a.model_in).with_context(|| format!("cannot load model {}", a.model_in.display()))?;
    let test = load_ucr_with_labels(&a.test_path, forest.label_map())
        .with_context(|| format!("cannot load {}", a.test_path.display()))?;
    let start = Instant::now();
    let error = forest
        .evaluate(&test)
        .with_context(|| format!("series length in {} does not match the model", a.test_path.display()))?;
    let config = forest.config();
    let report = RunReport {
        dataset: dataset_name(&a.test_path),
        method: method_name(config.criterion).into(),
        error,
        wall_time_s: seconds(start),
        seed: Some(config.master_seed),
        config: config_echo(config),
    };
    emit(&report, a.report_out.as_deref())
}

fn cmd_importance(a: ImportanceArgs) -> Result<()> {
    let forest = load_model(&a.model_in).with_context(|| format!("cannot load model {}", a.model_in.display()))?;
    let curves = importance_curves(&forest);
    let csv = if a.normalize {
        curves.to_csv_with_normalized()
    } else {
        curves.to_csv()
    };
    fs::write(&a.csv_out, csv).with_context(|| format!("cannot write {}", a.csv_out.display()))
}

/// TRAIN/TEST file pairs under `dir`, sorted by dataset name.
fn find_datasets(dir: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let entries = fs::read_dir(dir).with_context(|| format!("cannot read data directory {}", dir.display()))?;
    let mut candidates = Vec::new();
    for entry in entries.flatten() {
        let path = entry.path();
        if path.is_dir() {
            if let Ok(inner) = fs::read_dir(&path) {
                candidates.extend(inner.flatten().map(|e| e.path()));
            }
        } else {
            candidates.push(path);
        }
    }
    let mut found = Vec::new();
    for train in candidates {
        let Some(stem) = train.file_stem().and_then(|s| s.to_str()) else { continue };
        let Some(name) = stem.strip_suffix("_TRAIN") else { continue };
        let mut test_name = format!("{name}_TEST");
        if let Some(ext) = train.extension().and_then(|e| e.to_str()) {
            test_name = format!("{test_name}.{ext}");
        }
        let test = train.with_file_name(test_name);
        if test.is_file() {
            found.push((name.to_string(), train, test));
        } else {
            warn!("{} has no matching TEST file", train.display());
        }
    }
    found.sort();
    found.dedup_by(|a, b| a.0 == b.0);
    Ok(found)
}

fn run_method(
    method: Method,
    name: &str,
    train_set: &Dataset,
    test_set: &Dataset,
    args: &BenchmarkArgs,
) -> Result<Vec<RunReport>> {
    let nn = |metric: Metric, config: String, start: Instant| -> Result<Vec<RunReport>> {
        let error = nn_error(train_set, test_set, metric)?;
        Ok(vec![RunReport {
            dataset: name.into(),
            method: method.name().into(),
            error,
            wall_time_s: seconds(start),
            seed: None,
            config,
        }])
    };
    match method {
        Method::Tsf | Method::TsfEntropy => {
            let criterion = if method == Method::Tsf {
                Criterion::Entrance
            } else {
                Criterion::EntropyOnly
            };
            let mut reports = Vec::new();
            for &seed in &args.seeds {
                let config = args.forest.config(seed, criterion);
                let start = Instant::now();
                let forest = train(train_set, &config, args.forest.threads)?;
                let error = forest.evaluate(test_set)?;
                reports.push(RunReport {
                    dataset: name.into(),
                    method: method.name().into(),
                    error,
                    wall_time_s: seconds(start),
                    seed: Some(seed),
                    config: config_echo(&config),
                });
            }
            Ok(reports)
        }
        Method::NnEuclidean => nn(Metric::Euclidean, String::new(), Instant::now()),
        Method::DtwNowin => nn(Metric::Dtw(WarpingWindow::FULL), "window=100".into(), Instant::now()),
        Method::DtwBest => {
            let start = Instant::now();
            let search = best_warping_window(train_set)?;
            let window = search.window;
            nn(Metric::Dtw(window), format!("window={}", window.percent()), start)
        }
    }
}

fn cmd_benchmark(a: BenchmarkArgs) -> Result<()> {
    let mut datasets = find_datasets(&a.data_dir)?;
    if !a.datasets.is_empty() {
        datasets.retain(|(name, _, _)| a.datasets.contains(name));
    }
    let mut all = Vec::new();
    let mut ran = 0;
    for (name, train_path, test_path) in &datasets {
        let loaded = load_ucr(train_path).and_then(|train| {
            let test = load_ucr_with_labels(test_path, train.label_map())?;
            Ok((train, test))
        });
        let (train_set, test_set) = match loaded {
            Ok(pair) => pair,
            Err(e) => {
                warn!("skipping {name}: {e}");
                continue;
            }
        };
        if train_set.series_length() != test_set.series_length() {
            warn!("skipping {name}: TRAIN and TEST lengths differ");
            continue;
        }
        let mut reports = Vec::new();
        for &method in &a.methods {
            match run_method(method, name, &train_set, &test_set, &a) {
                Ok(r) => reports.extend(r),
                Err(e) => warn!("{name} / {}: {e}", method.name()),
            }
        }
        for r in &reports {
            println!("{}", r.csv_line());
        }
        append_reports(&a.report_out, &reports)?;
        all.extend(reports);
        ran += 1;
    }
    if ran == 0 {
        bail!("no datasets ran from {}", a.data_dir.display());
    }
    println!("method,average_rank");
    for (method, rank) in average_ranks(&all) {
        println!("{method},{rank:.3}");
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let (data, manifest) = match a.kind {
        SynthKind::Noise => {
            let spec = SyntheticSpec {
                series_length: a.series_length,
                per_class: a.per_class,
                ..SyntheticSpec::noise(a.seed)
            };
            (generate_noise_dataset(&spec)?, spec.manifest("noise"))
        }
        SynthKind::Shifted => {
            let mut spec = SyntheticSpec {
                series_length: a.series_length,
                per_class: a.per_class,
                ..SyntheticSpec::shifted(a.seed)
            };
            spec.overrides[0].mean_shift = a.mean_shift;
            spec.overrides[1].std_factor = a.std_factor;
            (generate_shifted_dataset(&spec)?, spec.manifest("shifted"))
        }
    };
    save_ucr(&data, Some(&manifest), &a.out).with_context(|| format!("cannot write {}", a.out.display()))
}
