use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use paratm::bench::{bench_sweep, write_bench_csv, BenchPlan};
use paratm::data::{
    apply_binarizer, fit_binarizer, load_csv, load_dense_binary, save_dense_binary,
    synth_staircase, synth_xor, BinarizerSpec, BinaryDataset, LabelKind, PatternTask,
};
use paratm::fit::{fit_classifier, fit_regressor, FitOptions, Mode, TallyRefresh};
use paratm::metrics::{classification_metrics, mean_absolute_error, Metrics};
use paratm::model_io::{Model, ModelFile};
use paratm::{EpochReport, MultiClassTM, RegressionHead, TMConfig};

/// Exit status for unreadable or missing input files.
const EXIT_MISSING_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "paratm",
    version,
    about = "Tsetlin machine training with clause-parallel asynchronous learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write it together with per-epoch reports.
    Train(TrainArgs),
    /// Score a saved model on a dataset.
    Eval(EvalArgs),
    /// Time training over a sweep of clause counts and emit CSV.
    Bench(BenchArgs),
    /// Write a synthetic dataset in the dense binary format.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    Classify,
    Regress,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Seq,
    Par,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RefreshArg {
    Never,
    EveryEpoch,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    Xor,
    Staircase,
    Pattern,
}

#[derive(Args, Clone)]
struct HyperArgs {
    #[arg(long, default_value_t = 15)]
    margin: u32,
    #[arg(long, default_value_t = 3.9)]
    specificity: f64,
    /// States per action side.
    #[arg(long, default_value_t = 128)]
    states: u16,
    /// Reward included true literals with probability 1.
    #[arg(long)]
    boost: bool,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Worker threads; TM_THREADS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Task::Classify)]
    task: Task,
    /// Tally recount policy for the parallel trainer.
    #[arg(long, value_enum, default_value_t = RefreshArg::Never)]
    refresh: RefreshArg,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Dense binary file, or CSV with a header when the name ends in `.csv`.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Held-out file in the same format as --data.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Use a generated dataset instead of --data.
    #[arg(long, value_enum, conflicts_with = "data")]
    synth: Option<SynthKind>,
    #[arg(long, default_value_t = 1000)]
    synth_rows: usize,
    /// Fraction of --data held out for testing when --test is absent.
    #[arg(long)]
    holdout: Option<f64>,
    /// CSV label column; defaults to the last column.
    #[arg(long)]
    label: Option<String>,
    /// CSV columns to ignore.
    #[arg(long, value_delimiter = ',')]
    drop: Vec<String>,
    /// Thresholds per continuous CSV column.
    #[arg(long, default_value_t = 8)]
    binarize_bits: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// Clauses per class.
    #[arg(long, default_value_t = 100)]
    clauses: usize,
    #[command(flatten)]
    hyper: HyperArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Seq)]
    mode: ModeArg,
    /// Output directory for model.json and epochs.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    hyper: HyperArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated clause counts per class.
    #[arg(long = "clauses", value_delimiter = ',', required = true)]
    clause_counts: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Margin as a fraction of the clause count; overrides --margin.
    #[arg(long)]
    margin_ratio: Option<f64>,
    /// Emit every timed epoch instead of one summary row per run.
    #[arg(long)]
    per_epoch: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature count for staircase and pattern data.
    #[arg(long, default_value_t = 20)]
    features: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long)]
    out: PathBuf,
}

/// An input file that does not exist or cannot be opened.
#[derive(Debug)]
struct MissingInput(PathBuf);

impl std::fmt::Display for MissingInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot read {}", self.0.display())
    }
}

impl std::error::Error for MissingInput {}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(MissingInput(path.to_path_buf()).into())
    }
}

fn workers(flag: Option<usize>) -> usize {
    match std::env::var("TM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
    {
        Some(n) => n,
        None => flag.unwrap_or_else(paratm::config::default_workers),
    }
}

impl HyperArgs {
    fn config(&self, clauses: usize) -> Result<TMConfig> {
        let config = TMConfig {
            clauses,
            margin: self.margin,
            specificity: self.specificity,
            states: self.states,
            boost_true_positive: self.boost,
            epochs: self.epochs,
            workers: workers(self.workers),
            seed: self.seed,
        };
        match self.task {
            Task::Classify => config.validate()?,
            Task::Regress => config.validate_regression()?,
        }
        Ok(config)
    }

    fn refresh(&self) -> TallyRefresh {
        match self.refresh {
            RefreshArg::Never => TallyRefresh::Never,
            RefreshArg::EveryEpoch => TallyRefresh::EveryEpoch,
        }
    }

    fn label_kind(&self) -> LabelKind {
        match self.task {
            Task::Classify => LabelKind::Class,
            Task::Regress => LabelKind::Real,
        }
    }
}

struct Inputs {
    train: BinaryDataset,
    test: Option<BinaryDataset>,
    binarizer: Option<BinarizerSpec>,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

impl DataArgs {
    fn check_paths(&self) -> Result<()> {
        if self.data.is_none() && self.synth.is_none() {
            bail!("one of --data or --synth is required");
        }
        for p in self.data.iter().chain(&self.test) {
            require_file(p)?;
        }
        if let Some(h) = self.holdout {
            if !(h > 0.0 && h < 1.0) {
                bail!("--holdout must lie strictly between 0 and 1, got {h}");
            }
        }
        if self.binarize_bits == 0 {
            bail!("--binarize-bits must be at least 1");
        }
        Ok(())
    }

    fn synthesize(
        &self,
        kind: SynthKind,
        seed: u64,
        task: Task,
    ) -> Result<(BinaryDataset, BinaryDataset)> {
        let q = self.synth_rows;
        Ok(match (kind, task) {
            (SynthKind::Xor, Task::Classify) => {
                (synth_xor(q, 0.0, seed)?, synth_xor(q, 0.0, seed ^ 0xa5a5)?)
            }
            (SynthKind::Staircase, Task::Regress) => (
                synth_staircase(q, 6, seed)?,
                synth_staircase(q, 6, seed ^ 0xa5a5)?,
            ),
            (SynthKind::Pattern, Task::Classify) => {
                let t = PatternTask::new(20, 4, 2, 3, seed)?;
                (t.sample(q, 0.0, seed)?, t.sample(q, 0.0, seed ^ 0xa5a5)?)
            }
            (SynthKind::Staircase, Task::Classify) => bail!("staircase data needs --task regress"),
            _ => bail!("this synthetic dataset needs --task classify"),
        })
    }

    /// Loads training and test data. A binarizer, when given, is applied to
    /// CSV input; otherwise one is fitted on the training rows.
    fn load(
        &self,
        kind: LabelKind,
        task: Task,
        seed: u64,
        binarizer: Option<&BinarizerSpec>,
    ) -> Result<Inputs> {
        if let Some(s) = self.synth {
            let (train, test) = self.synthesize(s, seed, task)?;
            return Ok(Inputs {
                train,
                test: Some(test),
                binarizer: None,
            });
        }
        let path = self.data.as_ref().expect("checked");
        if is_csv(path) {
            let drop: Vec<&str> = self.drop.iter().map(String::as_str).collect();
            let raw = load_csv(path, self.label.as_deref(), &drop)?;
            let (train_raw, test_raw) = match (&self.test, self.holdout) {
                (Some(t), _) => (raw, Some(load_csv(t, self.label.as_deref(), &drop)?)),
                (None, Some(h)) => {
                    let (a, b) = raw.split(1.0 - h, seed);
                    (a, Some(b))
                }
                (None, None) => (raw, None),
            };
            let spec = match binarizer {
                Some(b) => b.clone(),
                None => fit_binarizer(&train_raw, self.binarize_bits)?,
            };
            let train = apply_binarizer(&spec, &train_raw, kind)?;
            let test = test_raw
                .map(|t| apply_binarizer(&spec, &t, kind))
                .transpose()?;
            return Ok(Inputs {
                train,
                test,
                binarizer: Some(spec),
            });
        }
        let data = load_dense_binary(path, kind)?;
        let (train, test) = match (&self.test, self.holdout) {
            (Some(t), _) => (data, Some(load_dense_binary(t, kind)?)),
            (None, Some(h)) => {
                let (a, b) = data.split(1.0 - h, seed);
                (a, Some(b))
            }
            (None, None) => (data, None),
        };
        Ok(Inputs {
            train,
            test,
            binarizer: None,
        })
    }
}

fn target_range(data: &BinaryDataset) -> Result<(f64, f64)> {
    let y = data
        .targets()
        .ok_or_else(|| anyhow!("regression needs real-valued targets"))?;
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

fn print_epoch(r: &EpochReport, metric: &str) {
    let fmt = |m: Option<f64>| m.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    println!(
        "epoch {:>4}  {:.4}s  train {metric} {}  test {metric} {}",
        r.epoch + 1,
        r.seconds,
        fmt(r.train_metric),
        fmt(r.test_metric)
    );
}

fn train(args: TrainArgs) -> Result<()> {
    let config = args.hyper.config(args.clauses)?;
    args.data.check_paths()?;
    let mode = match args.mode {
        ModeArg::Seq => Mode::Sequential,
        ModeArg::Par => Mode::Parallel {
            workers: config.workers,
        },
        ModeArg::Both => bail!("train runs one mode; pick seq or par"),
    };
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    }
    let inputs = args
        .data
        .load(args.hyper.label_kind(), args.hyper.task, config.seed, None)?;
    let opts = FitOptions {
        refresh: args.hyper.refresh(),
        ..FitOptions::new(mode, config.epochs)
    };
    let test = inputs.test.as_ref();
    let (model, reports) = match args.hyper.task {
        Task::Classify => {
            let classes = inputs
                .train
                .n_classes()
                .max(test.map_or(0, BinaryDataset::n_classes))
                .max(2);
            let mut tm = MultiClassTM::new(config, inputs.train.n_features(), classes)?;
            let reports = fit_classifier(&mut tm, &inputs.train, test, &opts, |r| {
                print_epoch(r, "accuracy")
            })?;
            (Model::Classifier(tm), reports)
        }
        Task::Regress => {
            let (lo, hi) = target_range(&inputs.train)?;
            let mut head = RegressionHead::new(config, inputs.train.n_features(), lo, hi)?;
            let reports = fit_regressor(&mut head, &inputs.train, test, &opts, |r| {
                print_epoch(r, "mae")
            })?;
            (Model::Regressor(head), reports)
        }
    };
    if let Some(last) = reports.last() {
        let name = if args.hyper.task == Task::Classify {
            "accuracy"
        } else {
            "mae"
        };
        println!(
            "final train {name} {:.4}",
            last.train_metric.unwrap_or(f64::NAN)
        );
        if let Some(t) = last.test_metric {
            println!("final test {name} {t:.4}");
        }
    }
    if let Some(out) = &args.out {
        let model_path = out.join("model.json");
        ModelFile::with_binarizer(model, inputs.binarizer).save(&model_path)?;
        let reports_path = out.join("epochs.jsonl");
        let mut w = BufWriter::new(
            File::create(&reports_path)
                .with_context(|| format!("creating {}", reports_path.display()))?,
        );
        for r in &reports {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        w.flush()?;
        println!(
            "wrote {} and {}",
            model_path.display(),
            reports_path.display()
        );
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    require_file(&args.model)?;
    args.data.check_paths()?;
    let file = ModelFile::load(&args.model)?;
    let (kind, task) = match file.model {
        Model::Classifier(_) => (LabelKind::Class, Task::Classify),
        Model::Regressor(_) => (LabelKind::Real, Task::Regress),
    };
    let seed = file.model.config().seed;
    let inputs = args.data.load(kind, task, seed, file.binarizer.as_ref())?;
    // a held-out split is what gets scored when one exists
    let data = inputs.test.as_ref().unwrap_or(&inputs.train);
    let metrics = match &file.model {
        Model::Classifier(tm) => {
            let truth = data
                .class_labels()
                .ok_or_else(|| anyhow!("classification needs class labels"))?;
            classification_metrics(&tm.predict(data)?, truth)?
        }
        Model::Regressor(h) => {
            let truth = data
                .targets()
                .ok_or_else(|| anyhow!("regression needs real-valued targets"))?;
            Metrics::Regression {
                mae: mean_absolute_error(&h.predict(data)?, truth)?,
            }
        }
    };
    match metrics {
        Metrics::Classification { accuracy, macro_f1 } => {
            println!("accuracy {accuracy:.4}");
            println!("macro_f1 {macro_f1:.4}");
        }
        Metrics::Regression { mae } => println!("mae {mae:.4}"),
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut template = None;
    for &n in &args.clause_counts {
        template = Some(args.hyper.config(n)?);
    }
    let template = template.ok_or_else(|| anyhow!("--clauses needs at least one count"))?;
    if let Some(r) = args.margin_ratio {
        if !(r > 0.0 && r.is_finite()) {
            bail!("--margin-ratio must be positive, got {r}");
        }
    }
    args.data.check_paths()?;
    let w = template.workers;
    let modes = match args.mode {
        ModeArg::Seq => vec![Mode::Sequential],
        ModeArg::Par => vec![Mode::Parallel { workers: w }],
        ModeArg::Both => vec![Mode::Sequential, Mode::Parallel { workers: w }],
    };
    let inputs = args.data.load(
        args.hyper.label_kind(),
        args.hyper.task,
        template.seed,
        None,
    )?;
    let plan = BenchPlan {
        epochs: template.epochs,
        template,
        clause_counts: args.clause_counts,
        modes,
        refresh: args.hyper.refresh(),
        margin_ratio: args.margin_ratio,
        per_epoch: args.per_epoch,
    };
    let records = bench_sweep(&inputs.train, inputs.test.as_ref(), &plan, |r| {
        log::info!(
            "{} n={} {:.4}s/epoch {}={:.4}",
            r.mode,
            r.clauses,
            r.seconds,
            r.metric_name,
            r.metric_value
        );
    })?;
    match &args.out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_bench_csv(&records, BufWriter::new(f))?;
        }
        None => write_bench_csv(&records, std::io::stdout().lock())?,
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let data = match args.kind {
        SynthKind::Xor => synth_xor(args.rows, args.noise, args.seed)?,
        SynthKind::Staircase => synth_staircase(args.rows, args.features, args.seed)?,
        SynthKind::Pattern => PatternTask::new(args.features, args.classes, 2, 3, args.seed)?
            .sample(args.rows, args.noise, args.seed)?,
    };
    save_dense_binary(&data, &args.out)?;
    println!("wrote {} rows to {}", data.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<MissingInput>().is_some() {
                ExitCode::from(EXIT_MISSING_INPUT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
