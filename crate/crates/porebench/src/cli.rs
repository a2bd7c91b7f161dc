//! Command-line interface.
//!
//! Subcommands: `generate`, `label`, `benchmark`, `optimize`,
//! `sweep-split`, `sweep-samples`, `plot`. Exit codes: 0 success,
//! 1 usage or validation error, 2 I/O failure. All file outputs are
//! written atomically (temp sibling, then rename) and are byte-identical
//! across repeated runs with the same flags.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classify::{fit, AlgorithmConfig, AlgorithmKind};
use crate::csvio;
use crate::data::{Dataset, GenConfig};
use crate::datagen::generate_dataset;
use crate::error::{Error, Result};
use crate::eval::{benchmark, Report, SplitConfig};
use crate::runconfig::RunConfigFile;
use crate::svg;
use crate::tune::{
    optimize, sample_size_sweep, sample_sweep_csv, split_ratio_sweep, split_sweep_csv,
    tuned_benchmark, Objective, SearchSpace, Strategy, TuneMode,
};
use crate::util::write_atomic;

#[derive(Parser)]
#[command(name = "porebench", version, about = "Deterministic classifier benchmark on synthetic micropore data")]
struct Cli {
    /// JSON run configuration; explicit flags override its values
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,

    /// Output path (role depends on the subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Generator seed override
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress informational and warning output
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV plus a provenance JSON sidecar
    Generate(GenerateArgs),
    /// Rewrite the Label column of a dataset with the expert rule
    Label(LabelArgs),
    /// Train and score classifiers on one shared split
    Benchmark(BenchmarkArgs),
    /// Run the train/test/optimize loop for one algorithm
    Optimize(OptimizeArgs),
    /// Benchmark across several test-size ratios
    SweepSplit(SweepSplitArgs),
    /// Benchmark across several dataset sizes
    SweepSamples(SweepSamplesArgs),
    /// Emit a deterministic SVG chart from a dataset or report
    Plot(PlotArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Number of rows
    #[arg(long)]
    n: Option<usize>,
    /// Probability that PhiXSectContin is 1
    #[arg(long)]
    p_phi_one: Option<f64>,
    /// Probability that Betw2Amplify is 1
    #[arg(long)]
    p_betw_one: Option<f64>,
    /// Labeling jitter sd for PixelColor
    #[arg(long)]
    jitter_pixel_sd: Option<f64>,
    /// Labeling jitter sd for NeighbColorGrad
    #[arg(long)]
    jitter_grad_sd: Option<f64>,
    /// Uniform label flip probability
    #[arg(long)]
    p_flip: Option<f64>,
}

#[derive(clap::Args)]
struct LabelArgs {
    /// Input dataset (CSV or TSV; Label column optional)
    input: PathBuf,
}

#[derive(clap::Args)]
struct BenchmarkArgs {
    /// Dataset CSV; omitted = generate the default dataset
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    test_size: Option<f64>,
    #[arg(long)]
    random_state: Option<u64>,
    #[arg(long)]
    stratified: bool,
    /// Comma-separated algorithm names, or "all"
    #[arg(long, default_value = "all")]
    algorithms: String,
    /// Per-algorithm tuning mode filling the best-accuracy column
    #[arg(long, value_enum, default_value_t = TuneArg::None)]
    tune: TuneArg,
    #[arg(long, default_value_t = 512)]
    budget: usize,
    #[arg(long, default_value_t = 512)]
    patience: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Grid)]
    strategy: StrategyArg,
    /// Seed for the random search strategy
    #[arg(long, default_value_t = 3)]
    tune_seed: u64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Accuracy)]
    objective: ObjectiveArg,
    /// Also write the Markdown score table here
    #[arg(long)]
    md: Option<PathBuf>,
    /// Directory for per-algorithm fitted model documents
    #[arg(long)]
    save_models: Option<PathBuf>,
}

#[derive(clap::Args)]
struct OptimizeArgs {
    /// Algorithm to tune (knn, gnb, lr, svm, rf)
    #[arg(long)]
    algorithm: String,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    test_size: Option<f64>,
    #[arg(long)]
    random_state: Option<u64>,
    #[arg(long)]
    stratified: bool,
    #[arg(long, default_value_t = 512)]
    budget: usize,
    #[arg(long, default_value_t = 512)]
    patience: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Grid)]
    strategy: StrategyArg,
    /// honest = select on a validation split; paper = select on test
    #[arg(long, value_enum, default_value_t = ModeArg::Honest)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Accuracy)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 3)]
    tune_seed: u64,
}

#[derive(clap::Args)]
struct SweepSplitArgs {
    /// Comma-separated test sizes
    #[arg(long, default_value = "0.05,0.2,0.5")]
    ratios: String,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    random_state: Option<u64>,
    #[arg(long, default_value = "all")]
    algorithms: String,
}

#[derive(clap::Args)]
struct SweepSamplesArgs {
    /// Comma-separated dataset sizes (each at least 20)
    #[arg(long, default_value = "200,2000,20000")]
    sizes: String,
    #[arg(long)]
    test_size: Option<f64>,
    #[arg(long)]
    random_state: Option<u64>,
    #[arg(long, default_value = "all")]
    algorithms: String,
}

#[derive(clap::Args)]
struct PlotArgs {
    /// Chart kind
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Dataset CSV (scatter and histogram)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Report JSON (bars)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PlotKind {
    Scatter,
    Histogram,
    Bars,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TuneArg {
    None,
    Paper,
    Honest,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum StrategyArg {
    Grid,
    Random,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Grid => Strategy::Grid,
            StrategyArg::Random => Strategy::Random,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Paper,
    Honest,
}

impl From<ModeArg> for TuneMode {
    fn from(m: ModeArg) -> TuneMode {
        match m {
            ModeArg::Paper => TuneMode::PaperFaithful,
            ModeArg::Honest => TuneMode::Honest,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ObjectiveArg {
    Accuracy,
    MacroF1,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Accuracy => Objective::Accuracy,
            ObjectiveArg::MacroF1 => Objective::MacroF1,
        }
    }
}

/// Parses the command line and runs it, mapping errors to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let ctx = match Ctx::new(&cli) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match execute(&cli.command, &ctx) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 2,
        _ => 1,
    }
}

struct Ctx {
    file: RunConfigFile,
    out: Option<PathBuf>,
    seed: Option<u64>,
    quiet: bool,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Ctx> {
        let file = match &cli.config {
            Some(path) => RunConfigFile::load(path)?,
            None => RunConfigFile::default(),
        };
        Ok(Ctx { file, out: cli.out.clone(), seed: cli.seed, quiet: cli.quiet })
    }

    fn info(&self, message: &str) {
        if !self.quiet {
            eprintln!("{message}");
        }
    }

    fn warn(&self, message: &str) {
        if !self.quiet {
            eprintln!("warning: {message}");
        }
    }

    fn gen_config(&self) -> GenConfig {
        let mut cfg = self.file.gen_config.clone().unwrap_or_default();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg
    }

    fn split_config(
        &self,
        test_size: Option<f64>,
        random_state: Option<u64>,
        stratified: bool,
    ) -> SplitConfig {
        let mut split = self.file.split.unwrap_or_default();
        if let Some(ts) = test_size {
            split.test_size = ts;
        }
        if let Some(rs) = random_state {
            split.random_state = rs;
        }
        if stratified {
            split.stratified = true;
        }
        split
    }

    fn algorithms(&self, flag: &str) -> Result<Vec<AlgorithmConfig>> {
        if flag == "all" {
            if let Some(list) = &self.file.algorithms {
                return Ok(list.clone());
            }
            return Ok(AlgorithmConfig::suite_defaults());
        }
        flag.split(',')
            .map(|name| {
                let kind = AlgorithmKind::parse(name)?;
                // Prefer a matching entry from the config file.
                if let Some(list) = &self.file.algorithms {
                    if let Some(cfg) = list.iter().find(|c| c.kind() == kind) {
                        return Ok(cfg.clone());
                    }
                }
                Ok(AlgorithmConfig::default_for(kind))
            })
            .collect()
    }

    fn search_space(&self) -> SearchSpace {
        self.file.search_space.clone().unwrap_or_default()
    }

    /// Loads the dataset from a file or generates the configured default.
    fn dataset(&self, data: &Option<PathBuf>) -> Result<Dataset> {
        match data {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let parsed = csvio::parse_dataset(&text)?;
                for w in &parsed.warnings {
                    self.warn(w);
                }
                parsed.into_labeled()
            }
            None => {
                let cfg = self.gen_config();
                self.info(&format!(
                    "generating default dataset (seed {}, n {})",
                    cfg.seed, cfg.n_samples
                ));
                generate_dataset(&cfg)
            }
        }
    }

    fn write_or_print(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                write_atomic(path, text.as_bytes())?;
                self.info(&format!("wrote {}", path.display()));
                Ok(())
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn execute(command: &Command, ctx: &Ctx) -> Result<()> {
    match command {
        Command::Generate(args) => cmd_generate(args, ctx),
        Command::Label(args) => cmd_label(args, ctx),
        Command::Benchmark(args) => cmd_benchmark(args, ctx),
        Command::Optimize(args) => cmd_optimize(args, ctx),
        Command::SweepSplit(args) => cmd_sweep_split(args, ctx),
        Command::SweepSamples(args) => cmd_sweep_samples(args, ctx),
        Command::Plot(args) => cmd_plot(args, ctx),
    }
}

fn cmd_generate(args: &GenerateArgs, ctx: &Ctx) -> Result<()> {
    let mut cfg = ctx.gen_config();
    if let Some(n) = args.n {
        cfg.n_samples = n;
    }
    if let Some(v) = args.p_phi_one {
        cfg.p_phi_one = v;
    }
    if let Some(v) = args.p_betw_one {
        cfg.p_betw_one = v;
    }
    if let Some(v) = args.jitter_pixel_sd {
        cfg.jitter_pixel_sd = v;
    }
    if let Some(v) = args.jitter_grad_sd {
        cfg.jitter_grad_sd = v;
    }
    if let Some(v) = args.p_flip {
        cfg.p_flip = v;
    }
    let data = generate_dataset(&cfg)?;
    let csv = csvio::write_dataset(&data);

    let out = ctx
        .out
        .clone()
        .or_else(|| ctx.file.out.clone())
        .unwrap_or_else(|| PathBuf::from("dataset.csv"));
    write_atomic(&out, csv.as_bytes())?;
    let mut sidecar = serde_json::to_string_pretty(&cfg)?;
    sidecar.push('\n');
    let sidecar_path = PathBuf::from(format!("{}.json", out.display()));
    write_atomic(&sidecar_path, sidecar.as_bytes())?;
    ctx.info(&format!(
        "wrote {} ({} rows) and {}",
        out.display(),
        data.len(),
        sidecar_path.display()
    ));
    Ok(())
}

fn cmd_label(args: &LabelArgs, ctx: &Ctx) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    let (out, warnings) = csvio::relabel(&text)?;
    for w in &warnings {
        ctx.warn(w);
    }
    ctx.write_or_print(&out)
}

fn algorithm_kinds(configs: &[AlgorithmConfig]) -> Vec<AlgorithmKind> {
    configs.iter().map(|c| c.kind()).collect()
}

fn cmd_benchmark(args: &BenchmarkArgs, ctx: &Ctx) -> Result<()> {
    let data = ctx.dataset(&args.data)?;
    let split = ctx.split_config(args.test_size, args.random_state, args.stratified);
    let configs = ctx.algorithms(&args.algorithms)?;

    let report: Report = match args.tune {
        TuneArg::None => benchmark(&data, &split, &configs)?,
        tune => {
            let mode = match tune {
                TuneArg::Paper => TuneMode::PaperFaithful,
                _ => TuneMode::Honest,
            };
            let (report, _) = tuned_benchmark(
                &data,
                &split,
                &algorithm_kinds(&configs),
                &ctx.search_space(),
                mode,
                args.objective.into(),
                args.budget,
                args.patience,
                args.strategy.into(),
                args.tune_seed,
            )?;
            report
        }
    };

    if let Some(dir) = &args.save_models {
        std::fs::create_dir_all(dir)?;
        let (train, _) = crate::eval::train_test_split(&data, &split)?;
        for entry in &report.entries {
            if entry.error.is_none() {
                let model = fit(&entry.config, &train)?;
                let path = dir.join(format!("{}.json", entry.algorithm));
                write_atomic(&path, model.to_json()?.as_bytes())?;
            }
        }
        ctx.info(&format!("saved model documents under {}", dir.display()));
    }
    if let Some(md_path) = &args.md {
        write_atomic(md_path, report.to_markdown().as_bytes())?;
    }

    let json = report.to_json()?;
    match &ctx.out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            ctx.info(&format!("wrote {}", path.display()));
            if !ctx.quiet {
                print!("{}", report.to_markdown());
            }
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs, ctx: &Ctx) -> Result<()> {
    let kind = AlgorithmKind::parse(&args.algorithm)?;
    let data = ctx.dataset(&args.data)?;
    let split = ctx.split_config(args.test_size, args.random_state, args.stratified);
    let result = optimize(
        kind,
        &ctx.search_space(),
        &data,
        &split,
        args.mode.into(),
        args.objective.into(),
        args.budget,
        args.patience,
        args.strategy.into(),
        args.tune_seed,
    )?;
    ctx.write_or_print(&result.to_json()?)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::Validation(format!("bad {what} value {tok:?}")))
        })
        .collect()
}

/// Sidecar path for the JSON form of a sweep written as CSV.
fn json_sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn cmd_sweep_split(args: &SweepSplitArgs, ctx: &Ctx) -> Result<()> {
    let ratios: Vec<f64> = parse_list(&args.ratios, "ratio")?;
    let data = ctx.dataset(&args.data)?;
    let configs = ctx.algorithms(&args.algorithms)?;
    let random_state = args
        .random_state
        .unwrap_or_else(|| ctx.split_config(None, None, false).random_state);
    let rows = split_ratio_sweep(&data, &ratios, &configs, random_state)?;
    let csv = split_sweep_csv(&rows);
    let mut json = serde_json::to_string_pretty(&rows)?;
    json.push('\n');
    match &ctx.out {
        Some(path) => {
            write_atomic(path, csv.as_bytes())?;
            write_atomic(&json_sidecar(path), json.as_bytes())?;
            ctx.info(&format!(
                "wrote {} and {}",
                path.display(),
                json_sidecar(path).display()
            ));
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_sweep_samples(args: &SweepSamplesArgs, ctx: &Ctx) -> Result<()> {
    let sizes: Vec<usize> = parse_list(&args.sizes, "size")?;
    let gen = ctx.gen_config();
    let split = ctx.split_config(args.test_size, args.random_state, false);
    let configs = ctx.algorithms(&args.algorithms)?;
    let rows = sample_size_sweep(&gen, &sizes, &split, &configs)?;
    let csv = sample_sweep_csv(&rows);
    let mut json = serde_json::to_string_pretty(&rows)?;
    json.push('\n');
    match &ctx.out {
        Some(path) => {
            write_atomic(path, csv.as_bytes())?;
            write_atomic(&json_sidecar(path), json.as_bytes())?;
            ctx.info(&format!(
                "wrote {} and {}",
                path.display(),
                json_sidecar(path).display()
            ));
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs, ctx: &Ctx) -> Result<()> {
    let svg_text = match args.kind {
        PlotKind::Scatter | PlotKind::Histogram => {
            let data = match &args.data {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let parsed = csvio::parse_dataset(&text)?;
                    for w in &parsed.warnings {
                        ctx.warn(w);
                    }
                    parsed.into_labeled()?
                }
                None => ctx.dataset(&None)?,
            };
            match args.kind {
                PlotKind::Scatter => svg::scatter_matrix(&data),
                _ => svg::histograms(&data),
            }
        }
        PlotKind::Bars => {
            let path = args.report.as_ref().ok_or_else(|| {
                Error::Validation("--report is required for the bars chart".into())
            })?;
            let report = Report::from_json(&std::fs::read_to_string(path)?)
                .map_err(|e| Error::Validation(format!("report file: {e}")))?;
            svg::score_bars(&report)
        }
    };
    let out = ctx
        .out
        .clone()
        .or_else(|| ctx.file.out.clone())
        .unwrap_or_else(|| PathBuf::from("plot.svg"));
    write_atomic(&out, svg_text.as_bytes())?;
    ctx.info(&format!("wrote {}", out.display()));
    Ok(())
}
