//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::indtest::{HsicMethod, DEFAULT_GAMMA_MIN, DEFAULT_PERMUTATIONS};
use crate::rankdep::{codec_t, foci_select, transform_g, Transform};
use crate::regress::{BoostParams, Mode, RegressorSpec, DEFAULT_BIG};
use crate::scmlab::{simulate, write_csv, Suite};
use crate::tabular::{load_csv, RngStream};
use crate::wellspec::{alg3_multisplit, AnalysisConfig};

#[derive(Debug, Parser)]
#[command(
    name = "wellspec",
    version,
    about = "Detect causally well-specified regression effects"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the multisplit selection procedure on a CSV file.
    Analyze(AnalyzeArgs),
    /// Simulate a benchmark suite and score the procedure against ground truth.
    Simulate(SimulateArgs),
    /// Print the rank dependence coefficient of a response on predictors.
    Codec(CodecArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegressorKind {
    Boosted,
    Knn,
    Constant,
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// Number of random splits B; each is used in both orientations.
    #[arg(long, default_value_t = 25)]
    pub splits: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "alpha-tilde", default_value_t = 0.01)]
    pub alpha_tilde: f64,
    /// Residual transform before FOCI [default: absolute for anm, identity for lsnm].
    #[arg(long, value_enum)]
    pub g: Option<Transform>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// HSIC permutations.
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    pub perms: usize,
    #[arg(long, value_enum, default_value_t = HsicMethod::Permutation)]
    pub hsic: HsicMethod,
    #[arg(long = "gamma-min", default_value_t = DEFAULT_GAMMA_MIN)]
    pub gamma_min: f64,
    #[arg(long, value_enum, default_value_t = RegressorKind::Boosted)]
    pub regressor: RegressorKind,
    #[arg(long = "max-rounds", default_value_t = 500)]
    pub max_rounds: usize,
    #[arg(long = "learning-rate", default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long = "max-depth", default_value_t = 3)]
    pub max_depth: usize,
    #[arg(long = "min-leaf", default_value_t = 5)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 20)]
    pub patience: usize,
    /// Neighbours for the knn regressor.
    #[arg(long = "knn-k", default_value_t = 10)]
    pub knn_k: usize,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl MethodArgs {
    fn config(&self, mode: Mode) -> AnalysisConfig {
        let mut c = AnalysisConfig::new(mode);
        c.splits = self.splits;
        c.alpha = self.alpha;
        c.alpha_tilde = self.alpha_tilde;
        if let Some(g) = self.g {
            c.g = g;
        }
        c.master_seed = self.seed;
        c.n_permutations = self.perms;
        c.hsic = self.hsic;
        c.gamma_min = self.gamma_min;
        c.big = DEFAULT_BIG;
        c.regressor = match self.regressor {
            RegressorKind::Boosted => RegressorSpec::BoostedTrees(BoostParams {
                max_rounds: self.max_rounds,
                learning_rate: self.learning_rate,
                max_depth: self.max_depth,
                min_leaf: self.min_leaf,
                early_stop_patience: self.patience,
                ..Default::default()
            }),
            RegressorKind::Knn => RegressorSpec::Knn { k: self.knn_k },
            RegressorKind::Constant => RegressorSpec::ConstantMean,
        };
        c
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Mode::Anm)]
    pub mode: Mode,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include per-split diagnostics.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// fig2, lsnm or custom:<spec.json>
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub runs: usize,
    /// Noise model used for analysis [default: lsnm for the lsnm suite, anm otherwise].
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Comma-separated predictor columns [default: all other columns].
    #[arg(long, value_delimiter = ',')]
    pub predictors: Vec<String>,
    /// Transform applied to the response.
    #[arg(long, value_enum, default_value_t = Transform::Identity)]
    pub g: Transform,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run forward selection and report the chosen columns.
    #[arg(long)]
    pub foci: bool,
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        })?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn io_err(path: &Option<PathBuf>) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.clone().unwrap_or_else(|| "<stdout>".into()),
        source,
    }
}

fn emit_json(value: &Value, out: &Option<PathBuf>) -> Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(out))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::InvalidArgument("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(f),
    }
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let cfg = args.method.config(args.mode);
    cfg.validate()?;
    let ds = load_csv(&args.input, &args.target)?;
    log::info!("analyzing {} rows, {} predictors", ds.n(), ds.p());
    let report = with_jobs(args.method.jobs, || alg3_multisplit(&ds, &cfg, args.verbose))?;
    let mut value = serde_json::to_value(&report)?;
    value["timestamp"] = json!(timestamp());
    emit_json(&value, &args.out)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let suite = Suite::parse(&args.suite)?;
    let cfg = args.method.config(args.mode.unwrap_or_else(|| suite.default_mode()));
    cfg.validate()?;
    let out = with_jobs(args.method.jobs, || {
        simulate(&suite, args.n, args.runs, args.method.seed, &cfg)
    })?;
    log::info!("{} rows, rates {:?}", out.rows.len(), out.rates);
    let w = open_out(&args.out)?;
    write_csv(&out, w)
}

pub fn cmd_codec(args: &CodecArgs) -> Result<()> {
    let ds = load_csv(&args.input, &args.response)?;
    let cols = if args.predictors.is_empty() {
        (0..ds.p()).collect()
    } else {
        args.predictors
            .iter()
            .map(|p| ds.column_index(p).ok_or_else(|| Error::MissingColumn(p.clone())))
            .collect::<Result<Vec<_>>>()?
    };
    let ds = ds.select_columns(&cols)?;
    let y = transform_g(ds.y(), args.g);
    let rng = RngStream::new(args.seed);
    let stat = codec_t(&y, ds.x(), &rng.child(0), None)?;
    let mut value = serde_json::to_value(&stat)?;
    if args.foci {
        let sel = foci_select(&y, ds.x(), &rng.child(1))?;
        let names: Vec<&str> = sel.selected.iter().map(|&j| ds.names()[j].as_str()).collect();
        value["selected"] = json!(names);
    }
    emit_json(&value, &None)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(s) => cmd_simulate(s),
        Command::Codec(c) => cmd_codec(c),
    }
}

/// Process exit status for a command outcome: 0 on success, 2 for input
/// errors and 1 for internal failures.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_input_error() => 2,
        Err(_) => 1,
    }
}
