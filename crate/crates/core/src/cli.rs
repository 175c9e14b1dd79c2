//! Command-line front end: `select`, `eval` and `stats`.
//!
//! Exit codes: 0 on success, 1 on a domain or I/O error (the error name and
//! message go to stderr), 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::eval::{
    compare_on_synthetic, compare_strategies, correlation_study, generate_synthetic,
    generate_test_set, norm_histogram, EvalReport, LabeledSet, NormSummary, SyntheticSpec,
    EVAL_SCHEMA_VERSION,
};
use crate::ingest::{
    load_candidates, load_features, parse_index_list, sha256_hex, write_result, LoadOptions,
    ResultRecord,
};
use crate::linalg::{compute_norms, NormType};
use crate::strategies::{
    select, SelectionConfig, Strategy, DEFAULT_CANDIDATE_MULTIPLIER, DEFAULT_EPSILON_REL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "subset-select",
    version,
    about = "Norm-weighted and Gram-Schmidt subset selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a subset of examples from a feature file.
    Select(SelectArgs),
    /// Compare strategies or run the norm/accuracy correlation study.
    Eval(EvalArgs),
    /// Norm histogram and summary statistics of a feature file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Scale every row to unit L2 norm (after centering, if requested).
    #[arg(long)]
    pub normalize_rows: bool,
    /// Subtract the column means.
    #[arg(long)]
    pub center: bool,
}

impl TransformArgs {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            normalize_rows: self.normalize_rows,
            center: self.center,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Strategy,
    #[arg(long)]
    pub budget: usize,
    /// Required for every randomized strategy.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "l2", value_parser = parse_norm)]
    pub norm: NormType,
    /// Ranked candidate file, required by norm-filter.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_MULTIPLIER)]
    pub multiplier: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON_REL)]
    pub epsilon_rel: f64,
    #[command(flatten)]
    pub transforms: TransformArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Generate a corrupted Gaussian mixture instead of reading files.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Newline-delimited (or JSON array) class labels for --input.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Run the correlation study instead of the strategy comparison.
    #[arg(long)]
    pub correlation: bool,
    #[arg(long)]
    pub subset_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub budget_sweep: Vec<usize>,
    /// Strategies to compare (default: all except norm-filter).
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    pub strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "l2", value_parser = parse_norm)]
    pub norm: NormType,
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    #[arg(long, default_value_t = 500)]
    pub per_class: usize,
    #[arg(long, default_value_t = 32)]
    pub dims: usize,
    #[arg(long, default_value_t = SyntheticSpec::default().centroid_radius)]
    pub radius: f64,
    #[arg(long, default_value_t = SyntheticSpec::default().noise_sigma)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = SyntheticSpec::default().corrupted_fraction)]
    pub corrupted_fraction: f64,
    #[arg(long, default_value_t = SyntheticSpec::default().shrink)]
    pub shrink: f64,
    /// Clean test examples per class for --synthetic.
    #[arg(long, default_value_t = 100)]
    pub test_per_class: usize,
    #[command(flatten)]
    pub transforms: TransformArgs,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "l2", value_parser = parse_norm)]
    pub norm: NormType,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[command(flatten)]
    pub transforms: TransformArgs,
    /// Histogram CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_norm(s: &str) -> Result<NormType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(Error::Io(e))
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Select(a) => run_select(a, stdout),
        Command::Eval(a) => run_eval(a, stdout),
        Command::Stats(a) => run_stats(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(stderr, "error: {}: {e}", e.name());
            EXIT_DOMAIN
        }
    }
}

fn run_select(args: &SelectArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if args.strategy == Strategy::NormFilter && args.candidates.is_none() {
        return Err(Failure::Usage(
            "strategy norm-filter requires --candidates".into(),
        ));
    }
    let seed = match (args.seed, args.strategy.is_randomized()) {
        (Some(seed), _) => seed,
        (None, false) => 0,
        (None, true) => {
            return Err(Failure::Usage(format!(
                "strategy {} is randomized and requires --seed",
                args.strategy
            )))
        }
    };

    let raw = fs::read(&args.input)?;
    let features = load_features(&args.input, &args.transforms.options())?;
    let config = SelectionConfig::new(args.strategy, args.budget)
        .with_seed(seed)
        .with_norm(args.norm)
        .with_epsilon_rel(args.epsilon_rel)
        .with_candidate_multiplier(args.multiplier);
    let candidates = match &args.candidates {
        Some(path) if args.strategy == Strategy::NormFilter => {
            Some(load_candidates(path, features.n_examples())?)
        }
        _ => None,
    };
    let result = select(&features, &config, candidates.as_ref())?;
    let record = ResultRecord::from_result(&result, Some(sha256_hex(&raw)));
    write_result(&record, &args.out)?;
    writeln!(
        stdout,
        "strategy={} budget={} seed={} out={}",
        config.strategy,
        config.budget,
        config.seed,
        args.out.display()
    )?;
    Ok(())
}

fn run_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (pool, test, synthetic) = match (args.synthetic, &args.input, &args.labels) {
        (true, None, None) => {
            let spec = SyntheticSpec {
                n_classes: args.classes,
                per_class: args.per_class,
                n_dims: args.dims,
                centroid_radius: args.radius,
                noise_sigma: args.noise_sigma,
                corrupted_fraction: args.corrupted_fraction,
                shrink: args.shrink,
                seed: args.seed,
            };
            let pool = generate_synthetic(&spec)?.set;
            let test = generate_test_set(&spec, args.test_per_class)?;
            (pool, test, Some(spec))
        }
        (false, Some(input), Some(labels)) => {
            let features = load_features(input, &args.transforms.options())?;
            let labels = parse_index_list(&fs::read_to_string(labels)?)?;
            let pool = LabeledSet::new(features, labels)?;
            (pool.clone(), pool, None)
        }
        (true, _, _) => {
            return Err(Failure::Usage(
                "--synthetic cannot be combined with --input/--labels".into(),
            ))
        }
        _ => {
            return Err(Failure::Usage(
                "eval needs either --synthetic or both --input and --labels".into(),
            ))
        }
    };

    let mut report = EvalReport {
        schema_version: EVAL_SCHEMA_VERSION,
        seed: args.seed,
        synthetic,
        comparison: None,
        correlation: None,
    };
    if args.correlation {
        let subset_size = args
            .subset_size
            .ok_or_else(|| Failure::Usage("--correlation requires --subset-size".into()))?;
        report.correlation = Some(correlation_study(
            &pool,
            &test,
            subset_size,
            args.trials,
            args.seed,
        )?);
    } else {
        if args.budget_sweep.is_empty() {
            return Err(Failure::Usage(
                "strategy comparison requires --budget-sweep".into(),
            ));
        }
        let strategies: Vec<Strategy> = if args.strategy.is_empty() {
            Strategy::ALL
                .into_iter()
                .filter(|s| *s != Strategy::NormFilter)
                .collect()
        } else {
            args.strategy.clone()
        };
        report.comparison = Some(match &report.synthetic {
            Some(spec) => compare_on_synthetic(
                spec,
                args.test_per_class,
                &strategies,
                &args.budget_sweep,
                args.trials,
                args.seed,
                args.norm,
            )?,
            None => compare_strategies(
                &pool,
                &test,
                &strategies,
                &args.budget_sweep,
                args.trials,
                args.seed,
                args.norm,
            )?,
        });
    }

    let json = report.to_json();
    match &args.out {
        Some(path) => {
            fs::write(path, &json)?;
            if let Some(c) = &report.correlation {
                writeln!(
                    stdout,
                    "correlation slope={:.6} r={:.4} trials={} out={}",
                    c.fit.slope,
                    c.fit.pearson_r,
                    c.n_trials,
                    path.display()
                )?;
            }
            if let Some(c) = &report.comparison {
                for r in &c.results {
                    writeln!(
                        stdout,
                        "{:<10} budget={:<5} acc={:.4} +- {:.4}",
                        r.strategy.as_str(),
                        r.budget,
                        r.mean_accuracy,
                        r.stderr
                    )?;
                }
            }
        }
        None => stdout.write_all(json.as_bytes())?,
    }
    Ok(())
}

fn run_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let features = load_features(&args.input, &args.transforms.options())?;
    let norms = compute_norms(&features, args.norm);
    let summary = NormSummary::from_values(&norms)?;
    let histogram = norm_histogram(&features, args.norm, args.bins)?;
    writeln!(
        stdout,
        "n={} norm={} min={:?} max={:?} mean={:?} median={:?}",
        norms.len(),
        args.norm,
        summary.min,
        summary.max,
        summary.mean,
        summary.median
    )?;
    match &args.out {
        Some(path) => fs::write(path, histogram.to_csv())?,
        None => stdout.write_all(histogram.to_csv().as_bytes())?,
    }
    Ok(())
}
