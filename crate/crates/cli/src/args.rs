use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use threatlens_core::pipeline::{DEFAULT_ALPHA, DEFAULT_SEED, DEFAULT_TRAIN_FRACTION};

#[derive(Debug, Parser)]
#[command(name = "threatlens", version, about = "Phishing URL and spam text classification")]
pub struct Cli {
    /// Emit exactly one JSON document on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for the train/test split and any sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Service configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Phishing URL detection (gradient-boosted trees).
    Url,
    /// SMS spam detection (multinomial naive Bayes).
    Spam,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Url => "url",
            Task::Spam => "spam",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on the 80% split, report held-out metrics, write the bundle.
    Train(TrainArgs),
    /// Re-run the split and report held-out metrics of a saved model.
    Evaluate(EvaluateArgs),
    /// Classify one URL or text and print the verdict as JSON.
    Classify(ClassifyArgs),
    /// Run the HTTP service until interrupted.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Labeled CSV dataset.
    #[arg(long, value_name = "PATH")]
    pub dataset: PathBuf,
    /// Bundle to write; an existing bundle keeps its other model.
    #[arg(long, short, value_name = "PATH")]
    pub output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    #[command(flatten)]
    pub hyper: Hyperparameters,
}

#[derive(Debug, Args)]
pub struct Hyperparameters {
    /// Laplace smoothing (spam).
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_leaves: Option<usize>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub l2_lambda: Option<f64>,
    #[arg(long)]
    pub subsample: Option<f64>,
    #[arg(long)]
    pub colsample: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    #[arg(long, value_name = "PATH")]
    pub dataset: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub bundle: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub url: Option<String>,
    #[arg(long)]
    pub text: Option<String>,
    /// Classify locally with this bundle.
    #[arg(long, value_name = "PATH", conflicts_with = "server")]
    pub bundle: Option<PathBuf>,
    /// Ask a running service instead, e.g. http://127.0.0.1:8787.
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
    /// Skip enrichment providers for URL verdicts.
    #[arg(long)]
    pub no_enrich: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_name = "PATH")]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
}
