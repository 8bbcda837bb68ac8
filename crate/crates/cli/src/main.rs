mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Hierarchical Bayesian word embeddings: build pairs, train, evaluate.
///
/// Every command is deterministic given its inputs and `--seed`. Settings
/// come from flags, then the optional `--config` TOML file, then the
/// built-in defaults. `BHWR_THREADS` caps the worker threads.
#[derive(Debug, Parser)]
#[command(name = "bhwr", version)]
pub struct Cli {
    /// TOML file with [sampler], [train], [sg] and [eval] sections.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn a corpus (one sentence per line) into a pair cache.
    BuildPairs(BuildPairsArgs),
    /// Train the Bayesian model; without --taxonomy this is plain Bayesian skip-gram.
    Train(TrainArgs),
    /// Train the point-estimate skip-gram baseline on a pair cache.
    TrainSg(TrainSgArgs),
    /// Spearman correlations on word-similarity benchmarks.
    Eval(EvalArgs),
    /// Similarity of one word pair.
    Score(ScoreArgs),
    /// Most similar words.
    Nn(NnArgs),
    /// Write mean vectors in word2vec text format.
    Export(ExportArgs),
    /// Write a synthetic corpus, taxonomy and gold similarities.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BuildPairsArgs {
    /// UTF-8 text, one whitespace-tokenized sentence per line.
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Output pair cache.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Largest context half-width; each centre draws its width from 1..=N [default: 5]
    #[arg(long, value_name = "N")]
    pub c_max: Option<usize>,
    /// Subsampling threshold t, 0 disables [default: 1e-4]
    #[arg(long, value_name = "T")]
    pub subsample: Option<f64>,
    /// Negatives per positive [default: 1]
    #[arg(long, value_name = "R")]
    pub neg_ratio: Option<f64>,
    /// Drop words seen fewer times [default: 1]
    #[arg(long, value_name = "M")]
    pub min_count: Option<u64>,
    /// Exponent of the negative-sampling unigram distribution [default: 0.75]
    #[arg(long, value_name = "P")]
    pub unigram_power: Option<f64>,
    /// [default: 0]
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum XiModeArg {
    Paper,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScheduleArg {
    Sequential,
    Jacobi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OovArg {
    Extend,
    Drop,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Pair cache from build-pairs.
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,
    /// `child<TAB>parent` edges; omit for the taxonomy-free model.
    #[arg(long, value_name = "FILE")]
    pub taxonomy: Option<PathBuf>,
    /// Output model file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Embedding dimension [default: 50]
    #[arg(long, value_name = "N")]
    pub k: Option<usize>,
    /// Prior precision of context vectors [default: 0.1]
    #[arg(long, value_name = "X")]
    pub tau_u: Option<f64>,
    /// Prior precision of target vectors [default: 0.1]
    #[arg(long, value_name = "X")]
    pub tau_v: Option<f64>,
    /// Prior precision of context parent vectors [default: 0.001]
    #[arg(long, value_name = "X")]
    pub tau_hu: Option<f64>,
    /// Prior precision of target parent vectors [default: 0.001]
    #[arg(long, value_name = "X")]
    pub tau_hv: Option<f64>,
    /// [default: 50]
    #[arg(long, value_name = "N")]
    pub max_sweeps: Option<usize>,
    /// Stop when the relative ELBO change falls below this [default: 1e-5]
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// How ξ is computed from the factor moments [default: exact]
    #[arg(long, value_enum)]
    pub xi_mode: Option<XiModeArg>,
    /// Parent update schedule; jacobi is parallel but not monotone [default: sequential]
    #[arg(long, value_enum)]
    pub parent_schedule: Option<ScheduleArg>,
    /// Taxonomy words missing from the corpus: add them, or drop their edges [default: extend]
    #[arg(long, value_enum)]
    pub oov_policy: Option<OovArg>,
    /// Draw fresh negatives before every sweep after the first.
    #[arg(long)]
    pub resample_negatives: bool,
    /// [default: 0]
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainSgArgs {
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// [default: 50]
    #[arg(long, value_name = "N")]
    pub k: Option<usize>,
    /// Initial step size, decayed linearly [default: 0.025]
    #[arg(long, value_name = "X")]
    pub lr: Option<f64>,
    /// [default: 15]
    #[arg(long, value_name = "N")]
    pub epochs: Option<usize>,
    /// [default: 0]
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RareModeArg {
    Any,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Table,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model from train or train-sg.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Comma-separated `[preset:]path` list. Presets: ws, rw, men, simlex, scws, generic.
    #[arg(long, value_name = "D1,D2,...", value_delimiter = ',', required = true)]
    pub datasets: Vec<String>,
    /// Words with at most this corpus count are rare [default: 5]
    #[arg(long, value_name = "N")]
    pub rare_max: Option<u64>,
    /// A pair is rare if any or both of its words are [default: any]
    #[arg(long, value_enum)]
    pub rare_mode: Option<RareModeArg>,
    /// [default: table]
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "WORD")]
    pub w1: String,
    #[arg(long, value_name = "WORD")]
    pub w2: String,
}

#[derive(Debug, Args)]
pub struct NnArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "WORD")]
    pub word: String,
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    U,
    V,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Context (u) or target (v) vectors.
    #[arg(long, value_enum, default_value = "u")]
    pub which: SideArg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory for corpus.txt, taxonomy.tsv and gold.tsv.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 5000)]
    pub tokens: usize,
    #[arg(long, default_value_t = 5)]
    pub supergroups: usize,
    #[arg(long, default_value_t = 3)]
    pub groups_per_super: usize,
    #[arg(long, default_value_t = 12)]
    pub words_per_group: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
