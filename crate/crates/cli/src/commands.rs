use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bhwr::corpus::{build_pair_dataset, build_vocabulary};
use bhwr::eval::{
    evaluate, load_similarity_dataset, DatasetFormat, EvalReport, RareMode, RareSlice, SimilarityDataset,
    WordMatcher,
};
use bhwr::persist::{
    export_sgns_word2vec_text, export_word2vec_text, load_any_model, load_pairs, save_model, save_pairs,
    save_sgns, write_atomic, AnyModel, ModelFile, Side, TrainMetadata,
};
use bhwr::predictive::{nearest_neighbors, pair_similarity};
use bhwr::sgns::{sg_nearest_neighbors, sg_similarity, train_sgns, SgnsConfig};
use bhwr::synthetic::{self, SyntheticConfig};
use bhwr::taxonomy::{load_taxonomy, read_edges};
use bhwr::vb::{init_state, train, train_with_resampling, ParentSchedule};
use bhwr::{Corpus, Hyperparams, NegativeTable, OovPolicy, SamplerConfig, Taxonomy, TrainConfig, Vocabulary, XiMode};
use clap::ValueEnum;

use crate::config::{pick, FileConfig};
use crate::*;

pub fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::BuildPairs(a) => build_pairs(a, &file),
        Command::Train(a) => train_cmd(a, &file),
        Command::TrainSg(a) => train_sg(a, &file),
        Command::Eval(a) => eval_cmd(a, &file),
        Command::Score(a) => score(a),
        Command::Nn(a) => nn(a),
        Command::Export(a) => export(a),
        Command::Synth(a) => synth(a),
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("BHWR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("BHWR_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        bail!("BHWR_THREADS must be a positive integer, got `{raw}`");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// Parses a config-file string with the same spelling the flag accepts.
fn from_file<T: ValueEnum>(key: &str, value: Option<&String>) -> Result<Option<T>> {
    value
        .map(|s| T::from_str(s, true).map_err(|_| anyhow!("config: unknown value `{s}` for {key}")))
        .transpose()
}

fn build_pairs(a: BuildPairsArgs, file: &FileConfig) -> Result<()> {
    let d = SamplerConfig::default();
    let f = &file.sampler;
    let config = SamplerConfig {
        c_max: pick(a.c_max, f.c_max, d.c_max),
        subsample_t: pick(a.subsample, f.subsample, d.subsample_t),
        neg_ratio: pick(a.neg_ratio, f.neg_ratio, d.neg_ratio),
        unigram_power: pick(a.unigram_power, f.unigram_power, d.unigram_power),
        min_count: pick(a.min_count, f.min_count, d.min_count),
        seed: pick(a.seed, f.seed, d.seed),
    };
    config.validate()?;
    let corpus = Corpus::read(&a.corpus).with_context(|| format!("reading corpus {}", a.corpus.display()))?;
    let vocab = build_vocabulary(corpus.tokens(), config.min_count)?;
    let pairs = build_pair_dataset(&corpus, &vocab, &config)?;
    save_pairs(&pairs, &vocab, &a.out)?;
    eprintln!(
        "{} tokens, {} words, {} cells, {} positives, {} negatives",
        corpus.token_count(),
        vocab.len(),
        pairs.len(),
        pairs.total_pos(),
        pairs.total_neg()
    );
    Ok(())
}

fn train_cmd(a: TrainArgs, file: &FileConfig) -> Result<()> {
    let f = &file.train;
    let d = TrainConfig::default();
    let h = Hyperparams::default();
    let xi_mode = match a.xi_mode.or(from_file("xi_mode", f.xi_mode.as_ref())?) {
        Some(XiModeArg::Paper) => XiMode::Paper,
        Some(XiModeArg::Exact) => XiMode::Exact,
        None => d.xi_mode,
    };
    let parent_schedule = match a.parent_schedule.or(from_file("parent_schedule", f.parent_schedule.as_ref())?) {
        Some(ScheduleArg::Sequential) => ParentSchedule::Sequential,
        Some(ScheduleArg::Jacobi) => ParentSchedule::Jacobi,
        None => d.parent_schedule,
    };
    let oov = match a.oov_policy.or(from_file("oov_policy", f.oov_policy.as_ref())?) {
        Some(OovArg::Extend) => OovPolicy::ExtendVocab,
        Some(OovArg::Drop) => OovPolicy::DropEdge,
        None => OovPolicy::default(),
    };
    let config = TrainConfig {
        k: pick(a.k, f.k, d.k),
        max_sweeps: pick(a.max_sweeps, f.max_sweeps, d.max_sweeps),
        rel_elbo_tol: pick(a.tol, f.tol, d.rel_elbo_tol),
        xi_mode,
        parent_schedule,
        seed: pick(a.seed, f.seed, d.seed),
    };
    config.validate()?;
    let hyper = Hyperparams {
        tau_u: pick(a.tau_u, f.tau_u, h.tau_u),
        tau_v: pick(a.tau_v, f.tau_v, h.tau_v),
        tau_hu: pick(a.tau_hu, f.tau_hu, h.tau_hu),
        tau_hv: pick(a.tau_hv, f.tau_hv, h.tau_hv),
    };
    hyper.validate()?;
    let resample = a.resample_negatives || f.resample_negatives.unwrap_or(false);

    let (pairs, mut vocab) = load_pairs(&a.pairs).with_context(|| format!("reading pairs {}", a.pairs.display()))?;
    let taxonomy = match &a.taxonomy {
        Some(path) => {
            let edges = read_edges(path).with_context(|| format!("reading taxonomy {}", path.display()))?;
            let tax = load_taxonomy(&edges, &mut vocab, oov)?;
            eprintln!("taxonomy: {} edges, {} dropped", tax.edge_count(), tax.dropped_edges());
            tax
        }
        None => Taxonomy::empty(vocab.len()),
    };
    let mut state = init_state(vocab.len(), &config, hyper);
    let report = if resample {
        let table = NegativeTable::new(&vocab, pairs.config().unigram_power)?;
        train_with_resampling(&mut state, &pairs, &table, &taxonomy, &config)?
    } else {
        train(&mut state, &pairs, &taxonomy, &config)?
    };
    for (s, e) in report.elbo_trace.iter().enumerate() {
        eprintln!("sweep {:>3}  elbo {e:.6}", s + 1);
    }
    eprintln!(
        "{} after {} sweeps",
        if report.converged { "converged" } else { "stopped" },
        report.elbo_trace.len()
    );
    let model = ModelFile {
        state,
        vocab,
        taxonomy,
        meta: TrainMetadata {
            xi_mode,
            final_elbo: Some(report.final_elbo()),
        },
    };
    save_model(&model, &a.out)?;
    Ok(())
}

fn train_sg(a: TrainSgArgs, file: &FileConfig) -> Result<()> {
    let f = &file.sg;
    let d = SgnsConfig::default();
    let config = SgnsConfig {
        k: pick(a.k, f.k, d.k),
        epochs: pick(a.epochs, f.epochs, d.epochs),
        learning_rate: pick(a.lr, f.lr, d.learning_rate),
        seed: pick(a.seed, f.seed, d.seed),
    };
    let (pairs, vocab) = load_pairs(&a.pairs).with_context(|| format!("reading pairs {}", a.pairs.display()))?;
    let (emb, losses) = train_sgns(&pairs, vocab.len(), config)?;
    for (e, l) in losses.iter().enumerate() {
        eprintln!("epoch {:>3}  loss {l:.6}", e + 1);
    }
    save_sgns(&emb, &vocab, &a.out)?;
    Ok(())
}

fn load(path: &Path) -> Result<AnyModel> {
    load_any_model(path).with_context(|| format!("reading model {}", path.display()))
}

fn vocab_of(model: &AnyModel) -> &Vocabulary {
    match model {
        AnyModel::Bayesian(m) => &m.vocab,
        AnyModel::SkipGram(_, v) => v,
    }
}

fn similarity(model: &AnyModel, i: usize, j: usize) -> f64 {
    match model {
        AnyModel::Bayesian(m) => pair_similarity(i, j, &m.state),
        AnyModel::SkipGram(emb, _) => sg_similarity(i, j, emb),
    }
}

fn lookup(model: &AnyModel, word: &str) -> Result<usize> {
    WordMatcher::new(vocab_of(model))
        .lookup(word)
        .ok_or_else(|| anyhow!("`{word}` is not in the model vocabulary"))
}

/// `preset:path`, or a bare path read with the generic format.
fn load_dataset(spec: &str) -> Result<SimilarityDataset> {
    let (preset, path) = match spec.split_once(':') {
        Some((p, rest)) if DatasetFormat::preset(p).is_some() => (p, rest),
        _ => ("generic", spec),
    };
    let format = DatasetFormat::preset(preset).ok_or_else(|| anyhow!("unknown dataset preset `{preset}`"))?;
    let mut ds = load_similarity_dataset(path, format).with_context(|| format!("reading dataset {path}"))?;
    if preset != "generic" {
        ds.name = preset.to_owned();
    }
    Ok(ds)
}

fn eval_cmd(a: EvalArgs, file: &FileConfig) -> Result<()> {
    let f = &file.eval;
    let rare = RareSlice {
        max_count: pick(a.rare_max, f.rare_max, 5),
        mode: match a.rare_mode.or(from_file("rare_mode", f.rare_mode.as_ref())?) {
            Some(RareModeArg::Both) => RareMode::Both,
            Some(RareModeArg::Any) | None => RareMode::Any,
        },
    };
    let format = pick(a.format, from_file("format", f.format.as_ref())?, FormatArg::Table);
    let datasets: Vec<SimilarityDataset> = a.datasets.iter().map(|s| load_dataset(s.trim())).collect::<Result<_>>()?;
    let model = load(&a.model)?;
    let vocab = vocab_of(&model);
    let scorer = |i, j| similarity(&model, i, j);
    let mut report = EvalReport::default();
    for ds in &datasets {
        report.rows.push(evaluate(scorer, ds, vocab, None));
    }
    for ds in &datasets {
        report.rows.push(evaluate(scorer, ds, vocab, Some(rare)));
    }
    match format {
        FormatArg::Table => print!("{}", report.to_table()),
        FormatArg::Csv => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn score(a: ScoreArgs) -> Result<()> {
    let model = load(&a.model)?;
    let i = lookup(&model, &a.w1)?;
    let j = lookup(&model, &a.w2)?;
    println!("{:.6}", similarity(&model, i, j));
    Ok(())
}

fn nn(a: NnArgs) -> Result<()> {
    let model = load(&a.model)?;
    let i = lookup(&model, &a.word)?;
    let hits = match &model {
        AnyModel::Bayesian(m) => nearest_neighbors(i, &m.state, a.top),
        AnyModel::SkipGram(emb, _) => sg_nearest_neighbors(i, emb, a.top),
    };
    let vocab = vocab_of(&model);
    for (rank, (j, s)) in hits.into_iter().enumerate() {
        println!("{}\t{}\t{s:.6}", rank + 1, vocab.word(j));
    }
    Ok(())
}

fn export(a: ExportArgs) -> Result<()> {
    let side = match a.which {
        SideArg::U => Side::U,
        SideArg::V => Side::V,
    };
    match load(&a.model)? {
        AnyModel::Bayesian(m) => export_word2vec_text(&m, side, &a.out)?,
        AnyModel::SkipGram(emb, vocab) => export_sgns_word2vec_text(&emb, &vocab, side, &a.out)?,
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let config = SyntheticConfig {
        supergroups: a.supergroups,
        groups_per_super: a.groups_per_super,
        words_per_group: a.words_per_group,
        tokens: a.tokens,
        seed: a.seed,
        ..SyntheticConfig::default()
    };
    let s = synthetic::generate(&config)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;

    let mut corpus = String::new();
    for sentence in &s.corpus.sentences {
        corpus.push_str(&sentence.join(" "));
        corpus.push('\n');
    }
    let mut taxonomy = String::new();
    for (child, parent) in &s.edges {
        let _ = writeln!(taxonomy, "{child}\t{parent}");
    }
    let mut gold = String::new();
    for (w1, w2, score) in &s.gold.pairs {
        let _ = writeln!(gold, "{w1}\t{w2}\t{score}");
    }
    write_atomic(a.out_dir.join("corpus.txt"), corpus.as_bytes())?;
    write_atomic(a.out_dir.join("taxonomy.tsv"), taxonomy.as_bytes())?;
    write_atomic(a.out_dir.join("gold.tsv"), gold.as_bytes())?;
    eprintln!(
        "{} sentences, {} edges, {} gold pairs in {}",
        s.corpus.sentences.len(),
        s.edges.len(),
        s.gold.pairs.len(),
        a.out_dir.display()
    );
    Ok(())
}
