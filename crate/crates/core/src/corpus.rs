//! Corpus ingestion: vocabulary, subsampling, the unigram noise table and
//! the aggregated (center, context) pair dataset.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::{seeded_rng, Rng};

/// Whitespace-tokenized text, one sentence per line. Context windows never
/// cross a sentence boundary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Vec<String>>,
}

impl Corpus {
    pub fn parse(text: &str) -> Self {
        let sentences = text
            .lines()
            .map(|line| line.split_whitespace().map(str::to_owned).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        Corpus { sentences }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    /// A corpus made of a single sentence.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let sentence: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        let sentences = if sentence.is_empty() { vec![] } else { vec![sentence] };
        Corpus { sentences }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// Dense word indices assigned by descending count, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    total_tokens: u64,
    dropped_tokens: u64,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from stored parts, e.g. when loading a file.
    pub fn from_parts(
        words: Vec<String>,
        counts: Vec<u64>,
        total_tokens: u64,
        dropped_tokens: u64,
    ) -> Result<Self> {
        if words.len() != counts.len() {
            return Err(Error::Format(format!(
                "{} words but {} counts",
                words.len(),
                counts.len()
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary word `{w}`")));
            }
        }
        Ok(Vocabulary {
            words,
            counts,
            index,
            total_tokens,
            dropped_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Every token seen while building, including those of dropped words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Tokens whose word fell below `min_count`.
    pub fn dropped_tokens(&self) -> u64 {
        self.dropped_tokens
    }

    /// Tokens of retained words.
    pub fn retained_tokens(&self) -> u64 {
        self.total_tokens - self.dropped_tokens
    }

    /// Appends a word that never occurred in the corpus (count 0) and returns
    /// its index. Returns the existing index if the word is already present.
    pub fn push_unseen(&mut self, word: &str) -> usize {
        if let Some(i) = self.index_of(word) {
            return i;
        }
        let i = self.words.len();
        self.words.push(word.to_owned());
        self.counts.push(0);
        self.index.insert(word.to_owned(), i);
        i
    }
}

pub fn build_vocabulary<I, S>(tokens: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if min_count == 0 {
        return Err(Error::InvalidConfig("min_count must be at least 1".into()));
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for t in tokens {
        total += 1;
        match counts.get_mut(t.as_ref()) {
            Some(c) => *c += 1,
            None => {
                counts.insert(t.as_ref().to_owned(), 1);
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let dropped: u64 = entries.iter().filter(|e| e.1 < min_count).map(|e| e.1).sum();
    entries.retain(|e| e.1 >= min_count);
    let (words, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
    Vocabulary::from_parts(words, counts, total, dropped)
}

/// Probability of keeping a token whose word has relative frequency `f`
/// under subsampling threshold `t`. A threshold of zero disables subsampling.
pub fn keep_probability(f: f64, t: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::Invariant(format!(
            "relative frequency {f} outside (0, 1]"
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidConfig(format!("subsample threshold {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok((t / f).sqrt().min(1.0))
}

/// Unigram counts raised to a power and normalized; the noise distribution
/// for negative sampling.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl NegativeTable {
    pub fn new(vocab: &Vocabulary, power: f64) -> Result<Self> {
        if vocab.is_empty() {
            return Err(Error::InvalidConfig("empty vocabulary".into()));
        }
        if !(power > 0.0 && power <= 1.0) {
            return Err(Error::InvalidConfig(format!("unigram power {power}")));
        }
        let weights: Vec<f64> = vocab.counts().iter().map(|&c| (c as f64).powf(power)).collect();
        let z: f64 = weights.iter().sum();
        if z <= 0.0 {
            return Err(Error::InvalidConfig(
                "no word with a positive count to sample negatives from".into(),
            ));
        }
        let sampler = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidConfig(format!("negative table: {e}")))?;
        Ok(NegativeTable {
            probs: weights.iter().map(|w| w / z).collect(),
            sampler,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        self.sampler.sample(rng)
    }
}

pub fn negative_distribution(vocab: &Vocabulary, power: f64) -> Result<Vec<f64>> {
    Ok(NegativeTable::new(vocab, power)?.probs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Largest half-width of the random context window.
    pub c_max: usize,
    pub subsample_t: f64,
    /// Negatives drawn per positive.
    pub neg_ratio: f64,
    pub unigram_power: f64,
    pub min_count: u64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            c_max: 5,
            subsample_t: 1e-4,
            neg_ratio: 1.0,
            unigram_power: 0.75,
            min_count: 1,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_max < 1 {
            return Err(Error::InvalidConfig("c_max must be at least 1".into()));
        }
        if !(self.unigram_power > 0.0 && self.unigram_power <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "unigram_power {} outside (0, 1]",
                self.unigram_power
            )));
        }
        if !(self.subsample_t >= 0.0 && self.subsample_t.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "subsample_t {} must be non-negative",
                self.subsample_t
            )));
        }
        if !(self.neg_ratio >= 0.0 && self.neg_ratio.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "neg_ratio {} must be non-negative",
                self.neg_ratio
            )));
        }
        if self.min_count < 1 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// One aggregated (center, context) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairRecord {
    pub i: u32,
    pub j: u32,
    pub n_pos: u32,
    pub n_neg: u32,
}

/// The positive and negative pair multisets, aggregated into counts and
/// sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    records: Vec<PairRecord>,
    total_pos: u64,
    total_neg: u64,
    config: SamplerConfig,
    skipped_tokens: u64,
}

impl PairDataset {
    pub fn empty(config: SamplerConfig) -> Self {
        PairDataset {
            records: Vec::new(),
            total_pos: 0,
            total_neg: 0,
            config,
            skipped_tokens: 0,
        }
    }

    /// Builds a dataset from already-aggregated records. Records are sorted
    /// and duplicates merged; empty cells are dropped.
    pub fn from_records(
        records: impl IntoIterator<Item = PairRecord>,
        config: SamplerConfig,
        skipped_tokens: u64,
    ) -> Self {
        let mut cells: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
        for r in records {
            let e = cells.entry((r.i, r.j)).or_default();
            e.0 += r.n_pos;
            e.1 += r.n_neg;
        }
        Self::from_cells(cells, config, skipped_tokens)
    }

    fn from_cells(
        cells: HashMap<(u32, u32), (u32, u32)>,
        config: SamplerConfig,
        skipped_tokens: u64,
    ) -> Self {
        let mut records: Vec<PairRecord> = cells
            .into_iter()
            .filter(|(_, (p, n))| *p > 0 || *n > 0)
            .map(|((i, j), (n_pos, n_neg))| PairRecord { i, j, n_pos, n_neg })
            .collect();
        records.sort_unstable();
        let total_pos = records.iter().map(|r| r.n_pos as u64).sum();
        let total_neg = records.iter().map(|r| r.n_neg as u64).sum();
        PairDataset {
            records,
            total_pos,
            total_neg,
            config,
            skipped_tokens,
        }
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// |I_P|
    pub fn total_pos(&self) -> u64 {
        self.total_pos
    }

    /// |I_N|
    pub fn total_neg(&self) -> u64 {
        self.total_neg
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// Tokens that were not in the vocabulary and therefore ignored.
    pub fn skipped_tokens(&self) -> u64 {
        self.skipped_tokens
    }

    /// Largest word index referenced, plus one.
    pub fn index_bound(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.i.max(r.j) as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Redraws every negative, keeping positives. Each center receives as
    /// many negatives as construction would have given it.
    pub fn resample_negatives(&mut self, table: &NegativeTable, seed: u64) {
        let mut rng = seeded_rng(seed);
        let mut pos_per_center: Vec<(u32, u64)> = Vec::new();
        for r in &self.records {
            match pos_per_center.last_mut() {
                Some((i, n)) if *i == r.i => *n += r.n_pos as u64,
                _ => pos_per_center.push((r.i, r.n_pos as u64)),
            }
        }
        let mut cells: HashMap<(u32, u32), (u32, u32)> = self
            .records
            .iter()
            .filter(|r| r.n_pos > 0)
            .map(|r| ((r.i, r.j), (r.n_pos, 0)))
            .collect();
        for (i, n_pos) in pos_per_center {
            let draws = negatives_for(n_pos, self.config.neg_ratio, &mut rng);
            for _ in 0..draws {
                let j = table.sample(&mut rng) as u32;
                cells.entry((i, j)).or_default().1 += 1;
            }
        }
        *self = Self::from_cells(cells, self.config, self.skipped_tokens);
    }
}

/// Number of negatives for `n_pos` positives; fractional ratios are rounded
/// stochastically so the expectation is exact.
fn negatives_for(n_pos: u64, ratio: f64, rng: &mut Rng) -> u64 {
    let want = n_pos as f64 * ratio;
    let base = want.floor();
    let frac = want - base;
    let extra = if frac > 0.0 && rng.random::<f64>() < frac { 1 } else { 0 };
    base as u64 + extra
}

/// Subsamples, windows and negative-samples `corpus`. Deterministic given
/// `(corpus, vocab, config)`.
pub fn build_pair_dataset(
    corpus: &Corpus,
    vocab: &Vocabulary,
    config: &SamplerConfig,
) -> Result<PairDataset> {
    config.validate()?;
    if corpus.token_count() == 0 {
        return Ok(PairDataset::empty(*config));
    }
    let table = NegativeTable::new(vocab, config.unigram_power)?;
    let retained = vocab.retained_tokens() as f64;
    let keep: Vec<f64> = vocab
        .counts()
        .iter()
        .map(|&c| {
            if c == 0 {
                Ok(1.0)
            } else {
                keep_probability(c as f64 / retained, config.subsample_t)
            }
        })
        .collect::<Result<_>>()?;

    let mut rng = seeded_rng(config.seed);
    let mut cells: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    let mut skipped = 0u64;
    let mut ids: Vec<u32> = Vec::new();
    for sentence in &corpus.sentences {
        ids.clear();
        for token in sentence {
            let Some(i) = vocab.index_of(token) else {
                skipped += 1;
                continue;
            };
            let p = keep[i];
            if p >= 1.0 || rng.random::<f64>() < p {
                ids.push(i as u32);
            }
        }
        for (pos, &center) in ids.iter().enumerate() {
            let c = rng.random_range(1..=config.c_max);
            let lo = pos.saturating_sub(c);
            let hi = (pos + c).min(ids.len() - 1);
            let mut n_pos = 0u64;
            for (other, &ctx) in ids.iter().enumerate().take(hi + 1).skip(lo) {
                if other == pos {
                    continue;
                }
                cells.entry((center, ctx)).or_default().0 += 1;
                n_pos += 1;
            }
            for _ in 0..negatives_for(n_pos, config.neg_ratio, &mut rng) {
                let j = table.sample(&mut rng) as u32;
                cells.entry((center, j)).or_default().1 += 1;
            }
        }
    }
    Ok(PairDataset::from_cells(cells, *config, skipped))
}
