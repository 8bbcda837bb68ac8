//! Word-similarity benchmarks: loading, Spearman correlation and reports.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Tab,
    Comma,
    /// Any run of whitespace, tabs included.
    Whitespace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Header {
    Skip,
    None,
    /// Skip the first line only if its score column is not a number.
    Auto,
}

/// Where the two words and the gold score sit in each line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetFormat {
    pub delimiter: Delimiter,
    pub header: Header,
    pub word1: usize,
    pub word2: usize,
    pub score: usize,
}

impl Default for DatasetFormat {
    fn default() -> Self {
        DatasetFormat {
            delimiter: Delimiter::Whitespace,
            header: Header::Auto,
            word1: 0,
            word2: 1,
            score: 2,
        }
    }
}

impl DatasetFormat {
    pub fn new(delimiter: Delimiter, header: Header) -> Self {
        DatasetFormat {
            delimiter,
            header,
            ..Default::default()
        }
    }

    /// Layouts of the published benchmark files:
    ///
    /// | preset   | file                         | columns (0-based)             |
    /// |----------|------------------------------|-------------------------------|
    /// | `ws`     | WordSim-353 `combined.csv`   | word1, word2, mean (header)   |
    /// | `rw`     | Rare Words `rw.txt`          | word1, word2, mean            |
    /// | `men`    | `MEN_dataset_natural_form_full` | word1, word2, score        |
    /// | `simlex` | `SimLex-999.txt`             | word1, word2, POS, score (header) |
    /// | `scws`   | SCWS `ratings.txt`           | id, word1, POS, word2, POS, ctx1, ctx2, mean |
    pub fn preset(name: &str) -> Option<Self> {
        let d = |delimiter, header, word1, word2, score| DatasetFormat {
            delimiter,
            header,
            word1,
            word2,
            score,
        };
        Some(match name.to_ascii_lowercase().as_str() {
            "generic" => Self::default(),
            "ws" | "wordsim" | "ws353" => d(Delimiter::Comma, Header::Auto, 0, 1, 2),
            "rw" => d(Delimiter::Whitespace, Header::None, 0, 1, 2),
            "men" => d(Delimiter::Whitespace, Header::None, 0, 1, 2),
            "sl" | "simlex" | "simlex999" => d(Delimiter::Tab, Header::Skip, 0, 1, 3),
            "scws" => d(Delimiter::Tab, Header::None, 1, 3, 7),
            _ => return None,
        })
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self.delimiter {
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    pub name: String,
    pub pairs: Vec<(String, String, f64)>,
    pub path: PathBuf,
}

impl SimilarityDataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn load_similarity_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<SimilarityDataset> {
    let path = path.as_ref();
    parse_similarity_dataset(&fs::read_to_string(path)?, path, format)
}

pub fn parse_similarity_dataset(text: &str, path: &Path, format: DatasetFormat) -> Result<SimilarityDataset> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut pairs = Vec::new();
    let mut first = true;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let is_first = std::mem::replace(&mut first, false);
        let fields = format.split(line);
        let need = format.word1.max(format.word2).max(format.score) + 1;
        let score = fields.get(format.score).map(|s| s.parse::<f64>());
        if is_first {
            match format.header {
                Header::Skip => continue,
                Header::Auto if !matches!(score, Some(Ok(_))) => continue,
                _ => {}
            }
        }
        if fields.len() < need {
            return Err(err(n + 1, format!("expected at least {need} fields, found {}", fields.len())));
        }
        let score = match score {
            Some(Ok(s)) if s.is_finite() => s,
            _ => return Err(err(n + 1, format!("bad score `{}`", fields[format.score]))),
        };
        let (w1, w2) = (fields[format.word1], fields[format.word2]);
        if w1.is_empty() || w2.is_empty() {
            return Err(err(n + 1, "empty word".into()));
        }
        pairs.push((w1.to_owned(), w2.to_owned(), score));
    }
    if pairs.is_empty() {
        return Err(err(0, "no word pairs found".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Ok(SimilarityDataset {
        name,
        pairs,
        path: path.to_owned(),
    })
}

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &o in &order[start..end] {
            ranks[o] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a ranking has zero variance"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's ρ × 100.
pub fn spearman(gold: &[f64], predicted: &[f64]) -> Result<f64> {
    if gold.len() != predicted.len() {
        return Err(Error::UndefinedCorrelation("inputs have different lengths"));
    }
    if gold.len() < 2 {
        return Err(Error::UndefinedCorrelation("need at least two pairs"));
    }
    Ok(100.0 * pearson(&average_ranks(gold), &average_ranks(predicted))?)
}

/// Resolves benchmark words against the vocabulary: exact first, then
/// case-insensitively (the most frequent casing wins).
pub struct WordMatcher<'a> {
    vocab: &'a Vocabulary,
    folded: HashMap<String, usize>,
}

impl<'a> WordMatcher<'a> {
    pub fn new(vocab: &'a Vocabulary) -> Self {
        let mut folded = HashMap::new();
        for (i, w) in vocab.words().iter().enumerate() {
            folded.entry(w.to_lowercase()).or_insert(i);
        }
        WordMatcher { vocab, folded }
    }

    pub fn lookup(&self, word: &str) -> Option<usize> {
        self.vocab
            .index_of(word)
            .or_else(|| self.folded.get(&word.to_lowercase()).copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RareMode {
    /// At least one of the two words is rare.
    #[default]
    Any,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RareSlice {
    /// Largest corpus count that still counts as rare.
    pub max_count: u64,
    pub mode: RareMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slice {
    All,
    Rare(RareSlice),
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slice::All => f.write_str("all"),
            Slice::Rare(r) => write!(f, "rare<={}", r.max_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub dataset: String,
    pub slice: Slice,
    /// `None` when fewer than two pairs survive or a ranking is constant.
    pub rho_x100: Option<f64>,
    pub evaluated: usize,
    /// Pairs with an out-of-vocabulary word.
    pub skipped_oov: usize,
    /// In-vocabulary pairs outside the rare slice.
    pub filtered: usize,
}

impl EvalRow {
    pub fn skipped(&self) -> usize {
        self.skipped_oov + self.filtered
    }
}

pub fn evaluate(
    scorer: impl Fn(usize, usize) -> f64,
    dataset: &SimilarityDataset,
    vocab: &Vocabulary,
    rare: Option<RareSlice>,
) -> EvalRow {
    let matcher = WordMatcher::new(vocab);
    let mut gold = Vec::new();
    let mut predicted = Vec::new();
    let (mut oov, mut filtered) = (0, 0);
    for (w1, w2, score) in &dataset.pairs {
        let (Some(a), Some(b)) = (matcher.lookup(w1), matcher.lookup(w2)) else {
            oov += 1;
            continue;
        };
        if let Some(r) = rare {
            let ra = vocab.count(a) <= r.max_count;
            let rb = vocab.count(b) <= r.max_count;
            let keep = match r.mode {
                RareMode::Any => ra || rb,
                RareMode::Both => ra && rb,
            };
            if !keep {
                filtered += 1;
                continue;
            }
        }
        gold.push(*score);
        predicted.push(scorer(a, b));
    }
    EvalRow {
        dataset: dataset.name.clone(),
        slice: rare.map_or(Slice::All, Slice::Rare),
        rho_x100: spearman(&gold, &predicted).ok(),
        evaluated: gold.len(),
        skipped_oov: oov,
        filtered,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    /// Unweighted mean of the defined cells of one slice.
    pub fn average(&self, slice: Slice) -> Option<f64> {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.slice == slice)
            .filter_map(|r| r.rho_x100)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    fn slices(&self) -> Vec<Slice> {
        let mut out: Vec<Slice> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.slice) {
                out.push(r.slice);
            }
        }
        out
    }

    /// `dataset,slice,rho_x100,evaluated,skipped`, plus one `AVG` line per
    /// slice. Undefined cells are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,slice,rho_x100,evaluated,skipped\n");
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.dataset, r.slice, cell(r.rho_x100), r.evaluated, r.skipped());
        }
        for s in self.slices() {
            let (ev, sk) = self
                .rows
                .iter()
                .filter(|r| r.slice == s)
                .fold((0, 0), |(e, k), r| (e + r.evaluated, k + r.skipped()));
            let _ = writeln!(out, "AVG,{s},{},{ev},{sk}", cell(self.average(s)));
        }
        out
    }

    /// One row per slice, one column per dataset, then AVG.
    pub fn to_table(&self) -> String {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.dataset.as_str()) {
                names.push(&r.dataset);
            }
        }
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(7);
        let mut out = format!("{:<10}", "slice");
        for n in &names {
            let _ = write!(out, " {n:>width$}");
        }
        let _ = writeln!(out, " {:>width$}", "AVG");
        let fmt_cell = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or_else(|| "n/a".into());
        for s in self.slices() {
            let _ = write!(out, "{:<10}", s.to_string());
            for n in &names {
                let v = self.rows.iter().find(|r| r.slice == s && r.dataset == *n).and_then(|r| r.rho_x100);
                let _ = write!(out, " {:>width$}", fmt_cell(v));
            }
            let _ = writeln!(out, " {:>width$}", fmt_cell(self.average(s)));
        }
        let _ = writeln!(out);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} [{}]: evaluated {}, skipped {} ({} out of vocabulary)",
                r.dataset,
                r.slice,
                r.evaluated,
                r.skipped(),
                r.skipped_oov
            );
        }
        out
    }
}
