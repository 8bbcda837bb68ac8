//! Binary model files, the pair cache, and word2vec text export.
//!
//! All binary formats are little-endian. Each starts with an ASCII magic and
//! a `u32` version; strings are a `u32` byte length followed by UTF-8.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::corpus::{PairDataset, PairRecord, SamplerConfig, Vocabulary};
use crate::error::{Error, Result};
use crate::sgns::{PointEmbeddings, SgnsConfig};
use crate::taxonomy::Taxonomy;
use crate::vb::{Covariance, Family, GaussianFactor, Hyperparams, ModelState, XiMode};

pub const MODEL_MAGIC: &[u8] = b"BHWR1";
pub const MODEL_VERSION: u32 = 1;
pub const PAIRS_MAGIC: &[u8] = b"BHWRPD1";
pub const PAIRS_VERSION: u32 = 1;
pub const SG_MAGIC: &[u8] = b"BHWRSG1";
pub const SG_VERSION: u32 = 1;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("`{}` is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u32(&mut self, x: u32) {
        self.bytes(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.bytes(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.bytes(&x.to_le_bytes());
    }
    fn f64s(&mut self, xs: &[f64]) {
        for &x in xs {
            self.f64(x);
        }
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.bytes(s.as_bytes());
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::Truncated(what));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn f64(&mut self, what: &'static str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize, what: &'static str) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or(Error::Truncated(what))?, what)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
    fn len(&mut self, what: &'static str) -> Result<usize> {
        let n = self.u64(what)?;
        // Every counted item takes at least one byte, so larger values can
        // only come from a corrupt header.
        if n > (self.data.len() - self.pos) as u64 {
            return Err(Error::Truncated(what));
        }
        Ok(n as usize)
    }
    fn str(&mut self, what: &'static str) -> Result<String> {
        let n = self.u32(what)? as usize;
        String::from_utf8(self.take(n, what)?.to_vec()).map_err(|_| Error::Format(format!("{what} is not UTF-8")))
    }

    fn header(&mut self, magic: &[u8], version: u32, what: &'static str) -> Result<()> {
        if self.data.len() < magic.len() || &self.data[..magic.len()] != magic {
            return Err(Error::BadMagic(what));
        }
        self.pos = magic.len();
        let found = self.u32("format version")?;
        if found != version {
            return Err(Error::UnsupportedVersion { what, found, supported: version });
        }
        Ok(())
    }

    fn finish(&self, what: &'static str) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format(format!("{} trailing bytes after {what}", self.data.len() - self.pos)));
        }
        Ok(())
    }
}

fn write_vocab(w: &mut Writer, vocab: &Vocabulary) {
    w.u64(vocab.len() as u64);
    w.u64(vocab.total_tokens());
    w.u64(vocab.dropped_tokens());
    for (word, &count) in vocab.words().iter().zip(vocab.counts()) {
        w.str(word);
        w.u64(count);
    }
}

fn read_vocab(r: &mut Reader) -> Result<Vocabulary> {
    let n = r.len("vocabulary size")?;
    let total = r.u64("vocabulary totals")?;
    let dropped = r.u64("vocabulary totals")?;
    let mut words = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    for _ in 0..n {
        words.push(r.str("vocabulary word")?);
        counts.push(r.u64("vocabulary count")?);
    }
    Vocabulary::from_parts(words, counts, total, dropped)
}

/// Everything besides the factors that a trained model carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainMetadata {
    pub xi_mode: XiMode,
    /// `None` for a model that was never trained.
    pub final_elbo: Option<f64>,
}

impl Default for TrainMetadata {
    fn default() -> Self {
        TrainMetadata {
            xi_mode: XiMode::default(),
            final_elbo: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub state: ModelState,
    pub vocab: Vocabulary,
    pub taxonomy: Taxonomy,
    pub meta: TrainMetadata,
}

impl ModelFile {
    /// Layout after the header: `k: u64`, vocabulary, taxonomy edges
    /// (`u64` count, then `(child: u32, parent: u32)`), the four τ, xi mode
    /// (`u8`), seed, sweeps, final ELBO (NaN when absent), then every U and V
    /// factor (mean, row-major covariance) and every Hu and Hv factor (mean,
    /// precision).
    pub fn encode(&self) -> Result<Vec<u8>> {
        let s = &self.state;
        s.validate()?;
        if self.vocab.len() != s.len() || self.taxonomy.len() != s.len() {
            return Err(Error::InvalidConfig("model, vocabulary and taxonomy sizes differ".into()));
        }
        let mut w = Writer::default();
        w.bytes(MODEL_MAGIC);
        w.u32(MODEL_VERSION);
        w.u64(s.k as u64);
        write_vocab(&mut w, &self.vocab);
        w.u64(self.taxonomy.edge_count() as u64);
        for (c, p) in self.taxonomy.edges() {
            w.u32(c as u32);
            w.u32(p as u32);
        }
        let h = s.hyper;
        w.f64s(&[h.tau_u, h.tau_v, h.tau_hu, h.tau_hv]);
        w.u8(match self.meta.xi_mode {
            XiMode::Paper => 0,
            XiMode::Exact => 1,
        });
        w.u64(s.seed);
        w.u64(s.sweeps as u64);
        w.f64(self.meta.final_elbo.unwrap_or(f64::NAN));
        for f in Family::ALL {
            for q in s.family(f) {
                w.f64s(q.mean.as_slice());
                match &q.cov {
                    // Symmetric, so column-major storage is also row-major.
                    Covariance::Full(c) => w.f64s(c.transpose().as_slice()),
                    Covariance::Isotropic { precision } => w.f64(*precision),
                }
            }
        }
        Ok(w.buf)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.header(MODEL_MAGIC, MODEL_VERSION, "BHWR model")?;
        let k = r.u64("embedding dimension")? as usize;
        if k == 0 {
            return Err(Error::Format("embedding dimension is zero".into()));
        }
        let vocab = read_vocab(&mut r)?;
        let n = vocab.len();
        let n_edges = r.len("taxonomy")?;
        let mut edges = Vec::with_capacity(n_edges);
        for _ in 0..n_edges {
            edges.push((r.u32("taxonomy edge")? as usize, r.u32("taxonomy edge")? as usize));
        }
        let taxonomy = Taxonomy::from_index_edges(n, edges, |i| vocab.words().get(i).cloned().unwrap_or_default())?;
        let t = r.f64s(4, "hyperparameters")?;
        let hyper = Hyperparams { tau_u: t[0], tau_v: t[1], tau_hu: t[2], tau_hv: t[3] };
        hyper.validate()?;
        let xi_mode = match r.u8("xi mode")? {
            0 => XiMode::Paper,
            1 => XiMode::Exact,
            b => return Err(Error::Format(format!("unknown xi mode tag {b}"))),
        };
        let seed = r.u64("training metadata")?;
        let sweeps = r.u64("training metadata")? as usize;
        let elbo = r.f64("training metadata")?;
        let mut families: Vec<Vec<GaussianFactor>> = Vec::with_capacity(4);
        for f in Family::ALL {
            let mut fam = Vec::with_capacity(n);
            for i in 0..n {
                let mean = DVector::from_vec(r.f64s(k, "factor mean")?);
                let q = if f.is_leaf() {
                    let cov = DMatrix::from_row_slice(k, k, &r.f64s(k * k, "factor covariance")?);
                    let spd = cov.iter().all(|x| x.is_finite())
                        && cov == cov.transpose()
                        && cov.clone().cholesky().is_some();
                    if !spd {
                        return Err(Error::NotPositiveDefinite(format!("stored covariance of {}[{i}]", f.name())));
                    }
                    GaussianFactor::full(mean, cov)
                } else {
                    let precision = r.f64("factor precision")?;
                    if !(precision > 0.0 && precision.is_finite()) {
                        return Err(Error::NotPositiveDefinite(format!("stored precision of {}[{i}]", f.name())));
                    }
                    GaussianFactor::isotropic(mean, precision)
                };
                fam.push(q);
            }
            families.push(fam);
        }
        r.finish("model")?;
        let hv = families.pop().unwrap();
        let hu = families.pop().unwrap();
        let v = families.pop().unwrap();
        let u = families.pop().unwrap();
        Ok(ModelFile {
            state: ModelState { k, hyper, u, v, hu, hv, sweeps, seed },
            vocab,
            taxonomy,
            meta: TrainMetadata {
                xi_mode,
                final_elbo: (!elbo.is_nan()).then_some(elbo),
            },
        })
    }
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &model.encode()?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    ModelFile::decode(&fs::read(path)?)
}

/// Pair cache. After the header come the `u64` counts (records, |I_P|,
/// |I_N|, skipped tokens), the sampler settings, the sorted
/// `(i, j, n_pos, n_neg)` records as `u32`s, and the vocabulary the
/// indices refer to.
pub fn encode_pairs(pairs: &PairDataset, vocab: &Vocabulary) -> Result<Vec<u8>> {
    if pairs.index_bound() > vocab.len() {
        return Err(Error::InvalidConfig("pairs reference words outside the vocabulary".into()));
    }
    let mut w = Writer::default();
    w.bytes(PAIRS_MAGIC);
    w.u32(PAIRS_VERSION);
    w.u64(pairs.len() as u64);
    w.u64(pairs.total_pos());
    w.u64(pairs.total_neg());
    w.u64(pairs.skipped_tokens());
    let c = pairs.config();
    w.u64(c.c_max as u64);
    w.f64s(&[c.subsample_t, c.neg_ratio, c.unigram_power]);
    w.u64(c.min_count);
    w.u64(c.seed);
    for r in pairs.records() {
        w.u32(r.i);
        w.u32(r.j);
        w.u32(r.n_pos);
        w.u32(r.n_neg);
    }
    write_vocab(&mut w, vocab);
    Ok(w.buf)
}

pub fn decode_pairs(bytes: &[u8]) -> Result<(PairDataset, Vocabulary)> {
    let mut r = Reader::new(bytes);
    r.header(PAIRS_MAGIC, PAIRS_VERSION, "pair cache")?;
    let n = r.len("record count")?;
    let total_pos = r.u64("pair totals")?;
    let total_neg = r.u64("pair totals")?;
    let skipped = r.u64("pair totals")?;
    let c_max = r.u64("sampler settings")? as usize;
    let f = r.f64s(3, "sampler settings")?;
    let config = SamplerConfig {
        c_max,
        subsample_t: f[0],
        neg_ratio: f[1],
        unigram_power: f[2],
        min_count: r.u64("sampler settings")?,
        seed: r.u64("sampler settings")?,
    };
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        records.push(PairRecord {
            i: r.u32("pair record")?,
            j: r.u32("pair record")?,
            n_pos: r.u32("pair record")?,
            n_neg: r.u32("pair record")?,
        });
    }
    if records.windows(2).any(|w| (w[0].i, w[0].j) >= (w[1].i, w[1].j)) {
        return Err(Error::Format("pair records are not strictly sorted by (i, j)".into()));
    }
    let vocab = read_vocab(&mut r)?;
    r.finish("pair cache")?;
    let pairs = PairDataset::from_records(records, config, skipped);
    if pairs.len() != n || pairs.total_pos() != total_pos || pairs.total_neg() != total_neg {
        return Err(Error::Format("pair cache header disagrees with its records".into()));
    }
    if pairs.index_bound() > vocab.len() {
        return Err(Error::Format("pair records reference words outside the stored vocabulary".into()));
    }
    Ok((pairs, vocab))
}

pub fn save_pairs(pairs: &PairDataset, vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &encode_pairs(pairs, vocab)?)
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<(PairDataset, Vocabulary)> {
    decode_pairs(&fs::read(path)?)
}

/// Skip-gram model: header, `k: u64`, epochs `u64`, learning rate, seed,
/// vocabulary, then the `u` and `v` rows.
pub fn encode_sgns(emb: &PointEmbeddings, vocab: &Vocabulary) -> Result<Vec<u8>> {
    if emb.len() != vocab.len() || emb.u.len() != emb.v.len() || emb.k != emb.config.k {
        return Err(Error::InvalidConfig("embedding and vocabulary sizes differ".into()));
    }
    let mut w = Writer::default();
    w.bytes(SG_MAGIC);
    w.u32(SG_VERSION);
    w.u64(emb.k as u64);
    w.u64(emb.config.epochs as u64);
    w.f64(emb.config.learning_rate);
    w.u64(emb.config.seed);
    write_vocab(&mut w, vocab);
    w.f64s(&emb.u);
    w.f64s(&emb.v);
    Ok(w.buf)
}

pub fn decode_sgns(bytes: &[u8]) -> Result<(PointEmbeddings, Vocabulary)> {
    let mut r = Reader::new(bytes);
    r.header(SG_MAGIC, SG_VERSION, "skip-gram model")?;
    let k = r.u64("embedding dimension")? as usize;
    if k == 0 {
        return Err(Error::Format("embedding dimension is zero".into()));
    }
    let epochs = r.u64("training settings")? as usize;
    let learning_rate = r.f64("training settings")?;
    let seed = r.u64("training settings")?;
    let vocab = read_vocab(&mut r)?;
    let u = r.f64s(vocab.len() * k, "context vectors")?;
    let v = r.f64s(vocab.len() * k, "target vectors")?;
    r.finish("skip-gram model")?;
    let config = SgnsConfig { k, epochs, learning_rate, seed };
    Ok((PointEmbeddings { k, u, v, config }, vocab))
}

pub fn save_sgns(emb: &PointEmbeddings, vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &encode_sgns(emb, vocab)?)
}

pub fn load_sgns(path: impl AsRef<Path>) -> Result<(PointEmbeddings, Vocabulary)> {
    decode_sgns(&fs::read(path)?)
}

/// Either kind of model file, told apart by magic.
pub enum AnyModel {
    Bayesian(Box<ModelFile>),
    SkipGram(PointEmbeddings, Vocabulary),
}

pub fn load_any_model(path: impl AsRef<Path>) -> Result<AnyModel> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(SG_MAGIC) {
        let (emb, vocab) = decode_sgns(&bytes)?;
        Ok(AnyModel::SkipGram(emb, vocab))
    } else {
        Ok(AnyModel::Bayesian(Box::new(ModelFile::decode(&bytes)?)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u" => Ok(Side::U),
            "v" => Ok(Side::V),
            _ => Err(Error::InvalidConfig(format!("expected `u` or `v`, got `{s}`"))),
        }
    }
}

/// `N k` header, then one word and its `k` coordinates per line, each
/// coordinate with 9 significant digits.
pub fn word2vec_text<'a>(vocab: &Vocabulary, k: usize, row: impl Fn(usize) -> &'a [f64]) -> String {
    let mut out = format!("{} {k}\n", vocab.len());
    for (i, w) in vocab.words().iter().enumerate() {
        out.push_str(w);
        for x in row(i) {
            let _ = write!(out, " {x:.8e}");
        }
        out.push('\n');
    }
    out
}

/// Posterior means of U or V.
pub fn export_word2vec_text(model: &ModelFile, which: Side, path: impl AsRef<Path>) -> Result<()> {
    let fam = match which {
        Side::U => &model.state.u,
        Side::V => &model.state.v,
    };
    write_atomic(path, word2vec_text(&model.vocab, model.state.k, |i| fam[i].mean.as_slice()).as_bytes())
}

pub fn export_sgns_word2vec_text(
    emb: &PointEmbeddings,
    vocab: &Vocabulary,
    which: Side,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = word2vec_text(vocab, emb.k, |i| match which {
        Side::U => emb.u_row(i),
        Side::V => emb.v_row(i),
    });
    write_atomic(path, text.as_bytes())
}

/// Reads word2vec text back into `(words, row-major vectors, k)`.
pub fn parse_word2vec_text(text: &str, path: &Path) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let err = |line: usize, message: &str| Error::Parse {
        path: path.to_owned(),
        line,
        message: message.to_owned(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| err(1, "header must be `N k`")))
        .collect::<Result<_>>()?;
    let [n, k] = dims[..] else {
        return Err(err(1, "header must be `N k`"));
    };
    let mut words = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * k);
    for (l, line) in lines.enumerate() {
        let mut fields = line.split(' ');
        let word = fields.next().filter(|w| !w.is_empty()).ok_or_else(|| err(l + 2, "missing word"))?;
        let before = data.len();
        for f in fields {
            data.push(f.parse::<f64>().map_err(|_| err(l + 2, "bad coordinate"))?);
        }
        if data.len() - before != k {
            return Err(err(l + 2, "wrong number of coordinates"));
        }
        words.push(word.to_owned());
    }
    if words.len() != n {
        return Err(err(n + 1, "header word count does not match the file"));
    }
    Ok((words, data, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vb::{init_state, TrainConfig};

    fn toy_model() -> ModelFile {
        let vocab = Vocabulary::from_parts(vec!["a".into(), "b".into(), "c".into()], vec![5, 2, 0], 7, 0).unwrap();
        let taxonomy = Taxonomy::from_index_edges(3, [(0, 2), (1, 2)], |i| i.to_string()).unwrap();
        let cfg = TrainConfig { k: 2, seed: 11, ..TrainConfig::default() };
        ModelFile {
            state: init_state(3, &cfg, Hyperparams::default()),
            vocab,
            taxonomy,
            meta: TrainMetadata::default(),
        }
    }

    #[test]
    fn model_round_trip_is_exact() {
        let m = toy_model();
        let bytes = m.encode().unwrap();
        let back = ModelFile::decode(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.encode().unwrap(), bytes);
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = toy_model().encode().unwrap();
        let mut wrong = bytes.clone();
        wrong[..4].copy_from_slice(b"XXXX");
        assert!(matches!(ModelFile::decode(&wrong), Err(Error::BadMagic(_))));
        bytes[5] = 9;
        assert!(matches!(ModelFile::decode(&bytes), Err(Error::UnsupportedVersion { found: 9, .. })));
    }

    #[test]
    fn every_truncation_is_an_error() {
        let bytes = toy_model().encode().unwrap();
        for cut in 0..bytes.len() {
            assert!(ModelFile::decode(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        assert!(matches!(ModelFile::decode(&bytes[..bytes.len() - 1]), Err(Error::Truncated(_))));
    }

    #[test]
    fn non_spd_covariance_rejected() {
        let mut m = toy_model();
        m.state.u[1] = GaussianFactor::full(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        let bytes = m.encode().unwrap();
        assert!(matches!(ModelFile::decode(&bytes), Err(Error::NotPositiveDefinite(w)) if w.contains("U[1]")));
    }

    #[test]
    fn pairs_round_trip() {
        let m = toy_model();
        let pairs = PairDataset::from_records(
            [PairRecord { i: 1, j: 0, n_pos: 2, n_neg: 1 }, PairRecord { i: 0, j: 2, n_pos: 0, n_neg: 3 }],
            SamplerConfig { seed: 4, ..SamplerConfig::default() },
            6,
        );
        let bytes = encode_pairs(&pairs, &m.vocab).unwrap();
        assert!(bytes.starts_with(b"BHWRPD1"));
        let (p2, v2) = decode_pairs(&bytes).unwrap();
        assert_eq!(p2, pairs);
        assert_eq!(v2, m.vocab);
        assert_eq!(encode_pairs(&p2, &v2).unwrap(), bytes);
        assert!(decode_pairs(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn sgns_round_trip() {
        let m = toy_model();
        let emb = PointEmbeddings::init(3, SgnsConfig { k: 4, ..SgnsConfig::default() });
        let bytes = encode_sgns(&emb, &m.vocab).unwrap();
        let (e2, v2) = decode_sgns(&bytes).unwrap();
        assert_eq!(e2, emb);
        assert_eq!(v2, m.vocab);
    }

    #[test]
    fn word2vec_text_round_trip() {
        let m = toy_model();
        let text = word2vec_text(&m.vocab, 2, |i| m.state.u[i].mean.as_slice());
        assert!(text.starts_with("3 2\n"));
        assert_eq!(text.lines().count(), 4);
        let (words, data, k) = parse_word2vec_text(&text, Path::new("x")).unwrap();
        assert_eq!((words.as_slice(), k), (m.vocab.words(), 2));
        for i in 0..3 {
            for d in 0..2 {
                let x = m.state.u[i].mean[d];
                assert!((data[i * 2 + d] - x).abs() <= 1e-8 * x.abs());
            }
        }
    }
}
