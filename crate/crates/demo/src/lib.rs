//! WebAssembly bindings behind `www/index.html`.
//!
//! Plot data crosses the boundary as flat `Float64Array`s; the page knows
//! the stride of each one.

use bhwr::corpus::{build_pair_dataset, build_vocabulary};
use bhwr::predictive::{dot_moments, nearest_neighbors, pair_similarity, predictive_prob, DotMoments};
use bhwr::synthetic::{self, SyntheticConfig};
use bhwr::taxonomy::load_taxonomy;
use bhwr::vb::{elbo, init_state, jj_bound, sweep, PairIndex};
use bhwr::{
    GaussianFactor, Hyperparams, ModelState, OovPolicy, PairDataset, SamplerConfig, Taxonomy, TrainConfig,
    Vocabulary,
};
use wasm_bindgen::prelude::*;

fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `n` rows of `[x, ln σ(x), bound(x; ξ)]` on an even grid.
#[wasm_bindgen]
pub fn bound_curve(xi: f64, x_min: f64, x_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let x = x_min + (x_max - x_min) * i as f64 / (n - 1) as f64;
        out.extend([x, log_sigmoid(x), jj_bound(x, xi)]);
    }
    out
}

/// `E[σ(x)]` for `x ~ N(mu, var)` by the trapezoid rule over ±10σ.
fn expected_sigmoid(mu: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return sigmoid(mu);
    }
    let sd = var.sqrt();
    let steps = 4000;
    let h = 20.0 * sd / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let x = mu - 10.0 * sd + i as f64 * h;
        let z = (x - mu) / sd;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += w * sigmoid(x) * (-0.5 * z * z).exp();
    }
    acc * h / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// `[closed form, numerical integral]` of the predictive for one (μ, σ²).
#[wasm_bindgen]
pub fn predictive_pair(mu: f64, var: f64) -> Vec<f64> {
    let m = DotMoments {
        mean: mu,
        variance: var.max(0.0),
    };
    vec![predictive_prob(m), expected_sigmoid(mu, var.max(0.0))]
}

/// `n` rows of `[σ², closed form, integral]` at fixed μ.
#[wasm_bindgen]
pub fn predictive_sweep(mu: f64, var_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let var = var_max * i as f64 / (n - 1) as f64;
        let p = predictive_pair(mu, var);
        out.extend([var, p[0], p[1]]);
    }
    out
}

/// A two-dimensional model trained one sweep at a time on a small planted
/// corpus.
#[wasm_bindgen]
pub struct Toy {
    vocab: Vocabulary,
    pairs: PairDataset,
    index: PairIndex,
    taxonomy: Taxonomy,
    state: ModelState,
    config: TrainConfig,
    trace: Vec<f64>,
}

#[wasm_bindgen]
impl Toy {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, use_taxonomy: bool, tokens: usize) -> Result<Toy, JsError> {
        let seed = u64::from(seed);
        let syn = synthetic::generate(&SyntheticConfig {
            supergroups: 2,
            groups_per_super: 2,
            words_per_group: 5,
            tokens: tokens.clamp(200, 50_000),
            seed,
            ..SyntheticConfig::default()
        })?;
        let sampler = SamplerConfig {
            c_max: 3,
            subsample_t: 0.0,
            seed,
            ..SamplerConfig::default()
        };
        let mut vocab = build_vocabulary(syn.corpus.tokens(), 1)?;
        let pairs = build_pair_dataset(&syn.corpus, &vocab, &sampler)?;
        let taxonomy = if use_taxonomy {
            load_taxonomy(&syn.edges, &mut vocab, OovPolicy::ExtendVocab)?
        } else {
            Taxonomy::empty(vocab.len())
        };
        let config = TrainConfig {
            k: 2,
            seed,
            ..TrainConfig::default()
        };
        let state = init_state(vocab.len(), &config, Hyperparams::default());
        let index = PairIndex::new(&pairs, vocab.len())?;
        let initial = elbo(&state, &pairs, &taxonomy, config.xi_mode)?;
        Ok(Toy {
            vocab,
            pairs,
            index,
            taxonomy,
            state,
            config,
            trace: vec![initial],
        })
    }

    /// Runs one sweep and returns the new bound.
    pub fn step(&mut self) -> Result<f64, JsError> {
        sweep(&mut self.state, &self.index, &self.taxonomy, &self.config)?;
        let e = elbo(&self.state, &self.pairs, &self.taxonomy, self.config.xi_mode)?;
        self.trace.push(e);
        Ok(e)
    }

    /// Bound before training, then after each sweep.
    pub fn trace(&self) -> Vec<f64> {
        self.trace.clone()
    }

    /// Newline-separated words, in vocabulary order.
    pub fn words(&self) -> String {
        self.vocab.words().join("\n")
    }

    /// Per word `[mean_x, mean_y, Σxx, Σxy, Σyy]` of the target factor, or of
    /// the target parent factor for words that only occur as parents.
    pub fn ellipses(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(5 * self.vocab.len());
        for i in 0..self.vocab.len() {
            let q: &GaussianFactor = if self.vocab.count(i) == 0 && !self.taxonomy.children(i).is_empty() {
                &self.state.hv[i]
            } else {
                &self.state.v[i]
            };
            let c = q.covariance_matrix();
            out.extend([q.mean[0], q.mean[1], c[(0, 0)], c[(0, 1)], c[(1, 1)]]);
        }
        out
    }

    /// Similarity of two words, NaN if either is unknown.
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        match (self.vocab.index_of(a), self.vocab.index_of(b)) {
            (Some(i), Some(j)) => pair_similarity(i, j, &self.state),
            _ => f64::NAN,
        }
    }

    /// Mean and variance of `uᵢᵀvⱼ`, empty if either word is unknown.
    pub fn dot(&self, a: &str, b: &str) -> Vec<f64> {
        match (self.vocab.index_of(a), self.vocab.index_of(b)) {
            (Some(i), Some(j)) => {
                let m = dot_moments(&self.state.u[i], &self.state.v[j]);
                vec![m.mean, m.variance]
            }
            _ => Vec::new(),
        }
    }

    /// `word<TAB>score` lines, best first.
    pub fn neighbors(&self, word: &str, top: usize) -> String {
        let Some(i) = self.vocab.index_of(word) else {
            return String::new();
        };
        nearest_neighbors(i, &self.state, top)
            .into_iter()
            .map(|(j, s)| format!("{}\t{s:.4}", self.vocab.word(j)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
