//! Point-estimate skip-gram with negative sampling, trained on the same
//! aggregated pairs as the Bayesian model.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::PairDataset;
use crate::error::{Error, Result};
use crate::math::{dot, log_sigmoid, sigmoid};
use crate::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgnsConfig {
    pub k: usize,
    pub epochs: usize,
    /// Initial step size; decays linearly towards zero over training.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            k: 50,
            epochs: 15,
            learning_rate: 0.025,
            seed: 0,
        }
    }
}

/// Context (`u`) and target (`v`) vectors, row-major `n × k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEmbeddings {
    pub k: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub config: SgnsConfig,
}

impl PointEmbeddings {
    pub fn len(&self) -> usize {
        if self.k == 0 {
            0
        } else {
            self.u.len() / self.k
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u_row(&self, i: usize) -> &[f64] {
        &self.u[i * self.k..(i + 1) * self.k]
    }

    pub fn v_row(&self, i: usize) -> &[f64] {
        &self.v[i * self.k..(i + 1) * self.k]
    }

    /// Uniform in `[−0.5/k, 0.5/k]`, u rows first.
    pub fn init(n: usize, config: SgnsConfig) -> Self {
        let k = config.k;
        let mut rng = seeded_rng(config.seed);
        let half = 0.5 / k as f64;
        let mut fill = || (0..n * k).map(|_| rng.random_range(-half..=half)).collect::<Vec<_>>();
        let u = fill();
        let v = fill();
        PointEmbeddings { k, u, v, config }
    }
}

/// `−ln σ(d·uᵀv)` and its gradients with respect to `u` and `v`.
pub fn pair_loss_grad(u: &[f64], v: &[f64], positive: bool) -> (f64, Vec<f64>, Vec<f64>) {
    let d = if positive { 1.0 } else { -1.0 };
    let x = dot(u, v);
    let loss = -log_sigmoid(d * x);
    // d/dx of −ln σ(d x) = −d (1 − σ(d x))
    let g = -d * (1.0 - sigmoid(d * x));
    (loss, v.iter().map(|b| g * b).collect(), u.iter().map(|a| g * a).collect())
}

/// `−Σ [n⁺ ln σ(uᵢᵀvⱼ) + n⁻ ln σ(−uᵢᵀvⱼ)]`
pub fn total_loss(emb: &PointEmbeddings, pairs: &PairDataset) -> f64 {
    pairs
        .records()
        .iter()
        .map(|r| {
            let x = dot(emb.u_row(r.i as usize), emb.v_row(r.j as usize));
            -(r.n_pos as f64 * log_sigmoid(x) + r.n_neg as f64 * log_sigmoid(-x))
        })
        .sum()
}

/// Gradient of [`total_loss`] with respect to every `u` and `v` entry.
pub fn total_gradient(emb: &PointEmbeddings, pairs: &PairDataset) -> (Vec<f64>, Vec<f64>) {
    let k = emb.k;
    let mut gu = vec![0.0; emb.u.len()];
    let mut gv = vec![0.0; emb.v.len()];
    for r in pairs.records() {
        let (i, j) = (r.i as usize, r.j as usize);
        for (positive, count) in [(true, r.n_pos), (false, r.n_neg)] {
            if count == 0 {
                continue;
            }
            let (_, du, dv) = pair_loss_grad(emb.u_row(i), emb.v_row(j), positive);
            for d in 0..k {
                gu[i * k + d] += count as f64 * du[d];
                gv[j * k + d] += count as f64 * dv[d];
            }
        }
    }
    (gu, gv)
}

/// Seeded SGD over the expanded, shuffled pair list. Returns the
/// embeddings and the full loss after every epoch.
pub fn train_sgns(
    pairs: &PairDataset,
    n_words: usize,
    config: SgnsConfig,
) -> Result<(PointEmbeddings, Vec<f64>)> {
    if pairs.is_empty() {
        return Err(Error::InvalidConfig("cannot train on an empty pair dataset".into()));
    }
    if config.k == 0 || !(config.learning_rate > 0.0) {
        return Err(Error::InvalidConfig("k and learning_rate must be positive".into()));
    }
    if pairs.index_bound() > n_words {
        return Err(Error::InvalidConfig("pairs reference words outside the vocabulary".into()));
    }
    let mut emb = PointEmbeddings::init(n_words, config);
    let mut rng = seeded_rng(config.seed.wrapping_add(1));
    let mut instances: Vec<(u32, u32, bool)> = Vec::with_capacity((pairs.total_pos() + pairs.total_neg()) as usize);
    for r in pairs.records() {
        instances.extend(std::iter::repeat_n((r.i, r.j, true), r.n_pos as usize));
        instances.extend(std::iter::repeat_n((r.i, r.j, false), r.n_neg as usize));
    }
    let k = config.k;
    let total_steps = (instances.len() * config.epochs) as f64;
    let mut step = 0usize;
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        instances.shuffle(&mut rng);
        for &(i, j, positive) in &instances {
            let lr = config.learning_rate * (1.0 - step as f64 / total_steps).max(1e-4);
            step += 1;
            let (i, j) = (i as usize, j as usize);
            let (ui, vj) = (&mut emb.u[i * k..(i + 1) * k], &mut emb.v[j * k..(j + 1) * k]);
            let d = if positive { 1.0 } else { -1.0 };
            let g = -d * (1.0 - sigmoid(d * dot(ui, vj)));
            for (a, b) in ui.iter_mut().zip(vj.iter_mut()) {
                let (old_a, old_b) = (*a, *b);
                *a -= lr * g * old_b;
                *b -= lr * g * old_a;
            }
        }
        let loss = total_loss(&emb, pairs);
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("skip-gram loss after epoch {}", epoch + 1)));
        }
        trace.push(loss);
    }
    Ok((emb, trace))
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

/// `½ (cos(uᵢ, uⱼ) + cos(vᵢ, vⱼ))`; a zero row scores 0.
pub fn sg_similarity(i: usize, j: usize, emb: &PointEmbeddings) -> f64 {
    0.5 * (cosine(emb.u_row(i), emb.u_row(j)) + cosine(emb.v_row(i), emb.v_row(j)))
}

pub fn sg_nearest_neighbors(i: usize, emb: &PointEmbeddings, top_n: usize) -> Vec<(usize, f64)> {
    crate::predictive::rank_neighbors(i, emb.len(), top_n, |j| sg_similarity(i, j, emb))
}
