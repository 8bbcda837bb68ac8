//! Posterior-predictive co-occurrence and similarity scores.

use std::f64::consts::PI;

use crate::math::sigmoid;
use crate::vb::{GaussianFactor, ModelState};

/// First two moments of `x = aᵀb` under independent Gaussian factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn dot_moments(a: &GaussianFactor, b: &GaussianFactor) -> DotMoments {
    assert_eq!(a.dim(), b.dim(), "factor dimensions differ");
    // Grouped so that swapping `a` and `b` gives bit-identical results.
    let variance = a.trace_cov_product(b) + (b.quad_cov(&a.mean) + a.quad_cov(&b.mean));
    DotMoments {
        mean: a.mean.dot(&b.mean),
        variance: variance.max(0.0),
    }
}

/// MacKay's approximation `∫σ(x) N(x; μ, σ²) dx ≈ σ(μ / sqrt(1 + πσ²/8))`.
pub fn predictive_prob(m: DotMoments) -> f64 {
    sigmoid(m.mean / (1.0 + PI * m.variance / 8.0).sqrt())
}

/// The averaged `uᵀu` / `vᵀv` predictive used for word similarity.
///
/// `i == j` is allowed and treated as two independent draws of the same
/// factor, which makes it a heuristic self-similarity.
pub fn pair_similarity(i: usize, j: usize, state: &ModelState) -> f64 {
    let uu = predictive_prob(dot_moments(&state.u[i], &state.u[j]));
    let vv = predictive_prob(dot_moments(&state.v[i], &state.v[j]));
    0.5 * (uu + vv)
}

/// Probability that `j` appears in the context of `i`: `p(d_ij = 1)`
/// through `uᵢᵀvⱼ`.
pub fn cooccurrence_prob(i: usize, j: usize, state: &ModelState) -> f64 {
    predictive_prob(dot_moments(&state.u[i], &state.v[j]))
}

/// The `top_n` most similar other words, best first; ties go to the lower
/// index. Asking for more than exist returns them all.
pub fn nearest_neighbors(i: usize, state: &ModelState, top_n: usize) -> Vec<(usize, f64)> {
    rank_neighbors(i, state.len(), top_n, |j| pair_similarity(i, j, state))
}

pub(crate) fn rank_neighbors(
    i: usize,
    n: usize,
    top_n: usize,
    score: impl Fn(usize) -> f64,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = (0..n).filter(|&j| j != i).map(|j| (j, score(j))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(top_n);
    scored
}
