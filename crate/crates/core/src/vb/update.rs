//! Closed-form coordinate updates for leaf and parent factors.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::taxonomy::Taxonomy;

use super::bound::{lambda, xi_from_moments, XiMode};
use super::factor::GaussianFactor;
use super::pairs::{PairCount, PairIndex};
use super::state::{Family, ModelState};

/// `E[z zᵀ]` for every factor of one family, flattened `k × k` each.
pub(crate) struct SecondMoments {
    k: usize,
    data: Vec<f64>,
}

impl SecondMoments {
    pub(crate) fn of(factors: &[GaussianFactor], k: usize) -> Self {
        let kk = k * k;
        let mut data = vec![0.0; factors.len() * kk];
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            data.par_chunks_mut(kk)
                .zip(factors.par_iter())
                .for_each(|(out, q)| q.second_moment_into(out));
        }
        #[cfg(not(feature = "parallel"))]
        for (out, q) in data.chunks_mut(kk).zip(factors) {
            q.second_moment_into(out);
        }
        SecondMoments { k, data }
    }

    pub(crate) fn get(&self, i: usize) -> &[f64] {
        let kk = self.k * self.k;
        &self.data[i * kk..(i + 1) * kk]
    }
}

/// New leaf factor for word `i` of `family` (U or V).
///
/// Precision `τ I + 2 Σ_j (n⁺ + n⁻) λ(ξ_ij) E[w_j w_jᵀ]` and mean
/// `P⁻¹ (½ Σ_j (n⁺ − n⁻) μ_{w_j} + τ s_i)`, where `w` is the opposite
/// family and `s_i` the prior mean from the parent family. Each `ξ_ij` comes
/// from the current factors.
pub fn update_leaf(
    i: usize,
    family: Family,
    state: &ModelState,
    index: &PairIndex,
    taxonomy: &Taxonomy,
    xi_mode: XiMode,
) -> Result<GaussianFactor> {
    assert!(family.is_leaf(), "update_leaf called on {}", family.name());
    let opposite = state.family(family.opposite());
    // Only the partners' moments are needed here; the training loop caches
    // the whole family instead.
    let k = state.k;
    let partners = index.partners(family, i);
    let mut moments = vec![0.0; partners.len() * k * k];
    for (out, p) in moments.chunks_mut(k * k).zip(partners) {
        opposite[p.other as usize].second_moment_into(out);
    }
    leaf_update_with(i, family, state, partners, taxonomy, xi_mode, |n| {
        &moments[n * k * k..(n + 1) * k * k]
    })
}

/// `moment(n)` is `E[w wᵀ]` for the n-th entry of `partners`.
pub(crate) fn leaf_update_with<'m>(
    i: usize,
    family: Family,
    state: &ModelState,
    partners: &[PairCount],
    taxonomy: &Taxonomy,
    xi_mode: XiMode,
    moment: impl Fn(usize) -> &'m [f64],
) -> Result<GaussianFactor> {
    let k = state.k;
    let tau = state.hyper.tau(family);
    let parents = state.family(family.parents());
    let prior = taxonomy.prior_mean(i, k, |n| &parents[n].mean);
    if partners.is_empty() {
        return Ok(GaussianFactor::full_prior(prior, tau));
    }

    let opposite = state.family(family.opposite());
    let mut m_self = vec![0.0; k * k];
    state.factor(family, i).second_moment_into(&mut m_self);

    let mut precision = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for (n, p) in partners.iter().enumerate() {
        let m_other = moment(n);
        let xi = xi_from_moments(&m_self, m_other, k, xi_mode);
        let count = (p.n_pos + p.n_neg) as f64;
        let w = 2.0 * count * lambda(xi);
        for (a, b) in precision.as_mut_slice().iter_mut().zip(m_other) {
            *a += w * b;
        }
        let d = 0.5 * (p.n_pos as f64 - p.n_neg as f64);
        if d != 0.0 {
            rhs.axpy(d, &opposite[p.other as usize].mean, 1.0);
        }
    }
    for d in 0..k {
        precision[(d, d)] += tau;
    }
    rhs.axpy(tau, &prior, 1.0);
    GaussianFactor::from_precision(precision, &rhs, &format!("{}[{i}]", family.name()))
}

/// New isotropic parent factor for word `i` of `family` (Hu or Hv).
///
/// Word `i` enters the prior of every child `m ∈ ω_i`, both for the child's
/// leaf factor and its parent factor, with weight `1/|π_m|`. Its own prior
/// mean (from its parents) contributes `τ_h s_i`.
pub fn update_parent(
    i: usize,
    family: Family,
    state: &ModelState,
    taxonomy: &Taxonomy,
) -> GaussianFactor {
    assert!(!family.is_leaf(), "update_parent called on {}", family.name());
    let k = state.k;
    let tau_h = state.hyper.tau(family);
    let tau_leaf = state.hyper.tau(family.leaves());
    let h = state.family(family);
    let leaves = state.family(family.leaves());

    let mut precision = tau_h;
    let mut rhs = taxonomy.prior_mean(i, k, |n| &h[n].mean) * tau_h;
    for &m in taxonomy.children(i) {
        let np = taxonomy.parents(m).len() as f64;
        let coupling = (tau_leaf + tau_h) / (np * np);
        precision += coupling;
        rhs.axpy(tau_leaf / np, &leaves[m].mean, 1.0);
        rhs.axpy(tau_h / np, &h[m].mean, 1.0);
        for &n in taxonomy.parents(m) {
            if n != i {
                rhs.axpy(-coupling, &h[n].mean, 1.0);
            }
        }
    }
    GaussianFactor::isotropic(rhs / precision, precision)
}
