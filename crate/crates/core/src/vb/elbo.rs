//! The ξ-bounded evidence lower bound `ℒ_ξ(q)`.

use std::f64::consts::PI;

use crate::corpus::{PairDataset, PairRecord};
use crate::error::{Error, Result};
use crate::math::log_sigmoid;
use crate::taxonomy::Taxonomy;

use super::bound::{frobenius, lambda, xi_from_moments, XiMode};
use super::state::{Family, ModelState};
use super::update::SecondMoments;

/// The three parts of the bound, summed over all factors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElboTerms {
    /// `E_q[log p_ξ(D | θ)]`
    pub likelihood: f64,
    /// `E_q[log p(θ | τ)]`
    pub prior: f64,
    /// `−E_q[log q(θ)]`
    pub entropy: f64,
}

impl ElboTerms {
    pub fn total(&self) -> f64 {
        self.likelihood + self.prior + self.entropy
    }
}

pub fn elbo(state: &ModelState, pairs: &PairDataset, taxonomy: &Taxonomy, xi_mode: XiMode) -> Result<f64> {
    Ok(elbo_terms(state, pairs, taxonomy, xi_mode)?.total())
}

pub fn elbo_terms(
    state: &ModelState,
    pairs: &PairDataset,
    taxonomy: &Taxonomy,
    xi_mode: XiMode,
) -> Result<ElboTerms> {
    let n = state.len();
    if pairs.index_bound() > n || taxonomy.len() != n {
        return Err(Error::InvalidConfig(
            "state, pairs and taxonomy disagree on the vocabulary size".into(),
        ));
    }
    let k = state.k;
    let v_moments = SecondMoments::of(&state.v, k);
    let rows = group_by_center(pairs.records(), n);

    let per_word = |i: usize| -> Result<[f64; 3]> {
        let mut lik = 0.0;
        let records = rows[i];
        if !records.is_empty() {
            let mut m_u = vec![0.0; k * k];
            state.u[i].second_moment_into(&mut m_u);
            for r in records {
                let j = r.j as usize;
                let m_v = v_moments.get(j);
                let e2 = frobenius(&m_u, m_v);
                let xi = xi_from_moments(&m_u, m_v, k, xi_mode);
                let mean_dot = state.u[i].mean.dot(&state.v[j].mean);
                // Per observation: d·x̄/2 − ξ/2 + ln σ(ξ) − λ(ξ)(E[x²] − ξ²)
                let shared = -0.5 * xi + log_sigmoid(xi) - lambda(xi) * (e2 - xi * xi);
                lik += r.n_pos as f64 * (0.5 * mean_dot + shared)
                    + r.n_neg as f64 * (-0.5 * mean_dot + shared);
            }
            if !lik.is_finite() {
                return Err(Error::NonFinite(format!("likelihood term of U[{i}]")));
            }
        }
        let mut prior = 0.0;
        let mut entropy = 0.0;
        for f in Family::ALL {
            let q = state.factor(f, i);
            let tau = state.hyper.tau(f);
            let parents = state.family(f.parents());
            let pi = taxonomy.parents(i);
            let s = taxonomy.prior_mean(i, k, |m| &parents[m].mean);
            let parent_spread = if pi.is_empty() {
                0.0
            } else {
                pi.iter().map(|&m| parents[m].trace_cov()).sum::<f64>() / (pi.len() * pi.len()) as f64
            };
            let sq = (&q.mean - &s).norm_squared() + q.trace_cov() + parent_spread;
            let p = 0.5 * k as f64 * (tau / (2.0 * PI)).ln() - 0.5 * tau * sq;
            let h = q.entropy()?;
            if !(p.is_finite() && h.is_finite()) {
                return Err(Error::NonFinite(format!("factor {}[{i}]", f.name())));
            }
            prior += p;
            entropy += h;
        }
        Ok([lik, prior, entropy])
    };

    #[cfg(feature = "parallel")]
    let parts: Vec<Result<[f64; 3]>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(per_word).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<[f64; 3]>> = (0..n).map(per_word).collect();

    // Summed in index order so the result does not depend on scheduling.
    let mut terms = ElboTerms::default();
    for p in parts {
        let [l, pr, h] = p?;
        terms.likelihood += l;
        terms.prior += pr;
        terms.entropy += h;
    }
    Ok(terms)
}

fn group_by_center(records: &[PairRecord], n: usize) -> Vec<&[PairRecord]> {
    let mut rows: Vec<&[PairRecord]> = Vec::new();
    let mut start = 0;
    for i in 0..n {
        let mut end = start;
        while end < records.len() && records[end].i as usize == i {
            end += 1;
        }
        rows.push(&records[start..end]);
        start = end;
    }
    rows
}
