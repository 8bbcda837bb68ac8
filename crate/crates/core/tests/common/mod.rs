//! Reference implementations used by the integration tests. Nothing here
//! calls into the library's own bound, update or ELBO code.

#![allow(dead_code)]

use bhwr::corpus::{build_pair_dataset, build_vocabulary};
use bhwr::taxonomy::load_taxonomy;
use bhwr::vb::{init_state, Family, GaussianFactor, Hyperparams, ModelState, TrainConfig};
use bhwr::{Corpus, OovPolicy, PairDataset, PairRecord, SamplerConfig, Taxonomy, Vocabulary};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `(σ(a) − ½) / (2a)` straight from the definition.
pub fn lambda_direct(a: f64) -> f64 {
    (sigmoid(a) - 0.5) / (2.0 * a)
}

/// `E[z zᵀ]`
pub fn outer(q: &GaussianFactor) -> DMatrix<f64> {
    q.covariance_matrix() + &q.mean * q.mean.transpose()
}

pub fn expected_x2(a: &GaussianFactor, b: &GaussianFactor) -> f64 {
    let (ma, mb) = (outer(a), outer(b));
    let mut s = 0.0;
    for r in 0..a.dim() {
        for c in 0..a.dim() {
            s += ma[(r, c)] * mb[(r, c)];
        }
    }
    s
}

pub fn exact_xi(a: &GaussianFactor, b: &GaussianFactor) -> f64 {
    expected_x2(a, b).sqrt()
}

pub fn gaussian_entropy(cov: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(cov.clone()).eigenvalues;
    eig.iter().map(|l| 0.5 * (2.0 * PI * std::f64::consts::E * l).ln()).sum()
}

/// Mean of the parents' H means and `Σ tr(Σ_h) / |π|²`.
fn prior_moments(state: &ModelState, tax: &Taxonomy, f: Family, i: usize) -> (DVector<f64>, f64) {
    let h = state.family(f.parents());
    let pi = tax.parents(i);
    let mut s = DVector::zeros(state.k);
    let mut spread = 0.0;
    for &n in pi {
        s += &h[n].mean;
        spread += h[n].covariance_matrix().trace();
    }
    if !pi.is_empty() {
        let np = pi.len() as f64;
        s /= np;
        spread /= np * np;
    }
    (s, spread)
}

/// The bound with every `ξ_ij` supplied by the caller.
pub fn naive_elbo(
    state: &ModelState,
    pairs: &PairDataset,
    tax: &Taxonomy,
    xi: &dyn Fn(usize, usize) -> f64,
) -> f64 {
    let k = state.k as f64;
    let mut total = 0.0;
    for r in pairs.records() {
        let (i, j) = (r.i as usize, r.j as usize);
        let (u, v) = (&state.u[i], &state.v[j]);
        let ex = u.mean.dot(&v.mean);
        let ex2 = expected_x2(u, v);
        let xi = xi(i, j);
        let lam = lambda_direct(xi);
        for (d, n) in [(1.0, r.n_pos), (-1.0, r.n_neg)] {
            total += n as f64 * (log_sigmoid(xi) + 0.5 * (d * ex - xi) - lam * (ex2 - xi * xi));
        }
    }
    for f in Family::ALL {
        let tau = state.hyper.tau(f);
        for i in 0..state.len() {
            let q = &state.family(f)[i];
            let (s, spread) = prior_moments(state, tax, f, i);
            let cov = q.covariance_matrix();
            let sq = (&q.mean - s).norm_squared() + cov.trace() + spread;
            total += 0.5 * k * (tau / (2.0 * PI)).ln() - 0.5 * tau * sq;
            total += gaussian_entropy(&cov);
        }
    }
    total
}

/// `naive_elbo` with each ξ at its optimum for the given state.
pub fn naive_elbo_exact(state: &ModelState, pairs: &PairDataset, tax: &Taxonomy) -> f64 {
    naive_elbo(state, pairs, tax, &|i, j| exact_xi(&state.u[i], &state.v[j]))
}

/// Central-difference gradient and Hessian.
fn fd_derivatives(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.len();
    let at = |d: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in d {
            y[i] += s;
        }
        f(&y)
    };
    let f0 = f(x);
    let mut g = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let (fp, fm) = (at(&[(i, h)]), at(&[(i, -h)]));
        g[i] = (fp - fm) / (2.0 * h);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    (g, hess)
}

/// Levenberg-damped Newton ascent on finite-difference derivatives.
pub fn maximize(f: &dyn Fn(&[f64]) -> f64, x0: &[f64]) -> Vec<f64> {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut damping = 1e-3;
    for _ in 0..500 {
        let (g, hess) = fd_derivatives(f, &x, 1e-4);
        if g.amax() < 1e-10 {
            break;
        }
        let mut improved = false;
        for _ in 0..40 {
            let mut a = -&hess;
            for d in 0..x.len() {
                a[(d, d)] += damping * (1.0 + hess[(d, d)].abs());
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&g)) else {
                damping *= 10.0;
                continue;
            };
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let fc = f(&cand);
            if fc.is_finite() && fc >= fx {
                let converged = (fc - fx).abs() <= 1e-15 * fx.abs().max(1.0);
                x = cand;
                fx = fc;
                damping = (damping * 0.3).max(1e-12);
                improved = true;
                if converged {
                    return x;
                }
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Lower-triangular `L` from `k(k+1)/2` parameters, diagonal on a log scale.
pub fn cholesky_from_params(k: usize, p: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(k, k);
    let mut n = 0;
    for r in 0..k {
        for c in 0..=r {
            l[(r, c)] = if r == c { p[n].exp() } else { p[n] };
            n += 1;
        }
    }
    l
}

pub fn params_from_cov(cov: &DMatrix<f64>) -> Vec<f64> {
    let l = cov.clone().cholesky().expect("SPD").l();
    let k = cov.nrows();
    let mut p = Vec::new();
    for r in 0..k {
        for c in 0..=r {
            p.push(if r == c { l[(r, c)].ln() } else { l[(r, c)] });
        }
    }
    p
}

/// Maximizes the bound over factor `(family, i)` with every ξ frozen at the
/// optimum for `state`. Returns the maximizing factor.
pub fn numeric_update(state: &ModelState, pairs: &PairDataset, tax: &Taxonomy, family: Family, i: usize) -> GaussianFactor {
    let k = state.k;
    let frozen: Vec<((usize, usize), f64)> = pairs
        .records()
        .iter()
        .map(|r| {
            let (a, b) = (r.i as usize, r.j as usize);
            ((a, b), exact_xi(&state.u[a], &state.v[b]))
        })
        .collect();
    let xi = move |a: usize, b: usize| frozen.iter().find(|e| e.0 == (a, b)).unwrap().1;
    let q0 = &state.family(family)[i];
    let build = |p: &[f64]| -> GaussianFactor {
        let mean = DVector::from_column_slice(&p[..k]);
        if family.is_leaf() {
            let l = cholesky_from_params(k, &p[k..]);
            GaussianFactor::full(mean, &l * l.transpose())
        } else {
            GaussianFactor::isotropic(mean, p[k].exp())
        }
    };
    let objective = |p: &[f64]| {
        let mut s = state.clone();
        s.family_mut(family)[i] = build(p);
        naive_elbo(&s, pairs, tax, &xi)
    };
    let mut x0: Vec<f64> = q0.mean.iter().copied().collect();
    if family.is_leaf() {
        x0.extend(params_from_cov(&q0.covariance_matrix()));
    } else {
        x0.push(-q0.covariance_matrix()[(0, 0)].ln());
    }
    build(&maximize(&objective, &x0))
}

/// Gauss-Hermite nodes and weights for `∫ e^{−x²} f(x) dx` (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|c| (eig.eigenvalues[c], PI.sqrt() * eig.eigenvectors[(0, c)].powi(2)))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.into_iter().unzip()
}

/// `E[f(x)]` for `x ~ N(mean, var)`.
pub fn gh_expect(mean: f64, var: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_hermite(n);
    x.iter().zip(&w).map(|(x, w)| w * f(mean + (2.0 * var).sqrt() * x)).sum::<f64>() / PI.sqrt()
}

/// Corpus → vocabulary, pairs and taxonomy, with parents added to the
/// vocabulary.
pub fn prepare(
    corpus: &Corpus,
    edges: &[(String, String)],
    sampler: &SamplerConfig,
) -> (Vocabulary, PairDataset, Taxonomy) {
    let mut vocab = build_vocabulary(corpus.tokens(), sampler.min_count).unwrap();
    let pairs = build_pair_dataset(corpus, &vocab, sampler).unwrap();
    let tax = load_taxonomy(edges, &mut vocab, OovPolicy::ExtendVocab).unwrap();
    (vocab, pairs, tax)
}

pub struct Instance {
    pub state: bhwr::ModelState,
    pub pairs: PairDataset,
    pub tax: Taxonomy,
}

/// At most 4 words, k ≤ 2, at most 6 counted cells and a random DAG. Odd
/// `n` also randomizes the precisions.
pub fn random_instance(n: usize, rng: &mut bhwr::Rng) -> Instance {
    let n_w = rng.random_range(2..=4);
    let k = rng.random_range(1..=2);
    let hyper = if n % 2 == 0 {
        Hyperparams::default()
    } else {
        Hyperparams {
            tau_u: rng.random_range(0.05..1.5),
            tau_v: rng.random_range(0.05..1.5),
            tau_hu: rng.random_range(0.001..0.5),
            tau_hv: rng.random_range(0.001..0.5),
        }
    };
    let mut order: Vec<usize> = (0..n_w).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n_w {
        for b in 0..a {
            if rng.random_bool(0.4) {
                edges.push((order[a], order[b]));
            }
        }
    }
    let tax = Taxonomy::from_index_edges(n_w, edges, |i| i.to_string()).unwrap();
    let mut records = Vec::new();
    let n_pairs = rng.random_range(1..=6);
    for _ in 0..n_pairs {
        let (n_pos, n_neg) = loop {
            let c = (rng.random_range(0..=3), rng.random_range(0..=3));
            if c != (0, 0) {
                break c;
            }
        };
        records.push(PairRecord { i: rng.random_range(0..n_w as u32), j: rng.random_range(0..n_w as u32), n_pos, n_neg });
    }
    // Merging duplicates can exceed 3 per cell; that is fine.
    let pairs = PairDataset::from_records(records, SamplerConfig::default(), 0);
    let mut state = init_state(n_w, &TrainConfig { k, seed: rng.random(), ..TrainConfig::default() }, hyper);
    for f in Family::ALL {
        for q in state.family_mut(f).iter_mut() {
            if f.is_leaf() {
                let a = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
                let cov = &a * a.transpose() / k as f64 + DMatrix::identity(k, k) * 0.2;
                *q = GaussianFactor::full(q.mean.clone(), cov);
            } else {
                *q = GaussianFactor::isotropic(q.mean.clone(), rng.random_range(-1.0f64..1.0).exp());
            }
        }
    }
    Instance { state, pairs, tax }
}
