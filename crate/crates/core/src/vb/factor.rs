use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Covariance of a [`GaussianFactor`].
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    /// Dense symmetric positive-definite matrix (leaf factors).
    Full(DMatrix<f64>),
    /// `precision⁻¹ · I` (parent factors).
    Isotropic { precision: f64 },
}

/// One variational factor `q(z) = N(mean, cov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFactor {
    pub mean: DVector<f64>,
    pub cov: Covariance,
}

impl GaussianFactor {
    pub fn full(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        debug_assert_eq!(cov.nrows(), mean.len());
        GaussianFactor {
            mean,
            cov: Covariance::Full(cov),
        }
    }

    pub fn isotropic(mean: DVector<f64>, precision: f64) -> Self {
        GaussianFactor {
            mean,
            cov: Covariance::Isotropic { precision },
        }
    }

    /// `N(mean, τ⁻¹ I)` stored with a dense covariance.
    pub fn full_prior(mean: DVector<f64>, tau: f64) -> Self {
        let k = mean.len();
        Self::full(mean, DMatrix::from_diagonal_element(k, k, 1.0 / tau))
    }

    /// Solves `precision · mean = rhs` through a Cholesky factorization.
    pub fn from_precision(precision: DMatrix<f64>, rhs: &DVector<f64>, what: &str) -> Result<Self> {
        let chol = precision
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite(what.to_owned()))?;
        let mean = chol.solve(rhs);
        let mut cov = chol.inverse();
        symmetrize(&mut cov);
        Ok(Self::full(mean, cov))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_full(&self) -> bool {
        matches!(self.cov, Covariance::Full(_))
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        match &self.cov {
            Covariance::Full(c) => c.clone(),
            Covariance::Isotropic { precision } => {
                let k = self.dim();
                DMatrix::from_diagonal_element(k, k, 1.0 / precision)
            }
        }
    }

    /// `Σ[m, m]`
    pub fn variance(&self, m: usize) -> f64 {
        match &self.cov {
            Covariance::Full(c) => c[(m, m)],
            Covariance::Isotropic { precision } => 1.0 / precision,
        }
    }

    pub fn trace_cov(&self) -> f64 {
        match &self.cov {
            Covariance::Full(c) => c.trace(),
            Covariance::Isotropic { precision } => self.dim() as f64 / precision,
        }
    }

    /// `xᵀ Σ x`
    pub fn quad_cov(&self, x: &DVector<f64>) -> f64 {
        match &self.cov {
            Covariance::Full(c) => x.dot(&(c * x)),
            Covariance::Isotropic { precision } => x.norm_squared() / precision,
        }
    }

    /// `tr(Σ_self Σ_other)`
    pub fn trace_cov_product(&self, other: &GaussianFactor) -> f64 {
        match (&self.cov, &other.cov) {
            (Covariance::Full(a), Covariance::Full(b)) => a.component_mul(b).sum(),
            (Covariance::Full(a), Covariance::Isotropic { precision })
            | (Covariance::Isotropic { precision }, Covariance::Full(a)) => a.trace() / precision,
            (Covariance::Isotropic { precision: p }, Covariance::Isotropic { precision: q }) => {
                self.dim() as f64 / (p * q)
            }
        }
    }

    pub fn log_det_cov(&self) -> Result<f64> {
        match &self.cov {
            Covariance::Full(c) => {
                let chol = c
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::NotPositiveDefinite("covariance".into()))?;
                Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
            }
            Covariance::Isotropic { precision } => Ok(-(self.dim() as f64) * precision.ln()),
        }
    }

    pub fn precision_matrix(&self) -> Result<DMatrix<f64>> {
        match &self.cov {
            Covariance::Full(c) => {
                let mut p = c
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::NotPositiveDefinite("covariance".into()))?
                    .inverse();
                symmetrize(&mut p);
                Ok(p)
            }
            Covariance::Isotropic { precision } => {
                let k = self.dim();
                Ok(DMatrix::from_diagonal_element(k, k, *precision))
            }
        }
    }

    /// `½ log det(2πe Σ)`
    pub fn entropy(&self) -> Result<f64> {
        let k = self.dim() as f64;
        Ok(0.5 * k * (2.0 * PI * std::f64::consts::E).ln() + 0.5 * self.log_det_cov()?)
    }

    /// Writes `Σ + μμᵀ` column-major into `out` (length k²).
    pub fn second_moment_into(&self, out: &mut [f64]) {
        let k = self.dim();
        debug_assert_eq!(out.len(), k * k);
        let mu = self.mean.as_slice();
        for c in 0..k {
            for r in 0..k {
                out[c * k + r] = mu[r] * mu[c];
            }
        }
        match &self.cov {
            Covariance::Full(m) => {
                for (o, s) in out.iter_mut().zip(m.as_slice()) {
                    *o += s;
                }
            }
            Covariance::Isotropic { precision } => {
                for d in 0..k {
                    out[d * k + d] += 1.0 / precision;
                }
            }
        }
    }
}

/// `E[z zᵀ] = Σ + μμᵀ`
pub fn expected_outer(q: &GaussianFactor) -> DMatrix<f64> {
    let k = q.dim();
    let mut m = DMatrix::zeros(k, k);
    q.second_moment_into(m.as_mut_slice());
    m
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let k = m.nrows();
    for c in 0..k {
        for r in (c + 1)..k {
            let avg = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = avg;
            m[(c, r)] = avg;
        }
    }
}
