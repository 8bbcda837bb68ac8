//! The Jaakkola-Jordan quadratic lower bound on `ln σ(x)`.

use crate::math::log_sigmoid;

use super::factor::GaussianFactor;

const LAMBDA_EPS: f64 = 1e-6;

/// `λ(a) = (σ(a) − ½) / 2a`, with its limit `1/8` at the origin.
///
/// Computed as `tanh(a/2) / 4a`, which is the same quantity without the
/// cancellation in `σ(a) − ½`.
pub fn lambda(a: f64) -> f64 {
    if a.abs() <= LAMBDA_EPS {
        0.125
    } else {
        (0.5 * a).tanh() / (4.0 * a)
    }
}

/// `ln σ(ξ) + (x − ξ)/2 − λ(ξ)(x² − ξ²) ≤ ln σ(x)`, tight at `ξ = ±x`.
pub fn jj_bound(x: f64, xi: f64) -> f64 {
    log_sigmoid(xi) + 0.5 * (x - xi) - lambda(xi) * (x * x - xi * xi)
}

/// How the per-pair variational parameter is computed from the moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XiMode {
    /// `sqrt(Σ_m (σ²_{u,m} + μ²_{u,m})(σ²_{v,m} + μ²_{v,m}))`, which only
    /// uses covariance diagonals.
    Paper,
    /// `sqrt(E[(uᵀv)²])`, the optimum of the bound.
    #[default]
    Exact,
}

impl XiMode {
    pub fn as_str(self) -> &'static str {
        match self {
            XiMode::Paper => "paper",
            XiMode::Exact => "exact",
        }
    }
}

impl std::str::FromStr for XiMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(XiMode::Paper),
            "exact" => Ok(XiMode::Exact),
            _ => Err(format!("unknown xi mode `{s}` (expected paper|exact)")),
        }
    }
}

pub fn xi(q_u: &GaussianFactor, q_v: &GaussianFactor, mode: XiMode) -> f64 {
    match mode {
        XiMode::Paper => (0..q_u.dim())
            .map(|m| {
                (q_u.variance(m) + q_u.mean[m].powi(2)) * (q_v.variance(m) + q_v.mean[m].powi(2))
            })
            .sum::<f64>()
            .sqrt(),
        XiMode::Exact => second_moment_of_dot(q_u, q_v).max(0.0).sqrt(),
    }
}

/// `E[(uᵀv)²] = tr(Σ_uΣ_v) + μ_uᵀΣ_vμ_u + μ_vᵀΣ_uμ_v + (μ_uᵀμ_v)²` for
/// independent `u`, `v`.
pub fn second_moment_of_dot(q_u: &GaussianFactor, q_v: &GaussianFactor) -> f64 {
    q_u.trace_cov_product(q_v)
        + q_v.quad_cov(&q_u.mean)
        + q_u.quad_cov(&q_v.mean)
        + q_u.mean.dot(&q_v.mean).powi(2)
}

/// Flat `k × k` second moments: `ξ` straight from `E[uuᵀ]` and `E[vvᵀ]`.
pub(crate) fn xi_from_moments(m_u: &[f64], m_v: &[f64], k: usize, mode: XiMode) -> f64 {
    match mode {
        XiMode::Exact => frobenius(m_u, m_v).max(0.0).sqrt(),
        XiMode::Paper => (0..k).map(|d| m_u[d * k + d] * m_v[d * k + d]).sum::<f64>().sqrt(),
    }
}

pub(crate) fn frobenius(a: &[f64], b: &[f64]) -> f64 {
    crate::math::dot(a, b)
}
