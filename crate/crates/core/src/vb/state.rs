use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seeded_rng;

use super::bound::XiMode;
use super::factor::GaussianFactor;

/// Prior precisions for the four factor families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub tau_u: f64,
    pub tau_v: f64,
    pub tau_hu: f64,
    pub tau_hv: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            tau_u: 0.1,
            tau_v: 0.1,
            tau_hu: 0.001,
            tau_hv: 0.001,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("tau_u", self.tau_u),
            ("tau_v", self.tau_v),
            ("tau_hu", self.tau_hu),
            ("tau_hv", self.tau_hv),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {t} must be positive")));
            }
        }
        Ok(())
    }

    pub fn tau(&self, family: Family) -> f64 {
        match family {
            Family::U => self.tau_u,
            Family::V => self.tau_v,
            Family::Hu => self.tau_hu,
            Family::Hv => self.tau_hv,
        }
    }
}

/// How parent families are swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParentSchedule {
    /// Gauss-Seidel in children-before-parents order. Monotone in the ELBO.
    #[default]
    Sequential,
    /// Every parent factor of a family updated against a frozen snapshot.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    pub max_sweeps: usize,
    pub rel_elbo_tol: f64,
    pub xi_mode: XiMode,
    pub parent_schedule: ParentSchedule,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 50,
            max_sweeps: 50,
            rel_elbo_tol: 1e-5,
            xi_mode: XiMode::Exact,
            parent_schedule: ParentSchedule::Sequential,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.rel_elbo_tol > 0.0) {
            return Err(Error::InvalidConfig("rel_elbo_tol must be positive".into()));
        }
        Ok(())
    }
}

/// The four factor families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Context leaves `u_i`; pairs `(i, ·)`.
    U,
    /// Target leaves `v_j`; pairs `(·, j)`.
    V,
    /// Parent representations anchoring `U` and `Hu`.
    Hu,
    /// Parent representations anchoring `V` and `Hv`.
    Hv,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::U, Family::V, Family::Hu, Family::Hv];

    pub fn is_leaf(self) -> bool {
        matches!(self, Family::U | Family::V)
    }

    /// The leaf family on the other side of the likelihood.
    pub fn opposite(self) -> Family {
        match self {
            Family::U => Family::V,
            Family::V => Family::U,
            Family::Hu => Family::Hv,
            Family::Hv => Family::Hu,
        }
    }

    /// The parent family whose means form this family's prior.
    pub fn parents(self) -> Family {
        match self {
            Family::U | Family::Hu => Family::Hu,
            Family::V | Family::Hv => Family::Hv,
        }
    }

    /// The leaf family anchored by this (parent) family.
    pub fn leaves(self) -> Family {
        match self {
            Family::U | Family::Hu => Family::U,
            Family::V | Family::Hv => Family::V,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::U => "U",
            Family::V => "V",
            Family::Hu => "Hu",
            Family::Hv => "Hv",
        }
    }
}

/// All variational factors, one per word in each family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub k: usize,
    pub hyper: Hyperparams,
    pub u: Vec<GaussianFactor>,
    pub v: Vec<GaussianFactor>,
    pub hu: Vec<GaussianFactor>,
    pub hv: Vec<GaussianFactor>,
    /// Completed training sweeps.
    pub sweeps: usize,
    pub seed: u64,
}

impl ModelState {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn family(&self, f: Family) -> &[GaussianFactor] {
        match f {
            Family::U => &self.u,
            Family::V => &self.v,
            Family::Hu => &self.hu,
            Family::Hv => &self.hv,
        }
    }

    pub fn family_mut(&mut self, f: Family) -> &mut Vec<GaussianFactor> {
        match f {
            Family::U => &mut self.u,
            Family::V => &mut self.v,
            Family::Hu => &mut self.hu,
            Family::Hv => &mut self.hv,
        }
    }

    pub fn factor(&self, f: Family, i: usize) -> &GaussianFactor {
        &self.family(f)[i]
    }

    /// Checks family sizes, dimensions and covariance kinds.
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        let n = self.len();
        for f in Family::ALL {
            let fam = self.family(f);
            if fam.len() != n {
                return Err(Error::Invariant(format!(
                    "family {} has {} factors, expected {n}",
                    f.name(),
                    fam.len()
                )));
            }
            for (i, q) in fam.iter().enumerate() {
                if q.dim() != self.k || q.is_full() != f.is_leaf() {
                    return Err(Error::Invariant(format!("factor {}[{i}] has the wrong shape", f.name())));
                }
            }
        }
        Ok(())
    }

    /// Grows every family to `n` words, giving new words the initial
    /// factor drawn from `seed`.
    pub fn resize(&mut self, n: usize, seed: u64) {
        if n <= self.len() {
            return;
        }
        let extra = n - self.len();
        let fresh = init_factors(extra, self.k, self.hyper, seed);
        self.u.extend(fresh.u);
        self.v.extend(fresh.v);
        self.hu.extend(fresh.hu);
        self.hv.extend(fresh.hv);
    }
}

/// Means drawn i.i.d. `N(0, 1)`, unit precisions. Families are drawn in the
/// order U, V, Hu, Hv from `config.seed`.
pub fn init_state(vocab_size: usize, config: &TrainConfig, hyper: Hyperparams) -> ModelState {
    init_factors(vocab_size, config.k, hyper, config.seed)
}

pub(crate) fn init_factors(vocab_size: usize, k: usize, hyper: Hyperparams, seed: u64) -> ModelState {
    let mut rng = seeded_rng(seed);
    let mut draw = |full: bool| -> Vec<GaussianFactor> {
        (0..vocab_size)
            .map(|_| {
                let mean = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
                if full {
                    GaussianFactor::full(mean, DMatrix::identity(k, k))
                } else {
                    GaussianFactor::isotropic(mean, 1.0)
                }
            })
            .collect()
    };
    let u = draw(true);
    let v = draw(true);
    let hu = draw(false);
    let hv = draw(false);
    ModelState {
        k,
        hyper,
        u,
        v,
        hu,
        hv,
        sweeps: 0,
        seed,
    }
}
