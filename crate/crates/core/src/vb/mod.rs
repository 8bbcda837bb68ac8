//! Full-batch variational Bayes over the four factor families.

mod bound;
mod elbo;
mod factor;
mod pairs;
mod state;
mod train;
mod update;

pub use bound::{jj_bound, lambda, second_moment_of_dot, xi, XiMode};
pub use elbo::{elbo, elbo_terms, ElboTerms};
pub use factor::{expected_outer, Covariance, GaussianFactor};
pub use pairs::{PairCount, PairIndex};
pub use state::{init_state, Family, Hyperparams, ModelState, ParentSchedule, TrainConfig};
pub use train::{sweep, train, train_with_resampling, update_family, TrainReport, SWEEP_ORDER};
pub use update::{update_leaf, update_parent};
