//! Gaussian word embeddings learned by full-batch variational Bayes, with
//! hierarchical priors drawn from a word taxonomy.
//!
//! The pipeline is:
//!
//! 1. [`corpus`] turns plain text into a [`Vocabulary`] and an aggregated
//!    positive/negative [`PairDataset`].
//! 2. [`taxonomy`] loads `child -> parent` edges into a validated DAG.
//! 3. [`vb`] runs coordinate-ascent variational inference over four families
//!    of Gaussian factors (context and target leaves, plus their parent
//!    representations) using the Jaakkola-Jordan logistic bound.
//! 4. [`predictive`] scores word pairs with the posterior predictive.
//! 5. [`eval`] computes Spearman correlations against human similarity
//!    judgements.
//!
//! [`sgns`] is the point-estimate skip-gram baseline trained on the same pairs,
//! and [`persist`] holds the binary model and pair-cache formats.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod persist;
pub mod predictive;
pub mod sgns;
pub mod synthetic;
pub mod taxonomy;
pub mod vb;

mod math;

pub use corpus::{Corpus, NegativeTable, PairDataset, PairRecord, SamplerConfig, Vocabulary};
pub use error::{Error, Result};
pub use taxonomy::{OovPolicy, Taxonomy};
pub use vb::{
    Covariance, Family, GaussianFactor, Hyperparams, ModelState, TrainConfig, TrainReport, XiMode,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The one RNG used everywhere a seed is accepted.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
