//! The sweep loop: parent and leaf families in turn until the bound stops
//! moving.

use crate::corpus::{NegativeTable, PairDataset};
use crate::error::{Error, Result};
use crate::taxonomy::Taxonomy;

use super::elbo::elbo;
use super::factor::GaussianFactor;
use super::pairs::PairIndex;
use super::state::{Family, ModelState, ParentSchedule, TrainConfig};
use super::update::{leaf_update_with, update_parent, SecondMoments};

/// Families in sweep order.
pub const SWEEP_ORDER: [Family; 4] = [Family::Hu, Family::U, Family::Hv, Family::V];

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Bound of the state handed to [`train`].
    pub initial_elbo: f64,
    /// Bound after each completed sweep.
    pub elbo_trace: Vec<f64>,
    pub converged: bool,
}

impl TrainReport {
    pub fn final_elbo(&self) -> f64 {
        self.elbo_trace.last().copied().unwrap_or(self.initial_elbo)
    }
}

/// Coordinate ascent until the relative change of the bound drops below
/// `config.rel_elbo_tol` or `config.max_sweeps` sweeps have run.
pub fn train(
    state: &mut ModelState,
    pairs: &PairDataset,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
) -> Result<TrainReport> {
    run(state, pairs, taxonomy, config, None)
}

/// Like [`train`], but draws a fresh set of negatives before every sweep
/// after the first. The bound is then no longer monotone across sweeps.
pub fn train_with_resampling(
    state: &mut ModelState,
    pairs: &PairDataset,
    table: &NegativeTable,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
) -> Result<TrainReport> {
    run(state, pairs, taxonomy, config, Some(table))
}

fn run(
    state: &mut ModelState,
    pairs: &PairDataset,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
    resample: Option<&NegativeTable>,
) -> Result<TrainReport> {
    config.validate()?;
    state.validate()?;
    if state.k != config.k {
        return Err(Error::InvalidConfig(format!(
            "state has k = {} but the config asks for {}",
            state.k, config.k
        )));
    }
    if taxonomy.len() != state.len() {
        return Err(Error::InvalidConfig(format!(
            "taxonomy covers {} words, state has {}",
            taxonomy.len(),
            state.len()
        )));
    }
    let order = taxonomy.topological_order();
    let mut current = pairs.clone();
    let mut index = PairIndex::new(&current, state.len())?;
    let initial_elbo = elbo(state, &current, taxonomy, config.xi_mode)?;
    let mut trace = Vec::with_capacity(config.max_sweeps);
    let mut previous = initial_elbo;
    let mut converged = false;
    for sweep_no in 0..config.max_sweeps {
        if let (Some(table), true) = (resample, sweep_no > 0) {
            current.resample_negatives(table, config.seed.wrapping_add(sweep_no as u64));
            index = PairIndex::new(&current, state.len())?;
        }
        sweep_ordered(state, &index, taxonomy, config, &order)?;
        let value = elbo(state, &current, taxonomy, config.xi_mode)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("ELBO after sweep {}", state.sweeps)));
        }
        trace.push(value);
        let delta = (value - previous).abs();
        previous = value;
        if delta == 0.0 || delta < config.rel_elbo_tol * value.abs() {
            converged = true;
            break;
        }
    }
    Ok(TrainReport {
        initial_elbo,
        elbo_trace: trace,
        converged,
    })
}

/// One full sweep: Hu, U, Hv, V.
pub fn sweep(state: &mut ModelState, index: &PairIndex, taxonomy: &Taxonomy, config: &TrainConfig) -> Result<()> {
    sweep_ordered(state, index, taxonomy, config, &taxonomy.topological_order())
}

fn sweep_ordered(
    state: &mut ModelState,
    index: &PairIndex,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
    order: &[usize],
) -> Result<()> {
    for family in SWEEP_ORDER {
        if family.is_leaf() {
            update_leaf_family(state, family, index, taxonomy, config)?;
        } else {
            update_parent_family(state, family, taxonomy, config.parent_schedule, order);
        }
    }
    state.sweeps += 1;
    Ok(())
}

/// Updates every factor of one family in place.
pub fn update_family(
    state: &mut ModelState,
    family: Family,
    index: &PairIndex,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
) -> Result<()> {
    if family.is_leaf() {
        update_leaf_family(state, family, index, taxonomy, config)
    } else {
        let order = taxonomy.topological_order();
        update_parent_family(state, family, taxonomy, config.parent_schedule, &order);
        Ok(())
    }
}

/// Leaves of one family are conditionally independent given the other
/// families, so updating them all from the same snapshot is exact.
fn update_leaf_family(
    state: &mut ModelState,
    family: Family,
    index: &PairIndex,
    taxonomy: &Taxonomy,
    config: &TrainConfig,
) -> Result<()> {
    let moments = SecondMoments::of(state.family(family.opposite()), state.k);
    let snapshot: &ModelState = state;
    let one = |i: usize| -> Result<GaussianFactor> {
        let partners = index.partners(family, i);
        leaf_update_with(i, family, snapshot, partners, taxonomy, config.xi_mode, |n| {
            moments.get(partners[n].other as usize)
        })
    };
    #[cfg(feature = "parallel")]
    let updated: Result<Vec<GaussianFactor>> = {
        use rayon::prelude::*;
        (0..snapshot.len()).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let updated: Result<Vec<GaussianFactor>> = (0..snapshot.len()).map(one).collect();
    *state.family_mut(family) = updated?;
    Ok(())
}

fn update_parent_family(
    state: &mut ModelState,
    family: Family,
    taxonomy: &Taxonomy,
    schedule: ParentSchedule,
    order: &[usize],
) {
    match schedule {
        ParentSchedule::Sequential => {
            for &i in order {
                let q = update_parent(i, family, state, taxonomy);
                state.family_mut(family)[i] = q;
            }
        }
        ParentSchedule::Jacobi => {
            let updated: Vec<GaussianFactor> =
                (0..state.len()).map(|i| update_parent(i, family, state, taxonomy)).collect();
            *state.family_mut(family) = updated;
        }
    }
}
