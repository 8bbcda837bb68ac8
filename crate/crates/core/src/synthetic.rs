//! Planted-structure corpora for tests and demos.
//!
//! Leaf words belong to groups, groups to supergroups. Group and supergroup
//! names never occur in the text; they only appear as taxonomy parents.

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{weighted::WeightedIndex, Distribution};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::SimilarityDataset;
use crate::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub supergroups: usize,
    pub groups_per_super: usize,
    pub words_per_group: usize,
    pub tokens: usize,
    pub sentence_len: usize,
    /// Zipf exponent of word frequencies within a group.
    pub zipf: f64,
    /// Chance a token is drawn from the sentence's group.
    pub p_group: f64,
    /// Chance a token is drawn from a sibling group in the same supergroup.
    pub p_super: f64,
    pub gold_pairs: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    /// 180 leaves, 15 groups and 5 supergroups: 200 words once the parents
    /// are added to the vocabulary.
    fn default() -> Self {
        SyntheticConfig {
            supergroups: 5,
            groups_per_super: 3,
            words_per_group: 12,
            tokens: 5000,
            sentence_len: 10,
            zipf: 1.1,
            p_group: 0.7,
            p_super: 0.15,
            gold_pairs: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// `(child, parent)`: leaf to group and group to supergroup.
    pub edges: Vec<(String, String)>,
    /// Leaf pairs scored 2 (same group), 1 (same supergroup) or 0.
    pub gold: SimilarityDataset,
    pub leaves: Vec<String>,
    /// Group index of every leaf, aligned with `leaves`.
    pub group_of: Vec<usize>,
}

pub fn leaf_name(group: usize, member: usize) -> String {
    format!("w{group}_{member}")
}

pub fn group_name(group: usize) -> String {
    format!("G{group}")
}

pub fn supergroup_name(s: usize) -> String {
    format!("S{s}")
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    let c = config;
    if c.supergroups == 0 || c.groups_per_super == 0 || c.words_per_group == 0 || c.sentence_len == 0 {
        return Err(Error::InvalidConfig("synthetic corpus sizes must be positive".into()));
    }
    if !(c.p_group >= 0.0 && c.p_super >= 0.0 && c.p_group + c.p_super <= 1.0) {
        return Err(Error::InvalidConfig("p_group + p_super must lie in [0, 1]".into()));
    }
    let n_groups = c.supergroups * c.groups_per_super;
    let super_of = |g: usize| g / c.groups_per_super;
    let mut rng = seeded_rng(c.seed);

    let mut leaves = Vec::new();
    let mut group_of = Vec::new();
    let mut edges = Vec::new();
    for g in 0..n_groups {
        for m in 0..c.words_per_group {
            leaves.push(leaf_name(g, m));
            group_of.push(g);
            edges.push((leaf_name(g, m), group_name(g)));
        }
        edges.push((group_name(g), supergroup_name(super_of(g))));
    }

    let zipf: Vec<f64> = (1..=c.words_per_group).map(|r| (r as f64).powf(-c.zipf)).collect();
    let within = WeightedIndex::new(&zipf).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let word = |g: usize, rng: &mut crate::Rng| leaf_name(g, within.sample(rng));

    let mut sentences = Vec::new();
    let mut produced = 0;
    while produced < c.tokens {
        let g = rng.random_range(0..n_groups);
        let len = c.sentence_len.min(c.tokens - produced);
        let mut sentence = Vec::with_capacity(len);
        for _ in 0..len {
            let r: f64 = rng.random();
            let from = if r < c.p_group {
                g
            } else if r < c.p_group + c.p_super && c.groups_per_super > 1 {
                let s = super_of(g);
                let mut h = s * c.groups_per_super + rng.random_range(0..c.groups_per_super - 1);
                if h >= g {
                    h += 1;
                }
                h
            } else {
                rng.random_range(0..n_groups)
            };
            sentence.push(word(from, &mut rng));
        }
        produced += len;
        sentences.push(sentence);
    }

    let mut pairs = Vec::with_capacity(c.gold_pairs);
    if leaves.len() >= 2 {
        for n in 0..c.gold_pairs {
            let a = rng.random_range(0..leaves.len());
            // Cycle through the three relations so each score is represented.
            let b = match n % 3 {
                0 => group_of[a] * c.words_per_group + rng.random_range(0..c.words_per_group),
                1 => super_of(group_of[a]) * c.groups_per_super * c.words_per_group
                    + rng.random_range(0..c.groups_per_super * c.words_per_group),
                _ => rng.random_range(0..leaves.len()),
            };
            if a == b {
                continue;
            }
            let score = if group_of[a] == group_of[b] {
                2.0
            } else if super_of(group_of[a]) == super_of(group_of[b]) {
                1.0
            } else {
                0.0
            };
            pairs.push((leaves[a].clone(), leaves[b].clone(), score));
        }
    }

    Ok(SyntheticCorpus {
        corpus: Corpus { sentences },
        edges,
        gold: SimilarityDataset {
            name: "planted".into(),
            pairs,
            path: PathBuf::from("synthetic"),
        },
        leaves,
        group_of,
    })
}

/// A word that never occurs, a sibling that does, and a parent that never
/// occurs, plus unrelated control words with their own contexts.
#[derive(Debug, Clone)]
pub struct AnodeScenario {
    pub corpus: Corpus,
    pub edges: Vec<(String, String)>,
    pub absent: String,
    pub sibling: String,
    pub parent: String,
    pub controls: Vec<String>,
}

pub fn anode_scenario(controls: usize, sibling_count: usize, seed: u64) -> AnodeScenario {
    let mut rng = seeded_rng(seed);
    let topic_words = 8;
    let context = 6;
    let topic = |t: usize| (0..topic_words).map(|m| format!("t{t}_{m}")).collect::<Vec<_>>();
    let sibling = "cathode".to_string();
    let control_names: Vec<String> = (0..controls).map(|c| format!("control{c}")).collect();

    let mut sentences = Vec::new();
    for (t, centre) in std::iter::once(&sibling).chain(&control_names).enumerate() {
        let words = topic(t);
        for _ in 0..sibling_count {
            let mut s: Vec<String> = (0..context).map(|_| words.choose(&mut rng).unwrap().clone()).collect();
            let at = rng.random_range(0..=s.len());
            s.insert(at, centre.clone());
            sentences.push(s);
        }
    }
    AnodeScenario {
        corpus: Corpus { sentences },
        edges: vec![("anode".into(), "electrode".into()), (sibling.clone(), "electrode".into())],
        absent: "anode".into(),
        sibling,
        parent: "electrode".into(),
        controls: control_names,
    }
}
