//! Parent (hypernym) and child maps over the word index set.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fs;
use std::path::Path;

use nalgebra::DVector;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// What to do with an edge endpoint that is not in the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Append the word with count 0; it gets full model factors.
    #[default]
    ExtendVocab,
    /// Discard the edge.
    DropEdge,
}

/// A DAG over word indices. `parents` and `children` are transposes of each
/// other and both are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    dropped_edges: usize,
}

impl Taxonomy {
    /// No edges at all: every prior mean is zero.
    pub fn empty(n: usize) -> Self {
        Taxonomy {
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            dropped_edges: 0,
        }
    }

    /// Builds from `(child, parent)` index pairs, rejecting self-edges,
    /// out-of-range indices and cycles. `name` renders an index for errors.
    pub fn from_index_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        name: impl Fn(usize) -> String,
    ) -> Result<Self> {
        let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (c, p) in edges {
            if c >= n || p >= n {
                return Err(Error::InvalidConfig(format!(
                    "taxonomy edge ({c}, {p}) out of range for {n} words"
                )));
            }
            if c == p {
                return Err(Error::SelfEdge(name(c)));
            }
            parents[c].insert(p);
        }
        let parents: Vec<Vec<usize>> = parents.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let tax = Taxonomy {
            parents,
            children,
            dropped_edges: 0,
        };
        if let Some(cycle) = tax.find_cycle() {
            return Err(Error::Cycle(cycle.into_iter().map(name).collect()));
        }
        Ok(tax)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// True when no word has a parent.
    pub fn is_flat(&self) -> bool {
        self.parents.iter().all(Vec::is_empty)
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn dropped_edges(&self) -> usize {
        self.dropped_edges
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// `(child, parent)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (c, p)))
    }

    /// Grows the index set to `n` words; new words have no edges.
    pub fn resize(&mut self, n: usize) {
        assert!(n >= self.len(), "a taxonomy cannot shrink");
        self.parents.resize(n, Vec::new());
        self.children.resize(n, Vec::new());
    }

    /// Every index, children before parents, smallest index first among the
    /// currently available ones.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut pending: Vec<usize> = self.children.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &p in &self.parents[i] {
                pending[p] -= 1;
                if pending[p] == 0 {
                    ready.push(Reverse(p));
                }
            }
        }
        debug_assert_eq!(order.len(), n, "taxonomy is acyclic by construction");
        order
    }

    /// Average of the parents' means, or zero for a root.
    pub fn prior_mean<'a, F>(&self, i: usize, k: usize, mean_of: F) -> DVector<f64>
    where
        F: Fn(usize) -> &'a DVector<f64>,
    {
        let ps = &self.parents[i];
        let mut s = DVector::zeros(k);
        if ps.is_empty() {
            return s;
        }
        for &n in ps {
            s += mean_of(n);
        }
        s / ps.len() as f64
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.len();
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // Iterative DFS along child -> parent edges.
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            mark[root] = Mark::Active;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&p) = self.parents[node].get(*next) {
                    *next += 1;
                    match mark[p] {
                        Mark::New => {
                            mark[p] = Mark::Active;
                            stack.push((p, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().position(|&(x, _)| x == p).unwrap();
                            let mut cycle: Vec<usize> = stack[start..].iter().map(|&(x, _)| x).collect();
                            cycle.push(p);
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }
}

/// Resolves word edges against `vocab`, which may grow under
/// [`OovPolicy::ExtendVocab`]. The returned taxonomy covers the final
/// vocabulary.
pub fn load_taxonomy<S: AsRef<str>>(
    edges: &[(S, S)],
    vocab: &mut Vocabulary,
    policy: OovPolicy,
) -> Result<Taxonomy> {
    let mut resolved = Vec::with_capacity(edges.len());
    let mut dropped = 0;
    for (child, parent) in edges {
        let (child, parent) = (child.as_ref(), parent.as_ref());
        if child == parent {
            return Err(Error::SelfEdge(child.to_owned()));
        }
        let ids = match policy {
            OovPolicy::ExtendVocab => Some((vocab.push_unseen(child), vocab.push_unseen(parent))),
            OovPolicy::DropEdge => vocab.index_of(child).zip(vocab.index_of(parent)),
        };
        match ids {
            Some(e) => resolved.push(e),
            None => dropped += 1,
        }
    }
    let mut tax = Taxonomy::from_index_edges(vocab.len(), resolved, |i| vocab.word(i).to_owned())?;
    tax.dropped_edges = dropped;
    Ok(tax)
}

/// Parses a `child<TAB>parent` file. Blank lines and `#` comments are skipped.
pub fn read_edges(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    parse_edges(&fs::read_to_string(path)?, path)
}

pub fn parse_edges(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut edges = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(p), None) if !c.is_empty() && !p.is_empty() => {
                edges.push((c.to_owned(), p.to_owned()))
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_owned(),
                    line: n + 1,
                    message: "expected `child<TAB>parent`".into(),
                })
            }
        }
    }
    Ok(edges)
}
