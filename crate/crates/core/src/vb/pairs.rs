use crate::corpus::PairDataset;
use crate::error::{Error, Result};

use super::state::Family;

/// Counts for one pair seen from one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCount {
    pub other: u32,
    pub n_pos: u32,
    pub n_neg: u32,
}

/// CSR views of a [`PairDataset`], by center (`i`) and by context (`j`).
#[derive(Debug, Clone)]
pub struct PairIndex {
    n: usize,
    row_offsets: Vec<usize>,
    rows: Vec<PairCount>,
    col_offsets: Vec<usize>,
    cols: Vec<PairCount>,
}

impl PairIndex {
    pub fn new(pairs: &PairDataset, n: usize) -> Result<Self> {
        if pairs.index_bound() > n {
            return Err(Error::InvalidConfig(format!(
                "pair dataset references index {} but the model has {n} words",
                pairs.index_bound() - 1
            )));
        }
        let records = pairs.records();
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_offsets = vec![0usize; n + 1];
        for r in records {
            row_offsets[r.i as usize + 1] += 1;
            col_offsets[r.j as usize + 1] += 1;
        }
        for x in 0..n {
            row_offsets[x + 1] += row_offsets[x];
            col_offsets[x + 1] += col_offsets[x];
        }
        // Records are sorted by (i, j), so rows come out sorted by j and
        // columns by i.
        let rows = records
            .iter()
            .map(|r| PairCount {
                other: r.j,
                n_pos: r.n_pos,
                n_neg: r.n_neg,
            })
            .collect();
        let mut cols = vec![
            PairCount {
                other: 0,
                n_pos: 0,
                n_neg: 0
            };
            records.len()
        ];
        let mut fill = col_offsets.clone();
        for r in records {
            let slot = &mut fill[r.j as usize];
            cols[*slot] = PairCount {
                other: r.i,
                n_pos: r.n_pos,
                n_neg: r.n_neg,
            };
            *slot += 1;
        }
        Ok(PairIndex {
            n,
            row_offsets,
            rows,
            col_offsets,
            cols,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Pairs `(i, j)` for center `i`.
    pub fn row(&self, i: usize) -> &[PairCount] {
        &self.rows[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    /// Pairs `(i, j)` for context `j`.
    pub fn col(&self, j: usize) -> &[PairCount] {
        &self.cols[self.col_offsets[j]..self.col_offsets[j + 1]]
    }

    /// The likelihood partners of a leaf factor.
    pub fn partners(&self, family: Family, i: usize) -> &[PairCount] {
        match family {
            Family::U => self.row(i),
            Family::V => self.col(i),
            Family::Hu | Family::Hv => &[],
        }
    }
}
