//! Minimal triplet-form sparse matrix used for assembly.

use std::collections::HashMap;

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

/// Square matrix in coordinate form. Duplicate entries are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TripletMatrix {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Default::default()
        }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        Self {
            n,
            rows: Vec::with_capacity(nnz),
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(val);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (r, c, v) in self.iter() {
            y[r] += v * x[c];
        }
        y
    }

    /// Dense copy, row major. Intended for small systems and tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, c, v) in self.iter() {
            d[r][c] += v;
        }
        d
    }

    pub fn from_dense(d: &[Vec<f64>]) -> Self {
        let mut m = Self::new(d.len());
        for (r, row) in d.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    m.push(r, c, v);
                }
            }
        }
        m
    }

    /// Compressed column form (duplicates summed).
    pub fn to_csc(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::LinearSolveFailure(format!("cannot build sparse matrix: {e:?}")))
    }

    /// Largest `|A_ij − A_ji|` after summing duplicates.
    pub fn max_asymmetry(&self) -> f64 {
        let mut sum: HashMap<(usize, usize), f64> = HashMap::with_capacity(self.nnz());
        for (r, c, v) in self.iter() {
            *sum.entry((r, c)).or_insert(0.0) += v;
        }
        sum.iter()
            .map(|(&(r, c), &v)| (v - sum.get(&(c, r)).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }
}
