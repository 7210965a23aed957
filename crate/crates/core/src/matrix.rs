//! Symmetric matrix containers and symmetric permutations.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Symmetric matrix in coordinate form. Only the upper triangle is stored
/// (`row <= col`), sorted by `(row, col)`, with no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymMatrix {
    /// Assembles from arbitrary triples. Either triangle may be given;
    /// `(r, c)` and `(c, r)` address the same stored entry and duplicate
    /// contributions are summed. Entries summing to zero are dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange { row: r, col: c, dim });
            }
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            entries.push((r, c, v));
        }
        entries.sort_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Ok(Self { dim, entries: merged })
    }

    /// Wraps an already canonical entry list (upper triangle, strictly
    /// increasing `(row, col)`, nonzero values).
    pub fn from_sorted_upper(dim: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for e in &entries {
            if e.0 > e.1 || e.1 >= dim {
                return Err(Error::IndexOutOfRange { row: e.0, col: e.1, dim });
            }
        }
        if entries.windows(2).any(|w| (w[0].0, w[0].1) >= (w[1].0, w[1].1)) {
            return Err(Error::Domain { name: "entries", reason: "not strictly sorted" });
        }
        if entries.iter().any(|e| e.2 == 0.0) {
            return Err(Error::Domain { name: "entries", reason: "explicit zero stored" });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored upper-triangle entries.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn stored_nnz(&self) -> usize {
        self.entries.len()
    }

    /// Nonzeros of the mirror-completed matrix.
    pub fn logical_nnz(&self) -> usize {
        self.entries.iter().map(|e| if e.0 == e.1 { 1 } else { 2 }).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let key = if row <= col { (row, col) } else { (col, row) };
        self.entries.binary_search_by(|e| (e.0, e.1).cmp(&key)).map(|k| self.entries[k].2).unwrap_or(0.0)
    }

    /// Nonzero count of every row of the logical matrix.
    pub fn row_nnz(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for &(r, c, _) in &self.entries {
            counts[r] += 1;
            if r != c {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Off-diagonal positions `(r, c)` with `r < c`.
    pub fn off_diagonal_pattern(&self) -> Vec<(usize, usize)> {
        self.entries.iter().filter(|e| e.0 != e.1).map(|e| (e.0, e.1)).collect()
    }
}

/// Small dense symmetric matrix, stored once as a packed lower triangle in
/// column-major order and mirrored on read.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    dim: usize,
    packed: Vec<f64>,
}

#[inline]
pub(crate) fn packed_index(dim: usize, row: usize, col: usize) -> usize {
    debug_assert!(row >= col);
    col * dim - col * col.saturating_sub(1) / 2 + row - col
}

impl DenseSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, packed: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// From a full row-major array. Fails unless the input is exactly symmetric.
    pub fn from_rows(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: values.len() });
        }
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..=r {
                let v = values[r * dim + c];
                if v != values[c * dim + r] {
                    return Err(Error::Domain { name: "values", reason: "matrix is not symmetric" });
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row >= col { (row, col) } else { (col, row) };
        self.packed[packed_index(self.dim, r, c)]
    }

    /// Sets both `(row, col)` and `(col, row)`.
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let (r, c) = if row >= col { (row, col) } else { (col, row) };
        let k = packed_index(self.dim, r, c);
        self.packed[k] = value;
    }

    /// Packed lower triangle, column-major.
    pub fn packed_lower(&self) -> &[f64] {
        &self.packed
    }

    pub fn to_rows(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[r * self.dim + c] = self.get(r, c);
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let v = self.get(r, c);
                acc += v * v;
            }
        }
        libm::sqrt(acc)
    }

    /// Sparse view; exact zeros are dropped.
    pub fn to_sparse(&self) -> SparseSymMatrix {
        let mut entries = Vec::new();
        for r in 0..self.dim {
            for c in r..self.dim {
                let v = self.get(c, r);
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        SparseSymMatrix { dim: self.dim, entries }
    }
}

/// Bijection on `0..dim`. Applied to a matrix as `P M P^T`: index `k` of the
/// input lands at index `map[k]` of the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &k in &map {
            if k >= map.len() {
                return Err(Error::InvalidPermutation("image out of range"));
            }
            if core::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidPermutation("not injective"));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(dim: usize) -> Self {
        Self { map: (0..dim).collect() }
    }

    /// Transposition of `a` and `b`.
    pub fn swap(dim: usize, a: usize, b: usize) -> Result<Self> {
        if a >= dim || b >= dim {
            return Err(Error::InvalidPermutation("image out of range"));
        }
        let mut p = Self::identity(dim);
        p.map.swap(a, b);
        Ok(p)
    }

    /// Uniformly random permutation from a seeded ChaCha8 stream.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map: Vec<usize> = (0..dim).collect();
        map.shuffle(&mut rng);
        Self { map }
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.map[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (k, &m) in self.map.iter().enumerate() {
            inv[m] = k;
        }
        Self { map: inv }
    }

    /// `self` after `first`: `k -> self(first(k))`.
    pub fn compose(&self, first: &Permutation) -> Result<Self> {
        if self.dim() != first.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: first.dim() });
        }
        Ok(Self { map: first.map.iter().map(|&k| self.map[k]).collect() })
    }
}

/// `P M P^T`: output entry `(r, c)` equals input entry `(p^-1(r), p^-1(c))`.
pub fn apply_permutation(m: &SparseSymMatrix, p: &Permutation) -> Result<SparseSymMatrix> {
    if p.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: p.dim() });
    }
    let mut entries: Vec<(usize, usize, f64)> = m
        .entries
        .iter()
        .map(|&(r, c, v)| {
            let (a, b) = (p.apply(r), p.apply(c));
            if a <= b {
                (a, b, v)
            } else {
                (b, a, v)
            }
        })
        .collect();
    entries.sort_by_key(|t| (t.0, t.1));
    Ok(SparseSymMatrix { dim: m.dim(), entries })
}
