//! Dense Cholesky ground truth.
//!
//! Independent of the closed form: it only sees assembled matrix entries.
//! Cost is `O(dim^3)`, so sparse inputs are densified only below a cap.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{packed_index, DenseSymMatrix, SparseSymMatrix};

/// Largest dimension [`sparse_to_dense`] accepts unless told otherwise.
pub const DEFAULT_ORACLE_CAP: usize = 5000;

/// Lower-triangular factor `L` with `L L^T = M`, packed column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L[row][col]`, zero above the diagonal.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row < col {
            0.0
        } else {
            self.lower[packed_index(self.dim, row, col)]
        }
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim).map(move |k| self.lower[packed_index(self.dim, k, k)])
    }

    /// `ln det(M) = 2 sum_k ln L[k][k]`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.diagonal().map(libm::log).sum::<f64>()
    }

    /// `||L L^T - M||_F / ||M||_F`.
    pub fn relative_residual(&self, m: &DenseSymMatrix) -> f64 {
        let mut err = 0.0;
        for r in 0..self.dim {
            for c in 0..=r {
                let dot: f64 = (0..=c).map(|k| self.get(r, k) * self.get(c, k)).sum();
                let e = dot - m.get(r, c);
                err += if r == c { e * e } else { 2.0 * e * e };
            }
        }
        libm::sqrt(err) / m.frobenius_norm()
    }
}

/// Unpivoted left-looking Cholesky factorization.
///
/// Fails with [`Error::NotPositiveDefinite`] at the first pivot that is not
/// strictly positive and finite.
pub fn cholesky(m: &DenseSymMatrix) -> Result<CholeskyFactor> {
    let dim = m.dim();
    let mut lower = m.packed_lower().to_vec();
    let col_start = |c: usize| packed_index(dim, c, c);

    for j in 0..dim {
        let sj = col_start(j);
        let len = dim - j;
        for k in 0..j {
            let sk = col_start(k) + (j - k);
            let ljk = lower[sk];
            if ljk == 0.0 {
                continue;
            }
            let (head, tail) = lower.split_at_mut(sj);
            let src = &head[sk..sk + len];
            for (dst, &s) in tail[..len].iter_mut().zip(src) {
                *dst -= ljk * s;
            }
        }
        let pivot = lower[sj];
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(Error::NotPositiveDefinite { row: j });
        }
        let d = libm::sqrt(pivot);
        lower[sj] = d;
        let inv = 1.0 / d;
        for v in &mut lower[sj + 1..sj + len] {
            *v *= inv;
        }
    }
    Ok(CholeskyFactor { dim, lower })
}

/// `ln det(M)` of a symmetric positive definite matrix.
pub fn oracle_logdet(m: &DenseSymMatrix) -> Result<f64> {
    cholesky(m).map(|f| f.log_det())
}

/// Mirror-completed dense copy. Refuses dimensions above `cap`.
pub fn sparse_to_dense(m: &SparseSymMatrix, cap: usize) -> Result<DenseSymMatrix> {
    if m.dim() > cap {
        return Err(Error::OracleCapExceeded { dim: m.dim(), cap });
    }
    let mut dense = DenseSymMatrix::zeros(m.dim());
    for &(r, c, v) in m.entries() {
        dense.set(r, c, v);
    }
    Ok(dense)
}
