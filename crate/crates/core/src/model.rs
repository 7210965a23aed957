//! Model parameters and assembly of the primal and dual information matrices.
//!
//! A model on `n` clouds has one variable `x_ij` per ordered pair `i != j`.
//! Cloud `i` carries a zero-sum constraint `y_i = -sum_j x_ij` with a unary
//! Gaussian factor of variance `s_i^2` on `y_i`, and every pair `{i, j}`
//! carries a bivariate Gaussian factor on `(x_ij, x_ji)` with variance
//! `sigma^2` and correlation `rho`. Eliminating the `y_i` leaves an
//! `N x N` information matrix, `N = n(n - 1)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::graph::complete_port_rank;
use crate::matrix::{DenseSymMatrix, SparseSymMatrix};

/// Parameters of one model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    n: usize,
    rho: f64,
    sigma_sq: f64,
    s_sq: Vec<f64>,
}

pub(crate) fn check_pairwise(rho: f64, sigma_sq: f64) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(domain("rho", "must lie strictly between -1 and 1"));
    }
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(domain("sigma_sq", "must be positive and finite"));
    }
    Ok(())
}

impl ModelSpec {
    pub fn new(n: usize, rho: f64, sigma_sq: f64, s_sq: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(domain("n", "need at least 2 clouds"));
        }
        check_pairwise(rho, sigma_sq)?;
        if s_sq.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s_sq.len() });
        }
        if !s_sq.iter().all(|&s| s > 0.0 && s.is_finite()) {
            return Err(domain("s_sq", "every unary variance must be positive and finite"));
        }
        Ok(Self { n, rho, sigma_sq, s_sq })
    }

    /// Model with the same unary variance on every cloud.
    pub fn homogeneous(n: usize, rho: f64, sigma_sq: f64, s_sq: f64) -> Result<Self> {
        Self::new(n, rho, sigma_sq, vec![s_sq; n])
    }

    /// Random valid model: `rho` uniform in `[-0.9, 0.9]`, `sigma^2` and
    /// every `s_i^2` log-uniform in `[0.1, 10]`.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let log_uniform = |rng: &mut R| libm::exp(rng.random_range(libm::log(0.1)..=libm::log(10.0)));
        let rho = rng.random_range(-0.9..=0.9);
        let sigma_sq = log_uniform(rng);
        let s_sq = (0..n).map(|_| log_uniform(rng)).collect();
        Self::new(n, rho, sigma_sq, s_sq)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn s_sq(&self) -> &[f64] {
        &self.s_sq
    }

    /// Number of primal variables, `n(n - 1)`.
    pub fn dim(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Number of pairwise factors (edges of the complete graph), `n(n - 1) / 2`.
    pub fn edge_count(&self) -> usize {
        self.dim() / 2
    }

    pub fn is_homogeneous(&self) -> bool {
        self.s_sq.iter().all(|&s| s == self.s_sq[0])
    }

    /// Returns a copy with one cloud's unary variance replaced.
    pub fn with_s_sq(&self, cloud: usize, value: f64) -> Result<Self> {
        let mut s_sq = self.s_sq.clone();
        *s_sq.get_mut(cloud).ok_or(Error::IndexOutOfRange { row: cloud, col: 0, dim: self.n })? = value;
        Self::new(self.n, self.rho, self.sigma_sq, s_sq)
    }
}

/// Position of variable `x_ij` in the flat ordering (clouds ascending, ports
/// ascending within a cloud). `i` and `j` are 1-based, `flat` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableIndex {
    pub i: usize,
    pub j: usize,
    pub flat: usize,
}

impl VariableIndex {
    /// Inverse lookup from a flat index.
    pub fn from_flat(n: usize, flat: usize) -> Result<Self> {
        if n < 2 || flat >= n * (n - 1) {
            return Err(Error::IndexOutOfRange { row: flat, col: 0, dim: n * (n - 1) });
        }
        let i0 = flat / (n - 1);
        let j0 = crate::graph::complete_port_label(i0, flat % (n - 1));
        Ok(Self { i: i0 + 1, j: j0 + 1, flat })
    }

    /// Flat index of the partner variable `x_ji`.
    pub fn partner(&self, n: usize) -> usize {
        flat_index(n, self.j - 1, self.i - 1)
    }
}

#[inline]
fn flat_index(n: usize, i0: usize, j0: usize) -> usize {
    i0 * (n - 1) + complete_port_rank(i0, j0)
}

/// Flat index of `x_ij` for 1-based cloud `i` and port `j`.
pub fn variable_index(spec: &ModelSpec, i: usize, j: usize) -> Result<VariableIndex> {
    let n = spec.n();
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange { row: i, col: j, dim: n });
    }
    if i == j {
        return Err(domain("j", "port must differ from its cloud"));
    }
    Ok(VariableIndex { i, j, flat: flat_index(n, i - 1, j - 1) })
}

/// `K^-1`: the 2x2 information matrix of one pairwise factor.
pub fn local_pairwise_precision(rho: f64, sigma_sq: f64) -> Result<DenseSymMatrix> {
    check_pairwise(rho, sigma_sq)?;
    let scale = 1.0 / (1.0 - rho * rho);
    let mut m = DenseSymMatrix::zeros(2);
    m.set(0, 0, scale / sigma_sq);
    m.set(1, 1, scale / sigma_sq);
    m.set(0, 1, -scale * rho / sigma_sq);
    Ok(m)
}

/// `K`: the 2x2 covariance of one pairwise factor.
pub fn local_pairwise_covariance(rho: f64, sigma_sq: f64) -> Result<DenseSymMatrix> {
    check_pairwise(rho, sigma_sq)?;
    let mut m = DenseSymMatrix::zeros(2);
    m.set(0, 0, sigma_sq);
    m.set(1, 1, sigma_sq);
    m.set(0, 1, rho * sigma_sq);
    Ok(m)
}

/// Primal information matrix `1/((1 - rho^2) sigma^2) I_N + A`.
///
/// Block `(i, i)` of `A` is `J_{n-1} / s_i^2`; block `(i, j)` holds a single
/// entry `-rho / ((1 - rho^2) sigma^2)` coupling `x_ij` with `x_ji`.
pub fn build_information_matrix(spec: &ModelSpec) -> SparseSymMatrix {
    let n = spec.n();
    let m = n - 1;
    let denom = (1.0 - spec.rho() * spec.rho()) * spec.sigma_sq();
    let diag_shift = 1.0 / denom;
    let coupling = -spec.rho() / denom;

    let mut entries = Vec::with_capacity(n * m * (m + 1) / 2 + n * m / 2);
    for i in 0..n {
        let unary = 1.0 / spec.s_sq()[i];
        for a in 0..m {
            let row = i * m + a;
            entries.push((row, row, diag_shift + unary));
            // Same-cloud columns ahead of the partner column keep rows sorted.
            let partner = {
                let j = crate::graph::complete_port_label(i, a);
                (j > i).then(|| flat_index(n, j, i))
            };
            for b in a + 1..m {
                entries.push((row, i * m + b, unary));
            }
            if let Some(col) = partner {
                if coupling != 0.0 {
                    entries.push((row, col, coupling));
                }
            }
        }
    }
    SparseSymMatrix::from_sorted_upper(spec.dim(), entries).expect("assembly emits canonical upper-triangle entries")
}

/// Diagonal part `D` of the dual information matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalVector(Vec<f64>);

impl DiagonalVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `D[i] = s_i^2 + (n - rho - 1) sigma^2`.
pub fn build_d(spec: &ModelSpec) -> DiagonalVector {
    let shift = (spec.n() as f64 - 1.0 - spec.rho()) * spec.sigma_sq();
    DiagonalVector(spec.s_sq().iter().map(|&s| s + shift).collect())
}

/// Dual `n x n` information matrix `D + rho sigma^2 J_n`: diagonal
/// `s_i^2 + (n - 1) sigma^2`, off-diagonal `rho sigma^2`.
pub fn build_dual_information_matrix(spec: &ModelSpec) -> DenseSymMatrix {
    let n = spec.n();
    let coupling = spec.rho() * spec.sigma_sq();
    let d = build_d(spec);
    let mut m = DenseSymMatrix::zeros(n);
    for r in 0..n {
        m.set(r, r, d.as_slice()[r] + coupling);
        for c in 0..r {
            m.set(r, c, coupling);
        }
    }
    m
}
