//! Exact log-determinants for a class of sparse Gaussian graphical models.
//!
//! The models live on the replacement product of the complete graph on `n`
//! vertices with the complete graph on `n - 1` vertices. Their `N x N`
//! information matrix (`N = n(n - 1)`) is sparse with exactly `n` nonzeros per
//! row, yet `ln det` of the covariance matrix can be evaluated in `O(n)` by
//! passing to the Fourier-dual model, whose information matrix is a diagonal
//! plus a rank-one update of size `n x n`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, benchmarks and the
//! command-line front end live in the `repdet` crate.
//!
//! ```
//! use repdet_core::{closed_form_logdet, ModelSpec};
//!
//! let spec = ModelSpec::new(4, 0.5, 2.0 / 3.0, vec![1.0, 0.5, 1.0 / 3.0, 0.25]).unwrap();
//! let log_det = closed_form_logdet(&spec).unwrap();
//! assert!((log_det + 13.35).abs() < 0.01);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod closed_form;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod sum;

pub use closed_form::{
    asymptotic_logdet_per_variable, closed_form_logdet, differential_entropy, dual_logdet, duality_residual,
    homogeneous_logdet, LogDetReport, Method,
};
pub use error::{Error, Result};
pub use graph::{
    canonical_rotation_complete, complete_graph, covariance_selection_graph, replacement_product, Graph, Rotation,
};
pub use matrix::{apply_permutation, DenseSymMatrix, Permutation, SparseSymMatrix};
pub use model::{
    build_d, build_dual_information_matrix, build_information_matrix, local_pairwise_covariance,
    local_pairwise_precision, variable_index, DiagonalVector, ModelSpec, VariableIndex,
};
pub use oracle::{cholesky, oracle_logdet, sparse_to_dense, CholeskyFactor, DEFAULT_ORACLE_CAP};
