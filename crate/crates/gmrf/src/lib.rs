//! Estimation of high-dimensional dependence structures: adaptive Stein-type
//! covariance shrinkage, sparse precision estimation under a known
//! conditional-independence graph, Markov-order selection by penalized
//! quasi-likelihood, and AR(p) population oracles for benchmarking.
//!
//! The central routine is [`prec_sparse`]: given an `n x p` dataset, a
//! neighbourhood graph and a Markov order, it estimates each precision
//! column from the inverse of a small block-sample covariance, stabilizes
//! the blocks with adaptive shrinkage, and symmetrizes the assembled
//! estimate. The result admits a sparse Cholesky-type factorization
//! ([`SparseLdlt`]), which also powers the quasi-likelihood and AIC used by
//! [`select_markov_order`].
//!
//! Datasets are plain `ndarray::Array2<f64>` with one observation per row.

mod arp;
pub mod bench;
mod dense;
mod error;
mod factor;
mod graph;
mod io;
mod moments;
mod precision;
mod rng;
mod selection;
mod sparse;

pub use arp::{
    population_covariance_ar1, population_covariance_arp, population_precision_ar1,
    population_precision_arp, simulate_ar, simulate_mixed_effect_ar, ArProcessSpec,
    MixedEffectArSpec,
};
pub use dense::{frobenius_error, pseudo_inverse, DenseSymmetricMatrix};
pub use error::{Error, Result};
pub use factor::{is_spd, SparseLdlt};
pub use graph::{band_pattern, expand_order, neighbor_set, NeighborSet, SparsityPattern};
pub use io::{
    read_dataset_csv, read_pattern_matrix_market, read_sparse_matrix_market, write_dataset_csv,
    write_pattern_matrix_market, write_sparse_matrix_market,
};
pub use moments::{
    cov_shrink_identity, cov_shrink_spd, sample_covariance, sample_mean, shrinkage_intensity,
    trace_statistics, ShrinkageEstimate, TargetKind, TraceStatistics,
};
pub use precision::{
    conditional_expectation, prec_sparse, prec_sparse_from_covariance, precision_column,
    precision_column_from_covariance, symmetrize, PrecisionOptions,
};
pub use selection::{
    prec_aic, prec_nll, select_markov_order, OrderEvaluation, OrderSelectionTrace, StopRule,
};
pub use sparse::{SparseMatrix, SparseSymmetricMatrix};
