//! Gaussian quasi-likelihood evaluation, AIC penalization, and Markov-order
//! search.
//!
//! The average Gaussian negative quasi-likelihood of a precision estimate is
//! `(tr(S L) - log|L|) / 2`, with the trace accumulated over the sparse
//! support only and the log-determinant taken from a sparse LDL^T
//! factorization. The AIC penalty `(nnz + p) / (2n)` counts the free
//! parameters of a symmetric sparse precision (half the stored entries plus
//! half the diagonal) scaled for the average likelihood.

use ndarray::Array2;

use crate::dense::DenseSymmetricMatrix;
use crate::error::{Error, Result};
use crate::factor::SparseLdlt;
use crate::graph::SparsityPattern;
use crate::moments::sample_covariance;
use crate::precision::{prec_sparse, PrecisionOptions};
use crate::sparse::SparseSymmetricMatrix;

/// Stopping rule of [`select_markov_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Evaluate every order up to the maximum and pick the AIC minimizer;
    /// ties break towards the smaller order.
    Exhaustive,
    /// Stop at the first order whose AIC exceeds its predecessor's and select
    /// the predecessor.
    FirstRise,
}

/// One evaluated order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEvaluation {
    pub order: usize,
    pub nll: f64,
    pub aic: f64,
}

/// Outcome of the Markov-order search.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSelectionTrace {
    /// Successfully evaluated orders, ascending.
    pub evaluations: Vec<OrderEvaluation>,
    /// Orders whose estimate admitted no SPD factorization; they are excluded
    /// from selection rather than assigned an infinite score.
    pub skipped: Vec<usize>,
    /// Selected order.
    pub selected: usize,
}

fn nll_from_cov(s: &DenseSymmetricMatrix, prec: &SparseSymmetricMatrix) -> Result<f64> {
    if s.dim() != prec.dim() {
        return Err(Error::InvalidArgument(format!(
            "precision dimension {} does not match data dimension {}",
            prec.dim(),
            s.dim()
        )));
    }
    let trace: f64 = prec.iter().map(|(i, j, v)| v * s.get(i, j)).sum();
    let log_det = SparseLdlt::factor(prec)?.log_det();
    Ok(0.5 * (trace - log_det))
}

/// Average Gaussian negative quasi-likelihood `(tr(S L) - log|L|) / 2`.
///
/// Fails with [`Error::NotPositiveDefinite`] when the precision admits no SPD
/// factorization.
pub fn prec_nll(x: &Array2<f64>, prec: &SparseSymmetricMatrix) -> Result<f64> {
    let s = sample_covariance(x)?;
    nll_from_cov(&s, prec)
}

fn aic_penalty(prec: &SparseSymmetricMatrix, n: usize) -> f64 {
    (prec.nnz() + prec.dim()) as f64 / (2.0 * n as f64)
}

/// Penalized quasi average likelihood: [`prec_nll`] plus `(nnz + p) / (2n)`,
/// where `nnz` counts stored entries of both triangles plus the diagonal.
pub fn prec_aic(x: &Array2<f64>, prec: &SparseSymmetricMatrix) -> Result<f64> {
    Ok(prec_nll(x, prec)? + aic_penalty(prec, x.nrows()))
}

/// Searches Markov orders `0..=max_order` for the best AIC, estimating each
/// order's precision with shrinkage and symmetrization on.
///
/// Orders whose estimate fails the SPD factorization are recorded in
/// `skipped` and never selected. With [`StopRule::FirstRise`] the search
/// stops right after the first AIC increase between consecutive successful
/// evaluations.
pub fn select_markov_order(
    x: &Array2<f64>,
    g: &SparsityPattern,
    max_order: usize,
    rule: StopRule,
) -> Result<OrderSelectionTrace> {
    let s = sample_covariance(x)?;
    let n = x.nrows();
    let mut evaluations: Vec<OrderEvaluation> = Vec::new();
    let mut skipped = Vec::new();

    for order in 0..=max_order {
        let opts = PrecisionOptions {
            markov_order: order,
            shrinkage: true,
            symmetrize: true,
        };
        let estimate = prec_sparse(x, g, &opts)?;
        let sym = SparseSymmetricMatrix::try_from_sparse(estimate)
            .expect("symmetrized estimate is symmetric by construction");
        let nll = match nll_from_cov(&s, &sym) {
            Ok(v) => v,
            Err(Error::NotPositiveDefinite(_)) => {
                skipped.push(order);
                continue;
            }
            Err(e) => return Err(e),
        };
        let aic = nll + aic_penalty(&sym, n);
        let rose = evaluations.last().is_some_and(|prev| aic > prev.aic);
        evaluations.push(OrderEvaluation { order, nll, aic });
        if rule == StopRule::FirstRise && rose {
            break;
        }
    }

    let best = evaluations
        .iter()
        .min_by(|a, b| a.aic.partial_cmp(&b.aic).expect("AIC values are finite"))
        .ok_or_else(|| {
            Error::NotPositiveDefinite(
                "no Markov order produced an SPD precision estimate".into(),
            )
        })?;
    Ok(OrderSelectionTrace {
        selected: best.order,
        evaluations,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arp::{population_precision_ar1, simulate_ar, ArProcessSpec};
    use crate::graph::band_pattern;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    /// Data whose sample covariance is the identity up to rounding: scaled
    /// columns of an orthogonal +-1 design with zero column sums.
    fn near_identity_data() -> Array2<f64> {
        let h: [[f64; 4]; 8] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
            [-1.0, -1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0, 1.0],
            [-1.0, -1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0, -1.0],
        ];
        let scale = (7.0f64 / 8.0).sqrt();
        Array2::from_shape_fn((8, 4), |(i, j)| h[i][j] * scale)
    }

    #[test]
    fn nll_of_identity_precision_under_identity_covariance() {
        let x = near_identity_data();
        let eye = SparseSymmetricMatrix::from_diagonal(&[1.0; 4]).unwrap();
        let nll = prec_nll(&x, &eye).unwrap();
        assert_close(nll, 2.0, 1e-12);
    }

    #[test]
    fn nll_scalar_calculus_check() {
        // Dimension 1: nll(c) = (s c - ln c) / 2, minimized at c = 1/s.
        let x = ndarray::array![[1.0], [-1.0], [1.0], [-1.0]];
        let s = sample_covariance(&x).unwrap().get(0, 0);
        assert_close(s, 4.0 / 3.0, 1e-15);
        let f = |c: f64| {
            let m = SparseSymmetricMatrix::from_diagonal(&[c]).unwrap();
            prec_nll(&x, &m).unwrap()
        };
        assert_close(f(1.0), 0.5 * s, 1e-12);
        let copt = 1.0 / s;
        assert!(f(copt) < f(copt * 1.2) && f(copt) < f(copt * 0.8));
    }

    #[test]
    fn nll_rejects_non_spd_precision() {
        let x = near_identity_data();
        let bad = SparseSymmetricMatrix::from_lower_triplets(
            4,
            vec![(0, 0, 1.0), (1, 0, 5.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            prec_nll(&x, &bad),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn aic_adds_exact_penalty() {
        let x = near_identity_data();
        let eye = SparseSymmetricMatrix::from_diagonal(&[1.0; 4]).unwrap();
        let nll = prec_nll(&x, &eye).unwrap();
        let aic = prec_aic(&x, &eye).unwrap();
        // nnz = 4, p = 4, n = 8
        assert_eq!(aic, nll + 8.0 / 16.0);
    }

    #[test]
    fn aic_penalty_counts_band_entries() {
        let prec = population_precision_ar1(0.5, 100).unwrap();
        assert_eq!(prec.nnz(), 298);
        assert_close(aic_penalty(&prec, 50), (298.0 + 100.0) / 100.0, 1e-15);
    }

    #[test]
    fn trace_term_of_reciprocal_variance_diagonal_is_p() {
        let spec = ArProcessSpec::new(vec![0.5], 6);
        let x = simulate_ar(&spec, 40, 11).unwrap();
        let s = sample_covariance(&x).unwrap();
        let diag: Vec<f64> = (0..6).map(|j| 1.0 / s.get(j, j)).collect();
        let prec = SparseSymmetricMatrix::from_diagonal(&diag).unwrap();
        let trace: f64 = prec.iter().map(|(i, j, v)| v * s.get(i, j)).sum();
        assert_close(trace, 6.0, 1e-12);
    }

    #[test]
    fn nll_permutation_invariant() {
        let spec = ArProcessSpec::new(vec![0.7], 5);
        let x = simulate_ar(&spec, 30, 2).unwrap();
        let prec = population_precision_ar1(0.7, 5).unwrap();
        let nll = prec_nll(&x, &prec).unwrap();

        let perm: Vec<usize> = vec![4, 2, 0, 1, 3];
        let xp = x.select(ndarray::Axis(1), &perm);
        let mut triplets = Vec::new();
        for a in 0..5 {
            for b in 0..=a {
                let v = prec.get(perm[a], perm[b]);
                if v != 0.0 {
                    triplets.push((a, b, v));
                }
            }
        }
        let prec_p = SparseSymmetricMatrix::from_lower_triplets(5, triplets).unwrap();
        let nll_p = prec_nll(&xp, &prec_p).unwrap();
        assert_close(nll, nll_p, 1e-12);
    }

    #[test]
    fn select_order_zero_max_is_forced() {
        let spec = ArProcessSpec::new(vec![0.5], 8);
        let x = simulate_ar(&spec, 50, 4).unwrap();
        let g = band_pattern(8, 1).unwrap();
        let trace = select_markov_order(&x, &g, 0, StopRule::Exhaustive).unwrap();
        assert_eq!(trace.evaluations.len(), 1);
        assert_eq!(trace.selected, 0);
    }

    #[test]
    fn select_order_recovers_ar1_band() {
        let spec = ArProcessSpec::new(vec![0.8], 20);
        let x = simulate_ar(&spec, 400, 19).unwrap();
        let g = band_pattern(20, 1).unwrap();
        let trace = select_markov_order(&x, &g, 4, StopRule::Exhaustive).unwrap();
        assert_eq!(trace.selected, 1, "trace: {:?}", trace.evaluations);
        // aic = nll + penalty holds entrywise
        for eval in &trace.evaluations {
            assert!(eval.aic > eval.nll);
        }
    }

    #[test]
    fn first_rise_matches_exhaustive_on_convex_trace() {
        let spec = ArProcessSpec::new(vec![0.8], 15);
        let x = simulate_ar(&spec, 300, 23).unwrap();
        let g = band_pattern(15, 1).unwrap();
        let exhaustive = select_markov_order(&x, &g, 4, StopRule::Exhaustive).unwrap();
        let first_rise = select_markov_order(&x, &g, 4, StopRule::FirstRise).unwrap();
        assert_eq!(first_rise.selected, exhaustive.selected);
        assert!(first_rise.evaluations.len() <= exhaustive.evaluations.len());
    }

    #[test]
    fn white_noise_selects_independence() {
        let spec = ArProcessSpec::new(vec![], 10);
        let x = simulate_ar(&spec, 200, 31).unwrap();
        let g = band_pattern(10, 1).unwrap();
        let trace = select_markov_order(&x, &g, 3, StopRule::Exhaustive).unwrap();
        assert_eq!(trace.selected, 0, "trace: {:?}", trace.evaluations);
    }
}
