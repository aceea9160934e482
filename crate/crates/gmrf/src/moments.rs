//! Sample moments, unbiased trace statistics, and Stein-type shrinkage
//! covariance estimation.
//!
//! The trace statistics `y1`, `y2`, `y3` are the location-invariant unbiased
//! U-statistic estimators of `tr(S)`, `tr(S^2)` and `sum_i s_ii^2` for the
//! population covariance. They are evaluated through closed-form reductions
//! over the centered data rather than the defining sums over distinct index
//! tuples: centering makes all row sums of the Gram matrix vanish, which
//! collapses the fourth-order sums to a handful of scalar accumulators. The
//! reductions are checked against a brute-force enumeration oracle in the
//! test suite.

use ndarray::{Array1, Array2, Axis};

use crate::dense::DenseSymmetricMatrix;
use crate::error::{Error, Result};

/// Shrinkage target family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Scaled identity `nu * I` with `nu = y1 / p`.
    Identity,
    /// Sample variances on the diagonal, `diag(S)`.
    Diagonal,
}

/// Location-invariant unbiased estimates of the population trace quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStatistics {
    /// Estimate of `tr(Sigma)`.
    pub y1: f64,
    /// Estimate of `tr(Sigma^2)`. May be negative on tiny samples; the
    /// intensity formulas clip downstream.
    pub y2: f64,
    /// Estimate of `sum_i sigma_ii^2` (diagonal target only).
    pub y3: f64,
}

/// A shrunk covariance estimate together with the intensity that produced it.
#[derive(Debug, Clone)]
pub struct ShrinkageEstimate {
    /// Shrinkage intensity in `[0, 1]`.
    pub lambda: f64,
    /// Target scale for the identity target; absent for the diagonal target.
    pub nu: Option<f64>,
    pub covariance: DenseSymmetricMatrix,
    pub target: TargetKind,
}

/// Componentwise mean of the observation rows.
pub fn sample_mean(x: &Array2<f64>) -> Result<Array1<f64>> {
    if x.nrows() == 0 {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    Ok(x.mean_axis(Axis(0)).expect("nrows >= 1"))
}

fn centered(x: &Array2<f64>) -> Result<Array2<f64>> {
    let mean = sample_mean(x)?;
    Ok(x - &mean)
}

/// Sample covariance with divisor `n - 1`; exactly symmetric by storage.
pub fn sample_covariance(x: &Array2<f64>) -> Result<DenseSymmetricMatrix> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let y = centered(x)?;
    let mut product = y.t().dot(&y);
    product /= (n - 1) as f64;
    DenseSymmetricMatrix::from_lower(product)
}

/// Unbiased, location-invariant trace statistics of the dataset.
///
/// Needs at least four rows (the estimator of `tr(Sigma^2)` averages over
/// quadruples of distinct observations).
pub fn trace_statistics(x: &Array2<f64>) -> Result<TraceStatistics> {
    let n = x.nrows();
    if n < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: n });
    }
    let p = x.ncols();
    if p == 0 {
        return Err(Error::InvalidArgument("dataset has no columns".into()));
    }
    let y = centered(x)?;
    let nf = n as f64;
    let p2 = nf * (nf - 1.0);
    let p3 = p2 * (nf - 2.0);
    let p4 = p3 * (nf - 3.0);

    // Per-column sums of squares and fourth powers.
    let sq = y.mapv(|v| v * v);
    let col_sq: Array1<f64> = sq.sum_axis(Axis(0));
    let col_quad: Array1<f64> = y.mapv(|v| v * v * v * v).sum_axis(Axis(0));
    // Row Gram diagonal and its square-sum.
    let row_sq: Array1<f64> = sq.sum_axis(Axis(1));
    let q1: f64 = col_sq.sum();
    let q2: f64 = row_sq.iter().map(|v| v * v).sum();
    // Sum of squared Gram entries; form whichever of Y Y^T / Y^T Y is smaller.
    let r = if n <= p {
        let g = y.dot(&y.t());
        g.iter().map(|v| v * v).sum::<f64>()
    } else {
        let m = y.t().dot(&y);
        m.iter().map(|v| v * v).sum::<f64>()
    };

    let y1 = q1 / (nf - 1.0);
    let y2 = (r - q2) / p2 - 2.0 * (2.0 * q2 - r) / p3 + (q1 * q1 - 6.0 * q2 + 2.0 * r) / p4;
    let y3 = col_sq
        .iter()
        .zip(col_quad.iter())
        .map(|(&s, &q)| {
            let ss = s * s;
            (ss - q) / p2 - 2.0 * (2.0 * q - ss) / p3 + (3.0 * ss - 6.0 * q) / p4
        })
        .sum();

    Ok(TraceStatistics { y1, y2, y3 })
}

/// Optimal shrinkage intensity for the requested target, clipped to `[0, 1]`.
///
/// A non-positive or non-finite denominator yields full shrinkage
/// (`lambda = 1`), the safe degenerate limit.
pub fn shrinkage_intensity(
    stats: &TraceStatistics,
    n: usize,
    p: usize,
    target: TargetKind,
) -> f64 {
    let nf = n as f64;
    let pf = p as f64;
    let TraceStatistics { y1, y2, y3 } = *stats;
    let (numerator, denominator) = match target {
        TargetKind::Identity => (
            y2 + y1 * y1,
            nf * y2 + (pf - nf + 1.0) / pf * y1 * y1,
        ),
        TargetKind::Diagonal => (
            y2 + y1 * y1 - 2.0 * y3,
            nf * y2 + y1 * y1 - (nf + 1.0) * y3,
        ),
    };
    if !denominator.is_finite() || denominator <= 0.0 {
        return 1.0;
    }
    (numerator / denominator).clamp(0.0, 1.0)
}

fn shrink_towards(
    s: &DenseSymmetricMatrix,
    lambda: f64,
    target_diag: impl Fn(usize) -> f64,
) -> DenseSymmetricMatrix {
    DenseSymmetricMatrix::from_fn(s.dim(), |i, j| {
        if i == j {
            (1.0 - lambda) * s.get(i, i) + lambda * target_diag(i)
        } else {
            (1.0 - lambda) * s.get(i, j)
        }
    })
}

/// Shrinkage covariance estimate towards the sample-variance diagonal target.
///
/// The diagonal of the estimate equals the diagonal of the sample covariance
/// exactly; off-diagonal entries are damped by `1 - lambda`.
pub fn cov_shrink_spd(x: &Array2<f64>) -> Result<ShrinkageEstimate> {
    let n = x.nrows();
    if n < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: n });
    }
    let s = sample_covariance(x)?;
    let stats = trace_statistics(x)?;
    let lambda = shrinkage_intensity(&stats, n, x.ncols(), TargetKind::Diagonal);
    let covariance = shrink_towards(&s, lambda, |i| s.get(i, i));
    Ok(ShrinkageEstimate {
        lambda,
        nu: None,
        covariance,
        target: TargetKind::Diagonal,
    })
}

/// Shrinkage covariance estimate towards the scaled identity target
/// `nu * I`, `nu = y1 / p`.
pub fn cov_shrink_identity(x: &Array2<f64>) -> Result<ShrinkageEstimate> {
    let n = x.nrows();
    if n < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: n });
    }
    let s = sample_covariance(x)?;
    let stats = trace_statistics(x)?;
    let p = x.ncols();
    let lambda = shrinkage_intensity(&stats, n, p, TargetKind::Identity);
    let nu = stats.y1 / p as f64;
    let covariance = shrink_towards(&s, lambda, |_| nu);
    Ok(ShrinkageEstimate {
        lambda,
        nu: Some(nu),
        covariance,
        target: TargetKind::Identity,
    })
}
