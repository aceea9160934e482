//! Autoregressive process simulators and their population covariance /
//! precision oracles.
//!
//! The AR(p) process has a known dense Toeplitz covariance (autocovariances
//! from the Yule-Walker equations) and a band-sparse precision of bandwidth
//! `p`, which makes it the reference family for benchmarking graph-aware
//! dependence estimates.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dense::DenseSymmetricMatrix;
use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_NOISE, STREAM_RANDOM_EFFECT};
use crate::sparse::SparseSymmetricMatrix;

const STATIONARITY_MARGIN: f64 = 1e-10;

/// An AR(p) process `x_t = sum_j psi_j x_{t-j} + eps_t` observed over a fixed
/// horizon.
#[derive(Debug, Clone)]
pub struct ArProcessSpec {
    /// Lag coefficients `psi_1 .. psi_p`; empty for white noise.
    pub coefficients: Vec<f64>,
    /// Innovation standard deviation.
    pub noise_sd: f64,
    /// Number of time points per realisation.
    pub horizon: usize,
    /// Draw the first `min(p, horizon)` values from the stationary joint
    /// distribution instead of zero-padding the pre-sample past.
    pub stationary_init: bool,
}

impl ArProcessSpec {
    /// Spec with unit innovation variance and stationary initialization.
    pub fn new(coefficients: Vec<f64>, horizon: usize) -> Self {
        Self {
            coefficients,
            noise_sd: 1.0,
            horizon,
            stationary_init: true,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// Stationarity via the companion-matrix spectral radius.
    pub fn is_stationary(&self) -> bool {
        let p = self.order();
        if p == 0 {
            return true;
        }
        let companion = DMatrix::from_fn(p, p, |i, j| {
            if i == 0 {
                self.coefficients[j]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let radius = companion
            .complex_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        radius < 1.0 - STATIONARITY_MARGIN
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be >= 1".into()));
        }
        if !self.noise_sd.is_finite() || self.noise_sd <= 0.0 {
            return Err(Error::InvalidArgument("noise_sd must be positive".into()));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// A mixed-effect AR(p) model: `x_{i,t} = u_t * sum_j psi_j x_{i,t-j} +
/// eps_{i,t}` with `u_t ~ U(0,1)` drawn once and shared across realisations,
/// zero pre-sample values, and coefficients summing to one.
#[derive(Debug, Clone)]
pub struct MixedEffectArSpec {
    pub coefficients: Vec<f64>,
    pub horizon: usize,
    pub realisations: usize,
    pub seed: u64,
    /// Separate seed for the shared `u` stream; defaults to `seed`. The `u`
    /// and innovation streams are independent either way, so varying one seed
    /// while fixing the other regenerates only that component.
    pub u_seed: Option<u64>,
}

impl MixedEffectArSpec {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.realisations == 0 {
            return Err(Error::InvalidArgument(
                "horizon and realisations must be >= 1".into(),
            ));
        }
        if self.coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "mixed-effect model needs order >= 1".into(),
            ));
        }
        let sum: f64 = self.coefficients.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixed-effect coefficients must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Simulates `n` independent realisations of the AR(p) process, one per row.
///
/// Each row draws from its own `(seed, row)` sub-stream, so the result does
/// not depend on evaluation order.
pub fn simulate_ar(spec: &ArProcessSpec, n: usize, seed: u64) -> Result<Array2<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one realisation".into()));
    }
    let t = spec.horizon;
    let p = spec.order();
    if spec.stationary_init && !spec.is_stationary() {
        return Err(Error::NonStationary(
            "stationary initialization requires stationary coefficients".into(),
        ));
    }

    // Cholesky factor of the stationary joint of the first min(p, T) values.
    let init_chol = if spec.stationary_init && p > 0 {
        let k = p.min(t);
        let gamma = population_covariance_arp(spec, k)?;
        let chol = nalgebra::Cholesky::new(gamma.to_dmatrix()).ok_or_else(|| {
            Error::Numeric("stationary initial covariance is not positive definite".into())
        })?;
        Some((k, chol.l().clone_owned()))
    } else {
        None
    };

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|row| {
            let mut rng = substream(seed, STREAM_NOISE, row as u64);
            let mut vals = vec![0.0; t];
            let start = match &init_chol {
                Some((k, l)) => {
                    let z = DVector::from_fn(*k, |_, _| StandardNormal.sample(&mut rng));
                    let init = l * z;
                    vals[..*k].copy_from_slice(init.as_slice());
                    *k
                }
                None => 0,
            };
            for idx in start..t {
                let mut acc = 0.0;
                for (j, &psi) in spec.coefficients.iter().enumerate() {
                    if idx > j {
                        acc += psi * vals[idx - j - 1];
                    }
                }
                let eps: f64 = StandardNormal.sample(&mut rng);
                vals[idx] = acc + spec.noise_sd * eps;
            }
            vals
        })
        .collect();

    let mut out = Array2::zeros((n, t));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Simulates the mixed-effect AR(p) model. The random effect `u_1..u_T` is
/// drawn once and multiplies the lag sum of every realisation.
pub fn simulate_mixed_effect_ar(spec: &MixedEffectArSpec) -> Result<Array2<f64>> {
    spec.validate()?;
    let t = spec.horizon;
    let u_seed = spec.u_seed.unwrap_or(spec.seed);
    let mut u_rng = substream(u_seed, STREAM_RANDOM_EFFECT, 0);
    let u: Vec<f64> = (0..t).map(|_| u_rng.random::<f64>()).collect();

    let rows: Vec<Vec<f64>> = (0..spec.realisations)
        .into_par_iter()
        .map(|row| {
            let mut rng = substream(spec.seed, STREAM_NOISE, row as u64);
            let mut vals = vec![0.0; t];
            for idx in 0..t {
                let mut acc = 0.0;
                for (j, &psi) in spec.coefficients.iter().enumerate() {
                    if idx > j {
                        acc += psi * vals[idx - j - 1];
                    }
                }
                let eps: f64 = StandardNormal.sample(&mut rng);
                vals[idx] = u[idx] * acc + eps;
            }
            vals
        })
        .collect();

    let mut out = Array2::zeros((spec.realisations, t));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Closed-form AR(1) population covariance: `B(i,j) = phi^|i-j| / (1 - phi^2)`
/// for unit innovation variance.
pub fn population_covariance_ar1(phi: f64, t: usize) -> Result<DenseSymmetricMatrix> {
    if phi.abs() >= 1.0 {
        return Err(Error::NonStationary(format!("|phi| = {} >= 1", phi.abs())));
    }
    if t == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    let scale = 1.0 / (1.0 - phi * phi);
    Ok(DenseSymmetricMatrix::from_fn(t, |i, j| {
        phi.powi((i - j) as i32) * scale
    }))
}

/// Closed-form AR(1) population precision: tridiagonal with unit corners,
/// `1 + phi^2` on the interior diagonal and `-phi` off the diagonal.
pub fn population_precision_ar1(phi: f64, t: usize) -> Result<SparseSymmetricMatrix> {
    if phi.abs() >= 1.0 {
        return Err(Error::NonStationary(format!("|phi| = {} >= 1", phi.abs())));
    }
    if t < 2 {
        return Err(Error::InvalidArgument("tridiagonal form needs T >= 2".into()));
    }
    let mut diag = vec![1.0 + phi * phi; t];
    diag[0] = 1.0;
    diag[t - 1] = 1.0;
    SparseSymmetricMatrix::tridiagonal(&diag, &vec![-phi; t - 1])
}

/// Autocovariances `gamma_0 .. gamma_{t-1}` of the AR(p) process, from the
/// order-p Yule-Walker system extended by the lag recursion.
fn autocovariances(spec: &ArProcessSpec, t: usize) -> Result<Vec<f64>> {
    let p = spec.order();
    let sigma2 = spec.noise_sd * spec.noise_sd;
    if p == 0 {
        let mut gamma = vec![0.0; t];
        gamma[0] = sigma2;
        return Ok(gamma);
    }
    // Unknowns gamma_0 .. gamma_p:
    //   gamma_0 - sum_j psi_j gamma_j           = sigma^2
    //   gamma_k - sum_j psi_j gamma_|k-j|       = 0        (k = 1..p)
    let mut a = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut b = DVector::<f64>::zeros(p + 1);
    b[0] = sigma2;
    for k in 0..=p {
        a[(k, k)] += 1.0;
        for (j, &psi) in spec.coefficients.iter().enumerate() {
            let lag = k.abs_diff(j + 1);
            a[(k, lag)] -= psi;
        }
    }
    let head = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("singular Yule-Walker system".into()))?;
    let mut gamma: Vec<f64> = head.iter().copied().collect();
    while gamma.len() < t {
        let k = gamma.len();
        let next: f64 = spec
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, &psi)| psi * gamma[k - j - 1])
            .sum();
        gamma.push(next);
    }
    gamma.truncate(t);
    Ok(gamma)
}

/// Exact population covariance of `t` consecutive values of the AR(p)
/// process: the Toeplitz matrix of its autocovariance function.
pub fn population_covariance_arp(spec: &ArProcessSpec, t: usize) -> Result<DenseSymmetricMatrix> {
    spec.validate()?;
    if t == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    if !spec.is_stationary() {
        return Err(Error::NonStationary(
            "population covariance requires stationary coefficients".into(),
        ));
    }
    let gamma = autocovariances(spec, t)?;
    Ok(DenseSymmetricMatrix::from_fn(t, |i, j| gamma[i - j]))
}

/// Dense inverse of the AR(p) population covariance. Band-sparse with
/// bandwidth `p` up to numerical noise.
pub fn population_precision_arp(spec: &ArProcessSpec, t: usize) -> Result<DenseSymmetricMatrix> {
    let cov = population_covariance_arp(spec, t)?;
    let chol = nalgebra::Cholesky::new(cov.to_dmatrix())
        .ok_or_else(|| Error::Numeric("population covariance is not positive definite".into()))?;
    Ok(DenseSymmetricMatrix::from_dmatrix_lower(&chol.inverse()))
}
