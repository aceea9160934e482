//! Dense symmetric matrices and the spectral helpers built on them.
//!
//! Symmetry is enforced by construction: every constructor fills the upper
//! triangle by mirroring the lower one, so `get(i, j) == get(j, i)` holds
//! bit-exactly no matter how the entries were computed.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

use crate::error::{Error, Result};

/// Dense real symmetric matrix with exact mirror storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetricMatrix {
    values: Array2<f64>,
}

impl DenseSymmetricMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            values: Array2::zeros((p, p)),
        }
    }

    pub fn identity(p: usize) -> Self {
        Self {
            values: Array2::eye(p),
        }
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle (`i >= j`) and
    /// mirrored.
    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Array2::zeros((p, p));
        for i in 0..p {
            for j in 0..=i {
                let v = f(i, j);
                values[[i, j]] = v;
                values[[j, i]] = v;
            }
        }
        Self { values }
    }

    /// Takes a square matrix and keeps its lower triangle, mirroring it onto
    /// the upper one. The input is expected to be symmetric up to rounding.
    pub fn from_lower(mut values: Array2<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::InvalidArgument(format!(
                "expected square matrix, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        let p = values.nrows();
        for i in 0..p {
            for j in 0..i {
                values[[j, i]] = values[[i, j]];
            }
        }
        Ok(Self { values })
    }

    /// Validates exact symmetry of an existing matrix.
    pub fn try_from_array(values: Array2<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::InvalidArgument(format!(
                "expected square matrix, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        let p = values.nrows();
        for i in 0..p {
            for j in 0..i {
                if values[[i, j]] != values[[j, i]] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_array(self) -> Array2<f64> {
        self.values
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.values[[i, i]]).collect()
    }

    /// Restriction to the principal submatrix indexed by `members`.
    pub fn principal_submatrix(&self, members: &[usize]) -> Result<Self> {
        let p = self.dim();
        if let Some(&bad) = members.iter().find(|&&m| m >= p) {
            return Err(Error::InvalidArgument(format!(
                "index {bad} outside [0,{p})"
            )));
        }
        Ok(Self::from_fn(members.len(), |a, b| {
            self.values[[members[a], members[b]]]
        }))
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| self.values[[i, j]])
    }

    pub(crate) fn from_dmatrix_lower(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

/// Frobenius norm of the entrywise difference `a - b`.
pub fn frobenius_error(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: {:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Moore-Penrose pseudo-inverse via symmetric eigendecomposition.
///
/// Eigenvalues with `|lambda| < rank_tol * max|lambda|` are treated as zero;
/// `rank_tol` defaults to `p * machine epsilon`.
pub fn pseudo_inverse(m: &DenseSymmetricMatrix, rank_tol: Option<f64>) -> DenseSymmetricMatrix {
    let p = m.dim();
    let eig = SymmetricEigen::new(m.to_dmatrix());
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_abs == 0.0 {
        return DenseSymmetricMatrix::zeros(p);
    }
    let threshold = rank_tol.unwrap_or(p as f64 * f64::EPSILON) * max_abs;
    let inv_eigs: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&v| if v.abs() < threshold { 0.0 } else { 1.0 / v })
        .collect();
    let q = &eig.eigenvectors;
    DenseSymmetricMatrix::from_fn(p, |i, j| {
        (0..p).map(|k| q[(i, k)] * inv_eigs[k] * q[(j, k)]).sum()
    })
}
