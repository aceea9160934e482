//! Sparse square matrices in column-major coordinate storage.
//!
//! [`SparseMatrix`] is a general square sparse matrix; the column-by-column
//! precision estimator produces one (its raw output need not be symmetric).
//! [`SparseSymmetricMatrix`] wraps a structurally and numerically symmetric
//! matrix; both triangles are stored so rows and columns coincide.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::SparsityPattern;

/// General square sparse matrix; each column holds `(row, value)` pairs
/// sorted by row. Stored zeros are kept (they are part of the support).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    p: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicate positions are
    /// rejected.
    pub fn from_triplets(
        p: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be >= 1".into()));
        }
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
        for (i, j, v) in triplets {
            if i >= p || j >= p {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i},{j}) outside [0,{p})"
                )));
            }
            cols[j].push((i, v));
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|&(r, _)| r);
            if col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidArgument("duplicate entry in triplets".into()));
            }
        }
        Ok(Self { p, cols })
    }

    /// Builds from already-sorted column lists. Used by the column estimator,
    /// which produces each column's support in sorted order.
    pub(crate) fn from_sorted_columns(p: usize, cols: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert_eq!(cols.len(), p);
        debug_assert!(cols
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|&(r, _)| r < p)));
        Self { p, cols }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Stored entries (explicit zeros included).
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Value at `(i, j)`; zero when the position is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cols[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map_or(0.0, |k| self.cols[j][k].1)
    }

    /// Sorted `(row, value)` entries of column `j`.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    /// Iterates over all stored `(row, col, value)` entries.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.p];
        for j in 0..self.p {
            for &(i, v) in &self.cols[j] {
                cols[i].push((j, v));
            }
        }
        Self { p: self.p, cols }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.p, self.p));
        for (i, j, v) in self.iter() {
            out[[i, j]] = v;
        }
        out
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Symmetry conversion `(M + M^T) / 2` on the union of the supports of
    /// `M` and `M^T`.
    pub fn symmetrized(&self) -> SparseSymmetricMatrix {
        let t = self.transpose();
        let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(self.p);
        for j in 0..self.p {
            let a = &self.cols[j];
            let b = &t.cols[j];
            let mut merged = Vec::with_capacity(a.len().max(b.len()));
            let (mut ka, mut kb) = (0, 0);
            while ka < a.len() || kb < b.len() {
                let ra = a.get(ka).map(|&(r, _)| r);
                let rb = b.get(kb).map(|&(r, _)| r);
                match (ra, rb) {
                    (Some(ra), Some(rb)) if ra == rb => {
                        merged.push((ra, (a[ka].1 + b[kb].1) / 2.0));
                        ka += 1;
                        kb += 1;
                    }
                    (Some(ra), _) if rb.is_none_or(|rb| ra < rb) => {
                        merged.push((ra, a[ka].1 / 2.0));
                        ka += 1;
                    }
                    _ => {
                        merged.push((rb.unwrap(), b[kb].1 / 2.0));
                        kb += 1;
                    }
                }
            }
            cols.push(merged);
        }
        SparseSymmetricMatrix {
            inner: Self { p: self.p, cols },
        }
    }
}

/// Sparse symmetric matrix: symmetric support, `value(i,j) == value(j,i)`
/// exactly, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    inner: SparseMatrix,
}

impl SparseSymmetricMatrix {
    /// Validates symmetry of a general sparse matrix.
    pub fn try_from_sparse(m: SparseMatrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::InvalidArgument(
                "matrix is not symmetric (storage or values differ from transpose)".into(),
            ));
        }
        Ok(Self { inner: m })
    }

    /// Builds from lower-triangle triplets (`row >= col`), mirroring the
    /// off-diagonal entries.
    pub fn from_lower_triplets(
        p: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut full = Vec::new();
        for (i, j, v) in triplets {
            if i < j {
                return Err(Error::InvalidArgument(format!(
                    "expected lower-triangle entry, got ({i},{j})"
                )));
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Ok(Self {
            inner: SparseMatrix::from_triplets(p, full)?,
        })
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Ok(Self {
            inner: SparseMatrix::from_triplets(
                diag.len(),
                diag.iter().enumerate().map(|(i, &v)| (i, i, v)),
            )?,
        })
    }

    /// Tridiagonal matrix from its diagonal and off-diagonal bands.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        let p = diag.len();
        if p == 0 || off.len() + 1 != p {
            return Err(Error::InvalidArgument(
                "tridiagonal needs p >= 1 diagonal and p-1 off-diagonal entries".into(),
            ));
        }
        let mut triplets: Vec<(usize, usize, f64)> =
            diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        triplets.extend(off.iter().enumerate().map(|(i, &v)| (i + 1, i, v)));
        Self::from_lower_triplets(p, triplets)
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Stored entries, both triangles plus diagonal.
    pub fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    /// Column `j`; by symmetry this is also row `j`.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        self.inner.column(j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.inner.iter()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        self.inner.to_dense()
    }

    pub fn as_sparse(&self) -> &SparseMatrix {
        &self.inner
    }

    pub fn into_sparse(self) -> SparseMatrix {
        self.inner
    }

    /// Support of the matrix as a sparsity pattern (diagonal entries are
    /// included whether or not they are stored).
    pub fn pattern(&self) -> SparsityPattern {
        let edges: Vec<(usize, usize)> = self
            .iter()
            .filter(|&(i, j, _)| i > j)
            .map(|(i, j, _)| (i, j))
            .collect();
        SparsityPattern::from_edges(self.dim(), &edges)
            .expect("support indices are in range by construction")
    }
}
