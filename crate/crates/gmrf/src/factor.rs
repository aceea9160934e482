//! Sparse LDL^T factorization of symmetric positive definite matrices.
//!
//! Up-looking factorization in natural order: the row pattern of each new row
//! of `L` is the union of elimination-tree paths from the nonzeros of the
//! corresponding matrix column, so no symbolic pass or fill-reducing
//! permutation is required. Band patterns (the common case here) factor with
//! fill confined to the band. The factorization doubles as the SPD test: it
//! succeeds iff every pivot is strictly positive.

use crate::error::{Error, Result};
use crate::sparse::SparseSymmetricMatrix;

/// Factorization `A = L D L^T` with unit lower-triangular `L` and positive
/// diagonal `D`.
#[derive(Debug, Clone)]
pub struct SparseLdlt {
    p: usize,
    /// Strictly-lower entries of `L`, stored per column with ascending rows.
    l_cols: Vec<Vec<(usize, f64)>>,
    d: Vec<f64>,
}

impl SparseLdlt {
    /// Factors `m`, failing with [`Error::NotPositiveDefinite`] on the first
    /// non-positive (or non-finite) pivot.
    pub fn factor(m: &SparseSymmetricMatrix) -> Result<Self> {
        let p = m.dim();
        let mut l_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
        let mut d = vec![0.0; p];
        let mut parent: Vec<Option<usize>> = vec![None; p];
        let mut flag = vec![usize::MAX; p];
        let mut pattern = vec![0usize; p];
        let mut path = Vec::with_capacity(p);
        let mut y = vec![0.0; p];

        for k in 0..p {
            // Row pattern of L[k, ..]: follow the elimination tree upward from
            // every nonzero of A[0..k, k], stopping at nodes already reached.
            let mut top = p;
            flag[k] = k;
            for &(i, v) in m.column(k) {
                if i > k {
                    break;
                }
                y[i] = v;
                if i < k {
                    path.clear();
                    let mut node = i;
                    while flag[node] != k {
                        if parent[node].is_none() {
                            parent[node] = Some(k);
                        }
                        path.push(node);
                        flag[node] = k;
                        node = parent[node].expect("node was just assigned a parent");
                    }
                    for &n in path.iter().rev() {
                        top -= 1;
                        pattern[top] = n;
                    }
                }
            }

            // Numeric sparse triangular solve over the pattern (descendants
            // first, which is the stack order).
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..] {
                let yi = y[i];
                y[i] = 0.0;
                for &(r, lri) in &l_cols[i] {
                    y[r] -= lri * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                l_cols[i].push((k, lki));
            }
            if !(d[k].is_finite() && d[k] > 0.0) {
                return Err(Error::NotPositiveDefinite(format!(
                    "pivot {k} evaluates to {}",
                    d[k]
                )));
            }
        }
        Ok(Self { p, l_cols, d })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// `log |A| = sum_k log d_k` (the `L` factors are unit-diagonal).
    pub fn log_det(&self) -> f64 {
        self.d.iter().map(|v| v.ln()).sum()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.p {
            return Err(Error::InvalidArgument(format!(
                "rhs length {} does not match dimension {}",
                b.len(),
                self.p
            )));
        }
        let mut x = b.to_vec();
        for (i, col) in self.l_cols.iter().enumerate() {
            let xi = x[i];
            for &(r, l) in col {
                x[r] -= l * xi;
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..self.p).rev() {
            let mut xi = x[i];
            for &(r, l) in &self.l_cols[i] {
                xi -= l * x[r];
            }
            x[i] = xi;
        }
        Ok(x)
    }
}

/// Whether `m` admits a symmetric positive definite factorization.
pub fn is_spd(m: &SparseSymmetricMatrix) -> bool {
    SparseLdlt::factor(m).is_ok()
}
