use super::group::CMatrix;
use crate::error::{Error, Result};

/// The permutation `A : C^N ⊗ C^N → ⊕_k C^N`, `(A v)_k(h) = v(h, h - k)`.
///
/// Tensors are flattened as `v(i, j) ↦ i·N + j` and the direct sum as
/// `w_k(h) ↦ k·N + h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionMap {
    n: usize,
    /// `perm[row] = col`: row `k·N + h` of `A` has its single 1 in `col`.
    perm: Vec<usize>,
}

impl InductionMap {
    pub fn new(n: usize) -> Self {
        let mut perm = vec![0; n * n];
        for k in 0..n {
            for h in 0..n {
                perm[k * n + h] = h * n + (h + n - k) % n;
            }
        }
        InductionMap { n, perm }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `A v` for a flattened tensor `v`.
    pub fn apply<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.perm.iter().map(|&c| v[c]).collect()
    }

    /// `A^{-1} w` for a flattened direct-sum vector `w`.
    pub fn apply_inverse<T: Copy + Default>(&self, w: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); w.len()];
        for (row, &col) in self.perm.iter().enumerate() {
            out[col] = w[row];
        }
        out
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.n * self.n;
        let mut m = CMatrix::zeros(d, d);
        for (row, &col) in self.perm.iter().enumerate() {
            m[(row, col)] = 1.0.into();
        }
        m
    }

    pub fn inverse_matrix(&self) -> CMatrix {
        self.matrix().transpose()
    }

    /// `A M A^{-1}` for an `N² × N²` matrix.
    pub fn conjugate(&self, m: &CMatrix) -> Result<CMatrix> {
        let d = self.n * self.n;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(CMatrix::from_fn(d, d, |r, c| {
            m[(self.perm[r], self.perm[c])]
        }))
    }

    /// `A^{-1} B A`.
    pub fn unconjugate(&self, b: &CMatrix) -> Result<CMatrix> {
        let d = self.n * self.n;
        if b.nrows() != d || b.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.nrows().max(b.ncols()),
            });
        }
        let mut out = CMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                out[(self.perm[r], self.perm[c])] = b[(r, c)];
            }
        }
        Ok(out)
    }
}

/// Operator on `⊕_k C^N` stored as its `N × N` grid of `N × N` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    n: usize,
    blocks: Vec<CMatrix>,
}

impl BlockMatrix {
    pub fn from_dense(m: &CMatrix, n: usize) -> Self {
        let blocks = (0..n * n)
            .map(|idx| {
                let (k, h) = (idx / n, idx % n);
                m.view((k * n, h * n), (n, n)).into_owned()
            })
            .collect();
        BlockMatrix { n, blocks }
    }

    /// Block-diagonal operator `⊕_k diag[k]`.
    pub fn diagonal(diag: &[CMatrix]) -> Self {
        let n = diag.len();
        let blocks = (0..n * n)
            .map(|idx| {
                let (k, h) = (idx / n, idx % n);
                if k == h {
                    diag[k].clone()
                } else {
                    CMatrix::zeros(n, n)
                }
            })
            .collect();
        BlockMatrix { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, k: usize, h: usize) -> &CMatrix {
        &self.blocks[k * self.n + h]
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n * n, n * n);
        for k in 0..n {
            for h in 0..n {
                m.view_mut((k * n, h * n), (n, n))
                    .copy_from(self.block(k, h));
            }
        }
        m
    }

    /// Frobenius norm of the off-diagonal blocks over that of all blocks.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let mut off = 0.0;
        let mut total = 0.0;
        for k in 0..self.n {
            for h in 0..self.n {
                let s = self.block(k, h).norm_squared();
                total += s;
                if k != h {
                    off += s;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (off / total).sqrt()
        }
    }
}

/// `A M A^{-1}` reorganized into blocks `(k, h)`.
pub fn induction_apply(m: &CMatrix) -> Result<BlockMatrix> {
    let d = m.nrows();
    let n = (d as f64).sqrt().round() as usize;
    if n * n != d || m.ncols() != d {
        return Err(Error::InvalidParameter(format!(
            "induction needs a square N²×N² matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let a = InductionMap::new(n);
    Ok(BlockMatrix::from_dense(&a.conjugate(m)?, n))
}

/// Kronecker product with `(M ⊗ N) v = M v N^T` on `v(i, j)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
