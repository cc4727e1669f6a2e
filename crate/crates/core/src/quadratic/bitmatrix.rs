//! Dense matrices over F_2 with word-packed rows.

use crate::error::{Error, Result};
use crate::field::FieldVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.stride + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `M v` for a vector over F_2 of length `cols`.
    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        let words = v.words().filter(|_| v.len() == self.cols).ok_or_else(|| {
            Error::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols))
        })?;
        let mut out = FieldVector::zeros(v.field(), self.rows);
        for i in 0..self.rows {
            let parity = self
                .row(i)
                .iter()
                .zip(words)
                .fold(0, |a, (r, w)| a ^ (r & w).count_ones())
                & 1;
            out.set(i, parity);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        gf2_rank(self)
    }
}

/// Rank over F_2 by row elimination.
pub fn gf2_rank(m: &BitMatrix) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pr = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pr) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Symmetric square matrix over F_2 (diagonal stored explicitly).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricBitMatrix(BitMatrix);

impl SymmetricBitMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricBitMatrix(BitMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricBitMatrix(BitMatrix::identity(n))
    }

    /// Zero on the diagonal and one elsewhere.
    pub fn all_ones_off_diagonal(n: usize) -> Self {
        SymmetricBitMatrix(BitMatrix::from_fn(n, n, |i, j| i != j))
    }

    /// `u ⊗ v + v ⊗ u`.
    pub fn symmetric_outer(u: &FieldVector, v: &FieldVector) -> Result<Self> {
        if u.len() != v.len() || !u.field().is_binary() || !v.field().is_binary() {
            return Err(Error::DimensionMismatch(
                "outer product needs binary vectors of equal length".into(),
            ));
        }
        let n = u.len();
        Ok(SymmetricBitMatrix(BitMatrix::from_fn(n, n, |i, j| {
            (u.get(i) & v.get(j)) ^ (v.get(i) & u.get(j)) == 1
        })))
    }

    pub fn try_from_matrix(m: BitMatrix) -> Result<Self> {
        if m.rows != m.cols || m != m.transpose() {
            return Err(Error::Precondition("matrix is not symmetric".into()));
        }
        Ok(SymmetricBitMatrix(m))
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.0.get(i, j)
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.0.set(i, j, v);
        self.0.set(j, i, v);
    }

    pub fn xor_assign(&mut self, other: &SymmetricBitMatrix) {
        self.0.xor_assign(&other.0);
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n()).all(|i| !self.get(i, i))
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.0
    }

    /// Row `i` as a bitmask; requires `n <= 64`.
    pub fn row_mask(&self, i: usize) -> u64 {
        debug_assert!(self.n() <= 64);
        self.0.row(i)[0]
    }

    pub fn rank(&self) -> usize {
        gf2_rank(&self.0)
    }
}
