//! Dense matrices over F2 with rows packed into 64-bit words.

use super::ring::F2;
use super::sparse::{SparseMatrix, SparseVec};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    nrows: usize,
    ncols: usize,
    words: usize,
    data: Vec<u64>,
}

/// Result of Gauss-Jordan elimination on a [`BitMatrix`].
#[derive(Clone, Debug)]
pub struct BitRref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Reduced row-echelon form; the first `rank` rows are nonzero.
    pub reduced: BitMatrix,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let words = ncols.div_ceil(64);
        BitMatrix { nrows, ncols, words, data: vec![0; nrows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= *y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.words {
                self.data.swap(a * self.words + k, b * self.words + k);
            }
        }
    }

    pub fn from_sparse(m: &SparseMatrix<F2>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for (r, row) in m.rows().iter().enumerate() {
            for (c, _) in row.entries() {
                out.set(r, *c, true);
            }
        }
        out
    }

    pub fn to_sparse(&self) -> SparseMatrix<F2> {
        let rows = (0..self.nrows).map(|r| self.row_vec(r)).collect();
        SparseMatrix::from_rows(F2, self.ncols, rows)
    }

    pub fn row_vec(&self, r: usize) -> SparseVec<u8> {
        let mut pairs = Vec::new();
        for (k, w) in self.row(r).iter().enumerate() {
            let mut bits = *w;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                pairs.push((k * 64 + t, 1u8));
                bits &= bits - 1;
            }
        }
        SparseVec::from_pairs(&F2, pairs)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                if self.get(r, k) {
                    let (dst, src) = (r * out.words, k * other.words);
                    for w in 0..out.words {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|w| *w == 0)
    }

    pub fn rref(&self) -> BitRref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.ncols {
            if rank == m.nrows {
                break;
            }
            let Some(p) = (rank..m.nrows).find(|r| m.get(*r, c)) else { continue };
            m.swap_rows(rank, p);
            for r in 0..m.nrows {
                if r != rank && m.get(r, c) {
                    m.xor_rows(r, rank);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        BitRref { rank, pivots, reduced: m }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Canonical kernel basis, one row per basis vector.
    pub fn kernel(&self) -> BitMatrix {
        let r = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        r.pivots.iter().for_each(|p| is_pivot[*p] = true);
        let free: Vec<usize> = (0..self.ncols).filter(|c| !is_pivot[*c]).collect();
        let mut basis = Self::zeros(free.len(), self.ncols);
        for (k, f) in free.iter().enumerate() {
            basis.set(k, *f, true);
            for (row, p) in r.pivots.iter().enumerate() {
                if r.reduced.get(row, *f) {
                    basis.set(k, *p, true);
                }
            }
        }
        basis.rref().reduced.take_rows(free.len())
    }

    fn take_rows(mut self, n: usize) -> Self {
        self.data.truncate(n * self.words);
        self.nrows = n;
        self
    }

    /// Canonical solution (free variables zero) of `self * x = b`.
    pub fn solve(&self, b: &[bool]) -> Result<Option<Vec<bool>>, Error> {
        if b.len() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.nrows
            )));
        }
        let mut aug = Self::zeros(self.nrows, self.ncols + 1);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.ncols, b[r]);
        }
        let red = aug.rref();
        if red.pivots.last() == Some(&self.ncols) {
            return Ok(None);
        }
        let mut x = vec![false; self.ncols];
        for (row, p) in red.pivots.iter().enumerate() {
            x[*p] = red.reduced.get(row, self.ncols);
        }
        Ok(Some(x))
    }
}
