//! Runtime-tagged matrices over F2, Fp or Q.

use num_traits::ToPrimitive;

use super::bitmat::BitMatrix;
use super::ring::{Coefficients, Fp, Rationals, Ring, F2};
use super::sparse::SparseMatrix;
use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldMatrix {
    F2(BitMatrix),
    Fp(SparseMatrix<Fp>),
    Q(SparseMatrix<Rationals>),
}

impl FieldMatrix {
    /// Builds a matrix from integer entries reduced into the field.
    pub fn from_entries(field: Coefficients, rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Result<Self, Error> {
        match field.normalized()? {
            Coefficients::F2 => {
                let m = SparseMatrix::from_triplets(F2, rows, cols, entries.iter().map(|(r, c, v)| (*r, *c, F2.from_i64(*v))).collect())?;
                Ok(FieldMatrix::F2(BitMatrix::from_sparse(&m)))
            }
            Coefficients::Fp(p) => {
                let f = Fp::new(p)?;
                let m = SparseMatrix::from_triplets(f, rows, cols, entries.iter().map(|(r, c, v)| (*r, *c, f.from_i64(*v))).collect())?;
                Ok(FieldMatrix::Fp(m))
            }
            Coefficients::Q => {
                let m = SparseMatrix::from_triplets(
                    Rationals,
                    rows,
                    cols,
                    entries.iter().map(|(r, c, v)| (*r, *c, Rationals.from_i64(*v))).collect(),
                )?;
                Ok(FieldMatrix::Q(m))
            }
            Coefficients::Z => Err(Error::InvalidField("z is not a field".into())),
        }
    }

    pub fn zeros(field: Coefficients, rows: usize, cols: usize) -> Result<Self, Error> {
        Self::from_entries(field, rows, cols, &[])
    }

    pub fn field(&self) -> Coefficients {
        match self {
            FieldMatrix::F2(_) => Coefficients::F2,
            FieldMatrix::Fp(m) => m.ring().coefficients(),
            FieldMatrix::Q(_) => Coefficients::Q,
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            FieldMatrix::F2(m) => m.nrows(),
            FieldMatrix::Fp(m) => m.nrows(),
            FieldMatrix::Q(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            FieldMatrix::F2(m) => m.ncols(),
            FieldMatrix::Fp(m) => m.ncols(),
            FieldMatrix::Q(m) => m.ncols(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            FieldMatrix::F2(m) => m.rank(),
            FieldMatrix::Fp(m) => m.rank(),
            FieldMatrix::Q(m) => m.rank(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldMatrix::F2(m) => m.is_zero(),
            FieldMatrix::Fp(m) => m.is_zero(),
            FieldMatrix::Q(m) => m.is_zero(),
        }
    }

    /// Nonzero entries as `(row, col, value)`; F_p values are residues and
    /// rationals must be integral.
    pub fn entries(&self) -> Vec<(usize, usize, i64)> {
        match self {
            FieldMatrix::F2(m) => m.to_sparse().triplets().into_iter().map(|(r, c, v)| (r, c, v as i64)).collect(),
            FieldMatrix::Fp(m) => m.triplets().into_iter().map(|(r, c, v)| (r, c, v as i64)).collect(),
            FieldMatrix::Q(m) => m
                .triplets()
                .into_iter()
                .map(|(r, c, v)| (r, c, v.to_integer().to_i64().expect("integral entry")))
                .collect(),
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix, Error> {
        match (self, other) {
            (FieldMatrix::F2(a), FieldMatrix::F2(b)) => Ok(FieldMatrix::F2(a.mul(b)?)),
            (FieldMatrix::Fp(a), FieldMatrix::Fp(b)) if a.ring() == b.ring() => Ok(FieldMatrix::Fp(a.mul(b)?)),
            (FieldMatrix::Q(a), FieldMatrix::Q(b)) => Ok(FieldMatrix::Q(a.mul(b)?)),
            _ => Err(Error::DimensionMismatch("matrices over different fields".into())),
        }
    }

    /// Converts to a generic sparse matrix over the ring `R` through integer
    /// entries.
    pub fn to_sparse<R: Ring>(&self, ring: R) -> SparseMatrix<R> {
        let triplets = self.entries().into_iter().map(|(r, c, v)| (r, c, ring.from_i64(v))).collect();
        SparseMatrix::from_triplets(ring, self.nrows(), self.ncols(), triplets).expect("entries within bounds")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_dispatch() {
        let e = [(0, 0, 1), (1, 1, 2), (2, 0, 1), (2, 1, 2)];
        assert_eq!(FieldMatrix::from_entries(Coefficients::F2, 3, 2, &e).unwrap().rank(), 1);
        assert_eq!(FieldMatrix::from_entries(Coefficients::Fp(3), 3, 2, &e).unwrap().rank(), 2);
        assert_eq!(FieldMatrix::from_entries(Coefficients::Q, 3, 2, &e).unwrap().rank(), 2);
        assert!(FieldMatrix::from_entries(Coefficients::Z, 1, 1, &[]).is_err());
    }
}
