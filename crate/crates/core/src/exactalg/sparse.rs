//! Sparse vectors and matrices over a [`Ring`], with exact elimination over
//! fields.

use std::collections::BTreeMap;

use super::ring::{Field, Ring};
use crate::error::Error;

/// Sorted `(index, value)` pairs with no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec<E> {
    entries: Vec<(usize, E)>,
}

impl<E> Default for SparseVec<E> {
    fn default() -> Self {
        SparseVec { entries: Vec::new() }
    }
}

impl<E: Clone + PartialEq> SparseVec<E> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs<R: Ring<Elem = E>>(ring: &R, mut pairs: Vec<(usize, E)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, E)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w = ring.add(w, &v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !ring.is_zero(v));
        SparseVec { entries }
    }

    pub fn unit<R: Ring<Elem = E>>(ring: &R, i: usize) -> Self {
        SparseVec { entries: vec![(i, ring.one())] }
    }

    pub fn from_dense<R: Ring<Elem = E>>(ring: &R, dense: &[E]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| !ring.is_zero(v))
            .map(|(i, v)| (i, v.clone()))
            .collect();
        SparseVec { entries }
    }

    pub fn to_dense<R: Ring<Elem = E>>(&self, ring: &R, len: usize) -> Vec<E> {
        let mut out = vec![ring.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, E)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, E)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0)
    }

    pub fn get(&self, i: usize) -> Option<&E> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// `self + c * other`.
    pub fn axpy<R: Ring<Elem = E>>(&self, ring: &R, c: &E, other: &Self) -> Self {
        if ring.is_zero(c) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, ring.mul(c, y)));
                        b.next();
                    } else {
                        let s = ring.add(x, &ring.mul(c, y));
                        if !ring.is_zero(&s) {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, ring.mul(c, y)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        if ring.is_zero(c) {
            return Self::default();
        }
        let entries = self
            .entries
            .iter()
            .map(|(i, v)| (*i, ring.mul(c, v)))
            .filter(|(_, v)| !ring.is_zero(v))
            .collect();
        SparseVec { entries }
    }

    pub fn dot<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> E {
        let mut acc = ring.zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            if i < j {
                a += 1;
            } else if j < i {
                b += 1;
            } else {
                acc = ring.add(&acc, &ring.mul(x, y));
                a += 1;
                b += 1;
            }
        }
        acc
    }

    /// Applies an index map; indices mapped to `None` are dropped.
    pub fn reindex(&self, f: impl Fn(usize) -> Option<usize>) -> Self {
        let mut entries: Vec<(usize, E)> = self
            .entries
            .iter()
            .filter_map(|(i, v)| f(*i).map(|k| (k, v.clone())))
            .collect();
        entries.sort_by_key(|e| e.0);
        SparseVec { entries }
    }
}

/// Row-major sparse matrix. `rows[r]` holds the nonzero entries of row `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<R: Ring> {
    ring: R,
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec<R::Elem>>,
}

impl<R: Ring> SparseMatrix<R> {
    pub fn zeros(ring: R, nrows: usize, ncols: usize) -> Self {
        SparseMatrix { ring, nrows, ncols, rows: vec![SparseVec::new(); nrows] }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let rows = (0..n).map(|i| SparseVec::unit(&ring, i)).collect();
        SparseMatrix { ring, nrows: n, ncols: n, rows }
    }

    pub fn from_rows(ring: R, ncols: usize, rows: Vec<SparseVec<R::Elem>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.max_index().map_or(true, |m| m < ncols)));
        SparseMatrix { ring, nrows: rows.len(), ncols, rows }
    }

    /// Builds a matrix whose `c`-th column is `cols[c]`.
    pub fn from_columns(ring: R, nrows: usize, cols: &[SparseVec<R::Elem>]) -> Self {
        let mut buckets: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); nrows];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.entries() {
                buckets[*r].push((c, v.clone()));
            }
        }
        let rows = buckets.into_iter().map(|entries| SparseVec { entries }).collect();
        SparseMatrix { ring, nrows, ncols: cols.len(), rows }
    }

    pub fn from_triplets(ring: R, nrows: usize, ncols: usize, triplets: Vec<(usize, usize, R::Elem)>) -> Result<Self, Error> {
        let mut buckets: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            buckets[r].push((c, v));
        }
        let rows = buckets.into_iter().map(|b| SparseVec::from_pairs(&ring, b)).collect();
        Ok(SparseMatrix { ring, nrows, ncols, rows })
    }

    pub fn from_dense(ring: R, dense: &[Vec<R::Elem>], ncols: usize) -> Self {
        let rows = dense.iter().map(|r| SparseVec::from_dense(&ring, r)).collect();
        SparseMatrix { ring, nrows: dense.len(), ncols, rows }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rows(&self) -> &[SparseVec<R::Elem>] {
        &self.rows
    }
    pub fn row(&self, r: usize) -> &SparseVec<R::Elem> {
        &self.rows[r]
    }
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.nnz()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    pub fn get(&self, r: usize, c: usize) -> R::Elem {
        self.rows[r].get(c).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<R::Elem>> {
        self.rows.iter().map(|r| r.to_dense(&self.ring, self.ncols)).collect()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, R::Elem)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.entries().iter().map(move |(c, v)| (r, *c, v.clone())))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.entries() {
                buckets[*c].push((r, v.clone()));
            }
        }
        let rows = buckets.into_iter().map(|entries| SparseVec { entries }).collect();
        SparseMatrix { ring: self.ring.clone(), nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn columns(&self) -> Vec<SparseVec<R::Elem>> {
        self.transpose().rows
    }

    pub fn mul_vec(&self, x: &SparseVec<R::Elem>) -> Result<SparseVec<R::Elem>, Error> {
        if x.max_index().map_or(false, |m| m >= self.ncols) {
            return Err(Error::DimensionMismatch(format!(
                "vector index out of range for {} columns",
                self.ncols
            )));
        }
        let pairs = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| (r, row.dot(&self.ring, x)))
            .filter(|(_, v)| !self.ring.is_zero(v))
            .collect();
        Ok(SparseVec { entries: pairs })
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, R::Elem> = BTreeMap::new();
                for (k, a) in row.entries() {
                    for (c, b) in other.rows[*k].entries() {
                        let prod = self.ring.mul(a, b);
                        let slot = acc.entry(*c).or_insert_with(|| self.ring.zero());
                        *slot = self.ring.add(slot, &prod);
                    }
                }
                SparseVec {
                    entries: acc.into_iter().filter(|(_, v)| !self.ring.is_zero(v)).collect(),
                }
            })
            .collect();
        Ok(SparseMatrix { ring: self.ring.clone(), nrows: self.nrows, ncols: other.ncols, rows })
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch("matrix sum of different shapes".into()));
        }
        let one = self.ring.one();
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.axpy(&self.ring, &one, b))
            .collect();
        Ok(SparseMatrix { ring: self.ring.clone(), nrows: self.nrows, ncols: self.ncols, rows })
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let rows = self.rows.iter().map(|r| r.scale(&self.ring, c)).collect();
        SparseMatrix { ring: self.ring.clone(), nrows: self.nrows, ncols: self.ncols, rows }
    }

    /// Maps every entry into another ring.
    pub fn map_ring<S: Ring>(&self, target: S, f: impl Fn(&R::Elem) -> S::Elem) -> SparseMatrix<S> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let entries = row
                    .entries()
                    .iter()
                    .map(|(c, v)| (*c, f(v)))
                    .filter(|(_, v)| !target.is_zero(v))
                    .collect();
                SparseVec { entries }
            })
            .collect();
        SparseMatrix { ring: target, nrows: self.nrows, ncols: self.ncols, rows }
    }

    /// Keeps the listed rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut colmap = vec![usize::MAX; self.ncols];
        for (k, c) in cols.iter().enumerate() {
            colmap[*c] = k;
        }
        let new_rows = rows
            .iter()
            .map(|r| self.rows[*r].reindex(|c| (colmap[c] != usize::MAX).then(|| colmap[c])))
            .collect();
        SparseMatrix { ring: self.ring.clone(), nrows: rows.len(), ncols: cols.len(), rows: new_rows }
    }
}

/// Reduced row-echelon data of a matrix over a field.
#[derive(Clone, Debug)]
pub struct Rref<R: Ring> {
    pub rank: usize,
    /// Pivot column of each nonzero row, strictly increasing.
    pub pivots: Vec<usize>,
    /// The nonzero rows of the reduced row-echelon form.
    pub reduced: SparseMatrix<R>,
}

/// Incremental echelon structure over a field: rows are inserted one by one
/// and reduced against the pivots found so far.
pub(crate) struct Echelon<R: Field> {
    ring: R,
    ncols: usize,
    pivot_of_col: Vec<Option<usize>>,
    rows: Vec<SparseVec<R::Elem>>,
}

impl<R: Field> Echelon<R> {
    pub(crate) fn new(ring: R, ncols: usize) -> Self {
        Echelon { ring, ncols, pivot_of_col: vec![None; ncols], rows: Vec::new() }
    }

    /// Reduces `v` against the current pivots (leading-entry elimination).
    pub(crate) fn reduce(&self, v: &SparseVec<R::Elem>) -> SparseVec<R::Elem> {
        let mut cur = v.clone();
        let mut start = 0;
        loop {
            let hit = cur.entries()[start.min(cur.nnz())..]
                .iter()
                .enumerate()
                .find(|(_, (c, _))| self.pivot_of_col[*c].is_some())
                .map(|(k, (c, x))| (start + k, *c, x.clone()));
            let Some((pos, col, coeff)) = hit else { break };
            let prow = &self.rows[self.pivot_of_col[col].unwrap()];
            cur = cur.axpy(&self.ring, &self.ring.neg(&coeff), prow);
            // entries before `pos` are untouched since pivot rows start at `col`
            start = pos;
        }
        cur
    }

    /// Inserts `v`; returns the new pivot column if `v` was independent.
    pub(crate) fn insert(&mut self, v: &SparseVec<R::Elem>) -> Option<usize> {
        let r = self.reduce(v);
        let lead = r.leading()?;
        let inv = self.ring.inverse(&r.entries()[0].1).expect("field element");
        let normalized = r.scale(&self.ring, &inv);
        self.pivot_of_col[lead] = Some(self.rows.len());
        self.rows.push(normalized);
        Some(lead)
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Finishes to the reduced row-echelon form.
    pub(crate) fn into_rref(self) -> Rref<R> {
        let Echelon { ring, ncols, pivot_of_col, mut rows } = self;
        let mut order: Vec<(usize, usize)> =
            pivot_of_col.iter().enumerate().filter_map(|(c, r)| r.map(|r| (c, r))).collect();
        order.sort();
        // back-substitution from the last pivot upwards
        for k in (0..order.len()).rev() {
            let (_, r) = order[k];
            let mut row = rows[r].clone();
            for &(c2, r2) in &order[k + 1..] {
                if let Some(x) = row.get(c2).cloned() {
                    row = row.axpy(&ring, &ring.neg(&x), &rows[r2]);
                }
            }
            rows[r] = row;
        }
        let pivots: Vec<usize> = order.iter().map(|p| p.0).collect();
        let reduced_rows: Vec<_> = order.iter().map(|&(_, r)| rows[r].clone()).collect();
        Rref {
            rank: pivots.len(),
            pivots,
            reduced: SparseMatrix::from_rows(ring, ncols, reduced_rows),
        }
    }
}

impl<R: Field> SparseMatrix<R> {
    pub fn rref(&self) -> Rref<R> {
        let mut ech = Echelon::new(self.ring.clone(), self.ncols);
        for row in &self.rows {
            ech.insert(row);
        }
        ech.into_rref()
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.nrows <= self.ncols {
            let mut ech = Echelon::new(self.ring.clone(), self.ncols);
            self.rows.iter().for_each(|r| {
                ech.insert(r);
            });
            ech.rank()
        } else {
            self.transpose().rank()
        }
    }

    /// `{x : self * x = 0}` with its canonical basis.
    pub fn kernel(&self) -> Subspace<R> {
        let rref = self.rref();
        kernel_from_rref(&rref, self.ncols)
    }

    /// Column space with its canonical basis.
    pub fn image(&self) -> Subspace<R> {
        Subspace::from_spanning(self.ring.clone(), self.nrows, self.columns())
    }

    /// Returns the canonical solution of `self * x = b` (free variables zero),
    /// or `None` if the system is inconsistent.
    pub fn solve(&self, b: &SparseVec<R::Elem>) -> Result<Option<SparseVec<R::Elem>>, Error> {
        if b.max_index().map_or(false, |m| m >= self.nrows) {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side longer than the {} rows",
                self.nrows
            )));
        }
        let aug_col = self.ncols;
        let mut ech = Echelon::new(self.ring.clone(), self.ncols + 1);
        for (r, row) in self.rows.iter().enumerate() {
            let mut entries = row.entries().to_vec();
            if let Some(v) = b.get(r) {
                entries.push((aug_col, v.clone()));
            }
            ech.insert(&SparseVec { entries });
        }
        let rref = ech.into_rref();
        if rref.pivots.last() == Some(&aug_col) {
            return Ok(None);
        }
        let pairs = rref
            .pivots
            .iter()
            .zip(rref.reduced.rows())
            .filter_map(|(p, row)| row.get(aug_col).map(|v| (*p, v.clone())))
            .collect();
        Ok(Some(SparseVec::from_pairs(&self.ring, pairs)))
    }

    /// `{x : self * x ∈ target}`.
    pub fn preimage(&self, target: &Subspace<R>) -> Result<Subspace<R>, Error> {
        if target.ambient() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "subspace of a {}-dimensional space vs matrix with {} rows",
                target.ambient(),
                self.nrows
            )));
        }
        let reduced_cols: Vec<_> = self.columns().iter().map(|c| target.reduce(c)).collect();
        let m = SparseMatrix::from_columns(self.ring.clone(), self.nrows, &reduced_cols);
        Ok(m.kernel())
    }
}

fn kernel_from_rref<R: Field>(rref: &Rref<R>, ncols: usize) -> Subspace<R> {
    let ring = rref.reduced.ring().clone();
    let mut is_pivot = vec![false; ncols];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    let mut cols_of_free: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); ncols];
    for (p, row) in rref.pivots.iter().zip(rref.reduced.rows()) {
        for (c, v) in row.entries() {
            if *c != *p {
                cols_of_free[*c].push((*p, ring.neg(v)));
            }
        }
    }
    let vecs = (0..ncols)
        .filter(|c| !is_pivot[*c])
        .map(|f| {
            let mut pairs = std::mem::take(&mut cols_of_free[f]);
            pairs.push((f, ring.one()));
            SparseVec::from_pairs(&ring, pairs)
        })
        .collect();
    Subspace::from_spanning(ring, ncols, vecs)
}

/// A linear subspace stored by its reduced row-echelon basis, which is the
/// canonical representative.
#[derive(Clone, Debug)]
pub struct Subspace<R: Ring> {
    ring: R,
    ambient: usize,
    basis: Vec<SparseVec<R::Elem>>,
    pivots: Vec<usize>,
}

impl<R: Field> Subspace<R> {
    pub fn zero(ring: R, ambient: usize) -> Self {
        Subspace { ring, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ring: R, ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| SparseVec::unit(&ring, i)).collect();
        Subspace { ring, ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn from_spanning(ring: R, ambient: usize, vecs: Vec<SparseVec<R::Elem>>) -> Self {
        let mut ech = Echelon::new(ring.clone(), ambient);
        for v in &vecs {
            ech.insert(v);
        }
        let rref = ech.into_rref();
        Subspace { ring, ambient, basis: rref.reduced.rows, pivots: rref.pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[SparseVec<R::Elem>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Remainder of `v` after removing its component along the pivots; zero
    /// exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &SparseVec<R::Elem>) -> SparseVec<R::Elem> {
        let mut out = v.clone();
        for (p, b) in self.pivots.iter().zip(&self.basis) {
            if let Some(c) = v.get(*p) {
                out = out.axpy(&self.ring, &self.ring.neg(c), b);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec<R::Elem>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &SparseVec<R::Elem>) -> Option<Vec<R::Elem>> {
        self.contains(v).then(|| {
            self.pivots
                .iter()
                .map(|p| v.get(*p).cloned().unwrap_or_else(|| self.ring.zero()))
                .collect()
        })
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut vecs = self.basis.clone();
        vecs.extend(other.basis.iter().cloned());
        Subspace::from_spanning(self.ring.clone(), self.ambient, vecs)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        // x = sum a_i u_i lies in other iff reduce_other(sum a_i u_i) = 0
        let cols: Vec<_> = self.basis.iter().map(|u| other.reduce(u)).collect();
        let m = SparseMatrix::from_columns(self.ring.clone(), self.ambient, &cols);
        let coeffs = m.kernel();
        let vecs = coeffs
            .basis()
            .iter()
            .map(|a| {
                a.entries().iter().fold(SparseVec::new(), |acc, (i, c)| acc.axpy(&self.ring, c, &self.basis[*i]))
            })
            .collect();
        Subspace::from_spanning(self.ring.clone(), self.ambient, vecs)
    }

    /// Matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> SparseMatrix<R> {
        SparseMatrix::from_columns(self.ring.clone(), self.ambient, &self.basis)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }
}

impl<R: Ring> PartialEq for Subspace<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.pivots == other.pivots && self.basis == other.basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::ring::{Fp, Rationals, F2};
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};

    fn mat<R: Field>(ring: R, dense: &[&[i64]]) -> SparseMatrix<R> {
        let ncols = dense.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<R::Elem>> =
            dense.iter().map(|r| r.iter().map(|v| ring.from_i64(*v)).collect()).collect();
        SparseMatrix::from_dense(ring, &rows, ncols)
    }

    fn random<R: Field>(ring: R, n: usize, m: usize, p: i64, density: f64, seed: u64) -> SparseMatrix<R> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<R::Elem>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if rng.gen_bool(density) {
                            ring.from_i64(rng.gen_range(0..p))
                        } else {
                            ring.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        SparseMatrix::from_dense(ring, &rows, m)
    }

    #[test]
    fn identity_rref() {
        let m = SparseMatrix::identity(F2, 3);
        let r = m.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(m.kernel().dim(), 0);
    }

    #[test]
    fn all_ones_kernel() {
        let m = mat(F2, &[&[1, 1], &[1, 1]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis()[0].to_dense(&F2, 2), vec![1, 1]);
    }

    #[test]
    fn rank_nullity_f3() {
        let f3 = Fp::new(3).unwrap();
        for seed in 0..10 {
            let m = random(f3, 20, 20, 3, 0.3, seed);
            assert_eq!(m.rank() + m.kernel().dim(), 20);
        }
    }

    #[test]
    fn solve_identity_and_zero() {
        let f5 = Fp::new(5).unwrap();
        let id = SparseMatrix::identity(f5, 4);
        let b = SparseVec::from_pairs(&f5, vec![(0, 3), (2, 4)]);
        assert_eq!(id.solve(&b).unwrap(), Some(b.clone()));
        let z = SparseMatrix::zeros(f5, 4, 4);
        assert_eq!(z.solve(&b).unwrap(), None);
        assert!(id.solve(&SparseVec::unit(&f5, 9)).is_err());
    }

    #[test]
    fn solve_resubstitution() {
        let q = Rationals;
        for seed in 0..8 {
            let m = random(q, 7, 9, 5, 0.4, seed);
            let x0 = random(q, 1, 9, 7, 0.6, seed + 100).rows()[0].clone();
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap().expect("consistent by construction");
            assert_eq!(m.mul_vec(&x).unwrap(), b);
        }
    }

    #[test]
    fn preimage_edge_cases() {
        let f3 = Fp::new(3).unwrap();
        let m = random(f3, 6, 8, 3, 0.4, 7);
        let full = Subspace::full(f3, 6);
        assert_eq!(m.preimage(&full).unwrap().dim(), 8);
        let zero = Subspace::zero(f3, 6);
        assert_eq!(m.preimage(&zero).unwrap(), m.kernel());
    }

    #[test]
    fn preimage_dimension_count() {
        let f2 = F2;
        for seed in 0..20 {
            let m = random(f2, 10, 12, 2, 0.3, seed);
            let w = Subspace::from_spanning(f2, 10, random(f2, 4, 10, 2, 0.5, seed + 50).rows().to_vec());
            let pre = m.preimage(&w).unwrap();
            let expected = m.kernel().dim() + w.intersection(&m.image()).dim();
            assert_eq!(pre.dim(), expected);
            for v in pre.basis() {
                assert!(w.contains(&m.mul_vec(v).unwrap()));
            }
        }
    }

    #[test]
    fn rref_is_canonical_under_row_operations() {
        let q = Rationals;
        let m = random(q, 5, 7, 4, 0.5, 3);
        let mut rows = m.rows().to_vec();
        rows.reverse();
        let two = q.from_i64(2);
        rows[0] = rows[0].axpy(&q, &two, &rows[1]);
        let m2 = SparseMatrix::from_rows(q, 7, rows);
        assert_eq!(m.rref().reduced, m2.rref().reduced);
    }

    proptest! {
        #[test]
        fn rank_of_transpose(seed in 0u64..500, n in 1usize..12, m in 1usize..12) {
            let f7 = Fp::new(7).unwrap();
            let a = random(f7, n, m, 7, 0.35, seed);
            prop_assert_eq!(a.rank(), a.transpose().rank());
            let b = random(F2, n, m, 2, 0.35, seed);
            prop_assert_eq!(b.rank(), b.transpose().rank());
            let c = random(Rationals, n, m, 5, 0.35, seed);
            prop_assert_eq!(c.rank(), c.transpose().rank());
        }
    }
}
