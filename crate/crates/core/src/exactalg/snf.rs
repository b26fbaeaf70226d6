//! Integer matrices and Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Sparse integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, BigInt)>>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, triplets: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Result<Self, Error> {
        let mut m = Self::zeros(nrows, ncols);
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            if v.is_zero() {
                continue;
            }
            match m.rows[r].iter_mut().find(|e| e.0 == c) {
                Some(e) => e.1 += v,
                None => m.rows[r].push((c, v)),
            }
        }
        for row in &mut m.rows {
            row.retain(|e| !e.1.is_zero());
            row.sort_by_key(|e| e.0);
        }
        Ok(m)
    }

    pub fn from_dense(dense: &[Vec<BigInt>], ncols: usize) -> Self {
        let rows = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect())
            .collect();
        IntMatrix { nrows: dense.len(), ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rows(&self) -> &[Vec<(usize, BigInt)>] {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, Error> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut triplets = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.rows[*k] {
                    triplets.push((r, *c, a * b));
                }
            }
        }
        IntMatrix::from_triplets(self.nrows, other.ncols, triplets)
    }
}

/// `U * M * V = diag(factors)` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Positive invariant factors with `d_k | d_{k+1}`; their count is the rank.
    pub factors: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors different from one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl Dense {
    fn nrows(&self) -> usize {
        self.a.len()
    }
    /// row_dst -= q * row_src
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in std::iter::once(&mut self.a).chain(self.u.as_mut()) {
            let (s, d) = pick_two(m, src, dst);
            for (x, y) in d.iter_mut().zip(s.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
    }

    /// col_dst -= q * col_src
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.a {
            if !row[src].is_zero() {
                let t = q * &row[src];
                row[dst] -= t;
            }
        }
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                if !row[src].is_zero() {
                    let t = q * &row[src];
                    row[dst] -= t;
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in std::iter::once(&mut self.a).chain(self.u.as_mut()) {
            for x in m[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
}

fn pick_two(m: &mut [Vec<BigInt>], src: usize, dst: usize) -> (&Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(src, dst);
    if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form with transforms. Pivots are chosen with the smallest
/// absolute value in the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (factors, u, v) = run_smith(m, true);
    SmithForm { factors, u: u.unwrap(), v: v.unwrap() }
}

/// Invariant factors only; skips the transform bookkeeping.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    run_smith(m, false).0
}

type Transforms = (Vec<BigInt>, Option<Vec<Vec<BigInt>>>, Option<Vec<Vec<BigInt>>>);

fn run_smith(m: &IntMatrix, with_transforms: bool) -> Transforms {
    let mut d = Dense {
        a: m.to_dense(),
        u: with_transforms.then(|| identity(m.nrows)),
        v: with_transforms.then(|| identity(m.ncols)),
    };
    let (nr, nc) = (d.nrows(), m.ncols);
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..nr {
            for c in t..nc {
                let x = &d.a[r][c];
                if !x.is_zero() && best.map_or(true, |(br, bc)| x.abs() < d.a[br][bc].abs()) {
                    best = Some((r, c));
                    if x.abs().is_one() {
                        break;
                    }
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        d.swap_cols(t, pc);
        loop {
            let mut dirty = false;
            for r in t + 1..nr {
                if !d.a[r][t].is_zero() {
                    let q = d.a[r][t].div_floor(&d.a[t][t]);
                    d.row_sub(r, t, &q);
                    if !d.a[r][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for c in t + 1..nc {
                if !d.a[t][c].is_zero() {
                    let q = d.a[t][c].div_floor(&d.a[t][t]);
                    d.col_sub(c, t, &q);
                    if !d.a[t][c].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // a smaller remainder appeared in row or column t; move it to the pivot
                let mut best = (t, t);
                for r in t..nr {
                    if !d.a[r][t].is_zero() && d.a[r][t].abs() < d.a[best.0][best.1].abs() {
                        best = (r, t);
                    }
                }
                for c in t..nc {
                    if !d.a[t][c].is_zero() && d.a[t][c].abs() < d.a[best.0][best.1].abs() {
                        best = (t, c);
                    }
                }
                d.swap_rows(t, best.0);
                d.swap_cols(t, best.1);
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let piv = d.a[t][t].clone();
            let offender = (t + 1..nr).find(|r| (t + 1..nc).any(|c| !d.a[*r][c].is_multiple_of(&piv)));
            match offender {
                Some(r) => {
                    let minus_one = -BigInt::one();
                    d.row_sub(t, r, &minus_one);
                }
                None => break,
            }
        }
        if d.a[t][t].is_negative() {
            d.negate_row(t);
        }
        t += 1;
    }
    let factors = (0..t).map(|k| d.a[k][k].clone()).filter(|x| !x.is_zero()).collect();
    (factors, d.u, d.v)
}

/// Splits invariant factors into prime-power elementary divisors, sorted.
pub fn elementary_divisors(factors: &[BigInt]) -> Vec<u64> {
    let mut out = Vec::new();
    for f in factors {
        let mut n = f.abs().to_u64().expect("torsion order fits in 64 bits");
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                out.push(q);
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
    }
    out.sort_unstable();
    out
}
