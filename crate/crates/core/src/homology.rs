//! Bigraded homology over fields and the integers, canonical homology bases,
//! and the filtration maps used by the invariant search.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::reduce::vec_over;
use crate::complex::{cube_cochains, reduce_cochains, Cube, EnhancedState, GradedComplex, ReducedComplex, Slice};
use crate::cube::FrobeniusFlavor;
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};
use crate::exactalg::{
    elementary_divisors, invariant_factors, Coefficients, Field, IntMatrix, Integers, Ring, SparseMatrix, SparseVec,
    Subspace,
};

/// One cell of a homology table. `j` is absent for ungraded (Bar-Natan)
/// homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCell {
    pub i: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<i32>,
    pub rank: usize,
    /// Elementary divisors of the torsion subgroup (integral tables only).
    pub torsion: Vec<u64>,
}

/// Nonzero homology groups, sorted by `(j, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub coefficients: Coefficients,
    pub cells: Vec<HomologyCell>,
}

impl HomologyTable {
    fn from_map(coefficients: Coefficients, map: BTreeMap<(Option<i32>, i32), (usize, Vec<u64>)>) -> Self {
        let cells = map
            .into_iter()
            .filter(|(_, (r, t))| *r > 0 || !t.is_empty())
            .map(|((j, i), (rank, torsion))| HomologyCell { i, j, rank, torsion })
            .collect();
        HomologyTable { coefficients, cells }
    }

    pub fn cell(&self, i: i32, j: i32) -> Option<&HomologyCell> {
        self.cells.iter().find(|c| c.i == i && c.j == Some(j))
    }

    /// Free rank (or dimension over a field) at `(i, j)`.
    pub fn rank(&self, i: i32, j: i32) -> usize {
        self.cell(i, j).map_or(0, |c| c.rank)
    }

    pub fn torsion(&self, i: i32, j: i32) -> &[u64] {
        self.cell(i, j).map_or(&[], |c| &c.torsion)
    }

    /// Rank in an ungraded table.
    pub fn degree_rank(&self, i: i32) -> usize {
        self.cells.iter().filter(|c| c.i == i).map(|c| c.rank).sum()
    }

    pub fn total_rank(&self) -> usize {
        self.cells.iter().map(|c| c.rank).sum()
    }

    /// `sum_i (-1)^i rank` for each quantum grading.
    pub fn euler_characteristic(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for c in &self.cells {
            if let Some(j) = c.j {
                *out.entry(j).or_insert(0) += if c.i.rem_euclid(2) == 0 { c.rank as i64 } else { -(c.rank as i64) };
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Number of `Z/2^k` summands at `(i, j)`.
    pub fn two_torsion_count(&self, i: i32, j: i32) -> usize {
        self.torsion(i, j).iter().filter(|t| t.is_power_of_two()).count()
    }
}

/// Graded Euler characteristic of a complex, per quantum grading.
pub fn complex_euler_characteristic<R: Ring>(c: &GradedComplex<R>) -> BTreeMap<i32, i64> {
    let mut out = BTreeMap::new();
    for g in c.groups() {
        for j in &g.q {
            *out.entry(*j).or_insert(0) += if g.i.rem_euclid(2) == 0 { 1 } else { -1 };
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Homology of an explicitly assembled complex over a field by direct rank
/// computations: per bigrading for the Khovanov flavor, per degree for the
/// Bar-Natan flavor.
pub fn field_homology<F: Field>(c: &GradedComplex<F>) -> HomologyTable {
    let mut map = BTreeMap::new();
    for g in c.groups() {
        match c.flavor {
            FrobeniusFlavor::Khovanov => {
                let mut js: Vec<i32> = g.q.clone();
                js.sort_unstable();
                js.dedup();
                for j in js {
                    let (src, _, out) = c.quantum_block(g.i, j);
                    let (_, _, inc) = c.quantum_block(g.i - 1, j);
                    let rank = src.len() - out.rank() - inc.rank();
                    map.insert((Some(j), g.i), (rank, vec![]));
                }
            }
            FrobeniusFlavor::BarNatan => {
                let out = c.differential(g.i).map_or(0, |m| m.rank());
                let inc = c.differential(g.i - 1).map_or(0, |m| m.rank());
                map.insert((None, g.i), (g.len() - out - inc, vec![]));
            }
        }
    }
    HomologyTable::from_map(c.ring().coefficients(), map)
}

fn to_int_matrix(m: &SparseMatrix<Integers>) -> IntMatrix {
    IntMatrix::from_triplets(m.nrows(), m.ncols(), m.triplets().into_iter().map(|(r, c, v)| (r, c, BigInt::from(v))))
        .expect("in range")
}

fn integral_cell(dim: usize, out: &SparseMatrix<Integers>, inc: &SparseMatrix<Integers>) -> (usize, Vec<u64>) {
    let out_rank = invariant_factors(&to_int_matrix(out)).len();
    let inc_factors = invariant_factors(&to_int_matrix(inc));
    (dim - out_rank - inc_factors.len(), elementary_divisors(&inc_factors))
}

/// Integral homology of an explicitly assembled complex by Smith normal form
/// of its blocks, without any reduction. Intended for small complexes.
pub fn integral_homology_direct(c: &GradedComplex<Integers>) -> HomologyTable {
    let mut map = BTreeMap::new();
    for g in c.groups() {
        let mut js: Vec<i32> = g.q.clone();
        js.sort_unstable();
        js.dedup();
        for j in js {
            let (src, _, out) = c.quantum_block(g.i, j);
            let (_, _, inc) = c.quantum_block(g.i - 1, j);
            map.insert((Some(j), g.i), integral_cell(src.len(), &out, &inc));
        }
    }
    HomologyTable::from_map(Coefficients::Z, map)
}

/// Integral homology of a Khovanov complex: cancellation first, then Smith
/// normal form of the small remaining blocks.
pub fn integral_homology(c: &GradedComplex<Integers>) -> Result<HomologyTable> {
    if c.flavor != FrobeniusFlavor::Khovanov {
        return Err(Error::Precondition("bigraded integral homology needs the Khovanov flavor".into()));
    }
    let r = reduce_cochains(c.to_cochains(), false);
    Ok(table_from_reduced(Coefficients::Z, std::iter::once(&r))?)
}

fn table_from_reduced<'a>(coeffs: Coefficients, models: impl Iterator<Item = &'a ReducedComplex>) -> Result<HomologyTable> {
    let mut map = BTreeMap::new();
    for r in models {
        for g in r.groups() {
            let mut js: Vec<i32> = g.q.clone();
            js.sort_unstable();
            js.dedup();
            for j in js {
                let src: Vec<usize> = (0..g.len()).filter(|k| g.q[*k] == j).collect();
                let block = |i: i32| -> SparseMatrix<Integers> {
                    let m = r.graded_differential(i);
                    let cols: Vec<usize> = r.group(i).map_or(vec![], |g| (0..g.len()).filter(|k| g.q[*k] == j).collect());
                    let rows: Vec<usize> = r.group(i + 1).map_or(vec![], |g| (0..g.len()).filter(|k| g.q[*k] == j).collect());
                    m.submatrix(&rows, &cols)
                };
                let (out, inc) = (block(g.i), block(g.i - 1));
                let cell = match coeffs.normalized()? {
                    Coefficients::Z => integral_cell(src.len(), &out, &inc),
                    field => (src.len() - field_rank(field, &out)? - field_rank(field, &inc)?, vec![]),
                };
                map.insert((Some(j), g.i), cell);
            }
        }
    }
    Ok(HomologyTable::from_map(coeffs, map))
}

fn field_rank(field: Coefficients, m: &SparseMatrix<Integers>) -> Result<usize> {
    Ok(crate::with_field!(field, |f| m.map_ring(f.clone(), |v| f.from_i64(*v)).rank()))
}

/// Per-quantum-grading reductions of the integral Khovanov complex.
pub fn khovanov_slices(cube: &Cube) -> Vec<(i32, ReducedComplex)> {
    let shifts = cube.shifts();
    let n = cube.crossings();
    let mut js: Vec<i32> = (0..1u32 << n)
        .flat_map(|v| {
            let k = cube.circles(v) as i32;
            let base = v.count_ones() as i32 + shifts.n_plus - 2 * shifts.n_minus;
            [base - k, base + k]
        })
        .collect();
    let (lo, hi) = (js.iter().copied().min().unwrap_or(0), js.iter().copied().max().unwrap_or(0));
    js = (lo..=hi).step_by(2).collect();
    let window = cube.degree_range();
    js.into_par_iter()
        .map(|j| {
            let data = cube_cochains(cube, FrobeniusFlavor::Khovanov, window.clone(), Slice::Quantum(j));
            (j, reduce_cochains(data, false))
        })
        .collect()
}

/// Khovanov homology of a diagram with the given coefficients.
pub fn khovanov_homology(d: &PlanarDiagram, coeffs: Coefficients) -> Result<HomologyTable> {
    let cube = Cube::new(d)?;
    let slices = khovanov_slices(&cube);
    table_from_reduced(coeffs, slices.iter().map(|(_, r)| r))
}

/// Bar-Natan homology dimensions per degree over a field.
pub fn bar_natan_homology(d: &PlanarDiagram, coeffs: Coefficients) -> Result<HomologyTable> {
    let cube = Cube::new(d)?;
    let data = cube_cochains(&cube, FrobeniusFlavor::BarNatan, cube.degree_range(), Slice::All);
    let r = reduce_cochains(data, false);
    let mut map = BTreeMap::new();
    for g in r.groups() {
        let (out, inc) = (r.differential_or_zero(g.i), r.differential_or_zero(g.i - 1));
        let cell = match coeffs.normalized()? {
            Coefficients::Z => integral_cell(g.len(), &out, &inc),
            field => (g.len() - field_rank(field, &out)? - field_rank(field, &inc)?, vec![]),
        };
        map.insert((None, g.i), cell);
    }
    Ok(HomologyTable::from_map(coeffs, map))
}

/// A basis of cocycles modulo coboundaries. Representatives are the reduced
/// row-echelon basis of the cocycles vanishing on the pivot coordinates of
/// the coboundaries; class coordinates are read off after reducing a cocycle
/// against the coboundaries.
#[derive(Clone, Debug)]
pub struct QuotientBasis<F: Field> {
    boundaries: Subspace<F>,
    reps: Subspace<F>,
}

impl<F: Field> QuotientBasis<F> {
    pub fn new(cocycles: &Subspace<F>, boundaries: Subspace<F>) -> Self {
        let field = cocycles.ring().clone();
        let reduced = cocycles.basis().iter().map(|z| boundaries.reduce(z)).collect();
        let reps = Subspace::from_spanning(field, cocycles.ambient(), reduced);
        QuotientBasis { boundaries, reps }
    }

    /// Homology of `inc` then `out` at the middle term.
    pub fn of_maps(inc: &SparseMatrix<F>, out: &SparseMatrix<F>) -> Self {
        let cocycles = out.kernel();
        let boundaries = inc.image();
        Self::new(&cocycles, boundaries)
    }

    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    pub fn ambient(&self) -> usize {
        self.reps.ambient()
    }

    pub fn representatives(&self) -> &[SparseVec<F::Elem>] {
        self.reps.basis()
    }

    pub fn boundaries(&self) -> &Subspace<F> {
        &self.boundaries
    }

    /// Class coordinates of a cocycle; `None` if it is not a cocycle of the
    /// represented space.
    pub fn classes(&self, cocycle: &SparseVec<F::Elem>) -> Option<Vec<F::Elem>> {
        self.reps.coordinates(&self.boundaries.reduce(cocycle))
    }

    /// The cocycle with the given class coordinates.
    pub fn lift(&self, coords: &[F::Elem]) -> SparseVec<F::Elem> {
        let f = self.reps.ring();
        coords.iter().zip(self.reps.basis()).fold(SparseVec::new(), |acc, (c, r)| acc.axpy(f, c, r))
    }

    /// Matrix (rows: classes here) of the classes of the given cocycles.
    pub fn class_matrix(&self, cocycles: &[SparseVec<F::Elem>]) -> SparseMatrix<F> {
        let f = self.reps.ring().clone();
        let cols: Vec<SparseVec<F::Elem>> = cocycles
            .iter()
            .map(|z| SparseVec::from_dense(&f, &self.classes(z).expect("argument is a cocycle")))
            .collect();
        SparseMatrix::from_columns(f, self.dim(), &cols)
    }
}

/// The canonical basis of one Khovanov group `Kh^{i,j}` over a field,
/// computed on the unreduced complex.
#[derive(Clone, Debug)]
pub struct CanonicalBlock<F: Field> {
    pub i: i32,
    pub j: i32,
    /// Generators of `C^{i,j}` in canonical order.
    pub states: Vec<EnhancedState>,
    pub basis: QuotientBasis<F>,
    /// The differential `C^{i,j} -> C^{i+1,j}` over the integers.
    pub outgoing: SparseMatrix<Integers>,
    /// Generators of `C^{i+1,j}`.
    pub next_states: Vec<EnhancedState>,
}

/// Canonical bases of all nonzero Khovanov groups of one quantum grading.
pub fn canonical_slice<F: Field>(field: &F, cube: &Cube, j: i32) -> Vec<CanonicalBlock<F>> {
    let data = cube_cochains(cube, FrobeniusFlavor::Khovanov, cube.degree_range(), Slice::Quantum(j));
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (x, i) in data.degree.iter().enumerate() {
        by_degree.entry(*i).or_default().push(x);
    }
    let mut local = vec![0usize; data.len()];
    for xs in by_degree.values() {
        for (k, x) in xs.iter().enumerate() {
            local[*x] = k;
        }
    }
    let int_block = |i: i32| -> SparseMatrix<Integers> {
        let src = by_degree.get(&i).cloned().unwrap_or_default();
        let rows = by_degree.get(&(i + 1)).map_or(0, |v| v.len());
        let triplets = src
            .iter()
            .enumerate()
            .flat_map(|(col, x)| data.out[*x].iter().map(move |(y, c)| (*y, col, *c)))
            .map(|(y, col, c)| (local[y as usize], col, c))
            .collect();
        SparseMatrix::from_triplets(Integers, rows, src.len(), triplets).expect("in range")
    };
    let (lo, hi) = match (by_degree.keys().next(), by_degree.keys().last()) {
        (Some(lo), Some(hi)) => (*lo, *hi),
        _ => return vec![],
    };
    let mut out = Vec::new();
    for i in lo..=hi {
        let Some(xs) = by_degree.get(&i) else { continue };
        let outgoing = int_block(i);
        let inc = int_block(i - 1);
        let to_f = |m: &SparseMatrix<Integers>| m.map_ring(field.clone(), |v| field.from_i64(*v));
        let inc = if inc.ncols() == 0 { SparseMatrix::zeros(field.clone(), xs.len(), 0) } else { to_f(&inc) };
        let basis = QuotientBasis::of_maps(&inc, &to_f(&outgoing));
        if basis.dim() == 0 {
            continue;
        }
        let states = xs.iter().map(|x| data.states[*x]).collect();
        let next_states = by_degree.get(&(i + 1)).map_or(vec![], |v| v.iter().map(|x| data.states[*x]).collect());
        out.push(CanonicalBlock { i, j, states, basis, outgoing, next_states });
    }
    out
}

/// Canonical bases of every nonzero Khovanov group.
pub fn canonical_bases<F: Field>(field: &F, cube: &Cube) -> Vec<CanonicalBlock<F>> {
    let js: Vec<i32> = khovanov_quantum_range(cube);
    js.into_par_iter().map(|j| canonical_slice(field, cube, j)).collect::<Vec<_>>().into_iter().flatten().collect()
}

fn khovanov_quantum_range(cube: &Cube) -> Vec<i32> {
    let shifts = cube.shifts();
    let mut lo = i32::MAX;
    let mut hi = i32::MIN;
    for v in 0..1u32 << cube.crossings() {
        let k = cube.circles(v) as i32;
        let base = v.count_ones() as i32 + shifts.n_plus - 2 * shifts.n_minus;
        lo = lo.min(base - k);
        hi = hi.max(base + k);
    }
    (lo..=hi).step_by(2).collect()
}

/// The reduced Bar-Natan complex in homological degrees `low..=1`, enough
/// to see `H_0` of every filtration level and Khovanov groups down to degree
/// `low + 1`.
pub fn bar_natan_window(cube: &Cube, low: i32, record: bool) -> ReducedComplex {
    let data = cube_cochains(cube, FrobeniusFlavor::BarNatan, low..=1, Slice::All);
    reduce_cochains(data, record)
}

/// Maps `H_0(F_q) -> H_0(C)` and `H_0(F_q) -> Kh^{0,q}` at one level.
#[derive(Clone, Debug)]
pub struct LevelMaps<F: Field> {
    pub q: i32,
    /// `H_0(F_q)`, in degree-0 coordinates of the reduced complex.
    pub sub: QuotientBasis<F>,
    /// Positions of the degree-0 generators of quantum grading `q`.
    pub slice: Vec<usize>,
    /// `Kh^{0,q}`, in coordinates indexed by `slice`.
    pub kh: QuotientBasis<F>,
    pub inclusion: SparseMatrix<F>,
    pub projection: SparseMatrix<F>,
}

/// Filtration maps in degree 0 for every relevant level, computed on a
/// reduced Bar-Natan complex.
#[derive(Clone, Debug)]
pub struct FiltrationMaps<F: Field> {
    field: F,
    total: QuotientBasis<F>,
    levels: BTreeMap<i32, LevelMaps<F>>,
    /// Quantum gradings of the degree-0 generators.
    degree0_q: Vec<i32>,
    states: Vec<EnhancedState>,
    q_range: (i32, i32),
}

fn restrict_cols<F: Field>(m: &SparseMatrix<F>, keep: &[usize]) -> SparseMatrix<F> {
    let rows: Vec<usize> = (0..m.nrows()).collect();
    m.submatrix(&rows, keep)
}

impl<F: Field> FiltrationMaps<F> {
    pub fn new(field: F, model: &ReducedComplex) -> Result<Self> {
        let g0 = model.group(0).ok_or_else(|| Error::Precondition("reduced complex has no degree 0".into()))?;
        let d_in = model.differential_over(&field, -1);
        let d_out = model.differential_over(&field, 0);
        let gr_in = model.graded_differential(-1).map_ring(field.clone(), |v| field.from_i64(*v));
        let gr_out = model.graded_differential(0).map_ring(field.clone(), |v| field.from_i64(*v));
        let total = QuotientBasis::of_maps(&d_in, &d_out);
        let q0 = g0.q.clone();
        let (lo, hi) = match (q0.iter().min(), q0.iter().max()) {
            (Some(lo), Some(hi)) => (*lo, *hi),
            _ => return Err(Error::Precondition("degree 0 of the reduced complex is empty".into())),
        };
        let q_minus = model.group(-1).map(|g| g.q.clone()).unwrap_or_default();
        let q_plus = model.group(1).map(|g| g.q.clone()).unwrap_or_default();
        let mut levels = BTreeMap::new();
        for q in (lo - 2..=hi + 2).step_by(2) {
            let cols0: Vec<usize> = (0..q0.len()).filter(|k| q0[*k] >= q).collect();
            let colsm: Vec<usize> = (0..q_minus.len()).filter(|k| q_minus[*k] >= q).collect();
            let cocycles: Vec<SparseVec<F::Elem>> = restrict_cols(&d_out, &cols0)
                .kernel()
                .basis()
                .iter()
                .map(|v| v.reindex(|k| Some(cols0[k])))
                .collect();
            let cocycles = Subspace::from_spanning(field.clone(), q0.len(), cocycles);
            let boundaries = restrict_cols(&d_in, &colsm).image();
            let sub = QuotientBasis::new(&cocycles, boundaries);

            let slice: Vec<usize> = (0..q0.len()).filter(|k| q0[*k] == q).collect();
            let rows_p: Vec<usize> = (0..q_plus.len()).filter(|k| q_plus[*k] == q).collect();
            let cols_m: Vec<usize> = (0..q_minus.len()).filter(|k| q_minus[*k] == q).collect();
            let kh_out = gr_out.submatrix(&rows_p, &slice);
            let kh_in = gr_in.submatrix(&slice, &cols_m);
            let kh = QuotientBasis::of_maps(&kh_in, &kh_out);

            let mut pos_in_slice = vec![usize::MAX; q0.len()];
            for (k, p) in slice.iter().enumerate() {
                pos_in_slice[*p] = k;
            }
            let reps = sub.representatives().to_vec();
            let inclusion = total.class_matrix(&reps);
            let restricted: Vec<_> = reps
                .iter()
                .map(|z| z.reindex(|k| (pos_in_slice[k] != usize::MAX).then_some(pos_in_slice[k])))
                .collect();
            let projection = kh.class_matrix(&restricted);
            levels.insert(q, LevelMaps { q, sub, slice, kh, inclusion, projection });
        }
        Ok(FiltrationMaps { field, total, levels, degree0_q: q0, states: g0.states.clone(), q_range: (lo - 2, hi + 2) })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn total(&self) -> &QuotientBasis<F> {
        &self.total
    }

    /// Dimension of `H_0(C)`.
    pub fn total_dim(&self) -> usize {
        self.total.dim()
    }

    /// Levels outside this range have `F_q = C` (below) or `F_q = 0` in
    /// degree 0 (above).
    pub fn q_range(&self) -> (i32, i32) {
        self.q_range
    }

    pub fn level(&self, q: i32) -> Option<&LevelMaps<F>> {
        self.levels.get(&q)
    }

    pub fn levels(&self) -> impl Iterator<Item = &LevelMaps<F>> {
        self.levels.values()
    }

    /// Rank of `i_*` at level `q`.
    pub fn inclusion_rank(&self, q: i32) -> usize {
        match self.levels.get(&q) {
            Some(l) => l.inclusion.rank(),
            None if q < self.q_range.0 => self.total_dim(),
            None => 0,
        }
    }

    pub fn degree0_states(&self) -> &[EnhancedState] {
        &self.states
    }

    pub fn degree0_quantum(&self) -> &[i32] {
        &self.degree0_q
    }
}

/// Checks that a diagram is a knot.
pub fn require_knot(d: &PlanarDiagram) -> Result<()> {
    if d.component_count() != 1 {
        return Err(Error::Precondition(format!("expected a knot, found {} components", d.component_count())));
    }
    Ok(())
}

/// Filtration maps of a knot diagram over a field.
pub fn filtration_maps<F: Field>(field: F, d: &PlanarDiagram) -> Result<FiltrationMaps<F>> {
    require_knot(d)?;
    let cube = Cube::new(d)?;
    let model = bar_natan_window(&cube, -2, false);
    FiltrationMaps::new(field, &model)
}

/// Restricts an integer cochain to the generators of one quantum grading of
/// a degree group and reduces it into a field.
pub fn slice_vector<F: Field>(field: &F, entries: &[(usize, i64)], slice: &[usize]) -> SparseVec<F::Elem> {
    let mut pos = BTreeMap::new();
    for (k, p) in slice.iter().enumerate() {
        pos.insert(*p, k);
    }
    vec_over(field, entries.iter().filter_map(|(p, v)| pos.get(p).map(|k| (*k, *v))))
}
