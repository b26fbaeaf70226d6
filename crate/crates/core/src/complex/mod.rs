//! Bigraded cochain complexes built from the cube of resolutions, in the
//! Khovanov and Bar-Natan flavors, and their filtration pieces.

pub mod reduce;

use std::ops::RangeInclusive;

use crate::cube::{crossing_bit, standard_sign, CubeResolutions, FrobeniusFlavor, SignAssignment};
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};
use crate::exactalg::{Ring, SparseMatrix};

pub use reduce::{reduce_cochains, CochainData, ReducedComplex, ReducedGroup};

/// A cube vertex together with a labeling of its circles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct EnhancedState {
    pub vertex: u32,
    /// Bit `k-1-m` set means circle `m` carries `x_-`.
    pub labeling: u32,
    pub circles: u8,
}

impl EnhancedState {
    pub fn weight(&self) -> i32 {
        self.vertex.count_ones() as i32
    }

    pub fn homological(&self, shifts: Shifts) -> i32 {
        self.weight() - shifts.n_minus
    }

    pub fn quantum(&self, shifts: Shifts) -> i32 {
        self.circles as i32 - 2 * self.labeling.count_ones() as i32 + self.weight() + shifts.n_plus - 2 * shifts.n_minus
    }
}

/// Crossing counts entering the grading formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shifts {
    pub n_plus: i32,
    pub n_minus: i32,
}

impl Shifts {
    pub fn of(d: &PlanarDiagram) -> Self {
        Shifts { n_plus: d.n_plus() as i32, n_minus: d.n_minus() as i32 }
    }
}

/// The cube of a diagram with its gradings; the source of all complexes.
#[derive(Clone, Debug)]
pub struct Cube {
    diagram: PlanarDiagram,
    resolutions: CubeResolutions,
    shifts: Shifts,
}

impl Cube {
    pub fn new(d: &PlanarDiagram) -> Result<Self> {
        if d.crossing_count() > 24 {
            return Err(Error::Precondition(format!("{} crossings exceed the supported maximum of 24", d.crossing_count())));
        }
        Ok(Cube { diagram: d.clone(), resolutions: CubeResolutions::new(d), shifts: Shifts::of(d) })
    }

    pub fn diagram(&self) -> &PlanarDiagram {
        &self.diagram
    }

    pub fn shifts(&self) -> Shifts {
        self.shifts
    }

    pub fn crossings(&self) -> usize {
        self.resolutions.crossings()
    }

    pub fn resolutions(&self) -> &CubeResolutions {
        &self.resolutions
    }

    pub fn circles(&self, vertex: u32) -> u8 {
        self.resolutions.circle_count(vertex as u64) as u8
    }

    /// Vertices of homological degree `i`, in increasing order.
    pub fn vertices_in_degree(&self, i: i32) -> impl Iterator<Item = u32> + '_ {
        let w = i + self.shifts.n_minus;
        (0..1u32 << self.crossings()).filter(move |v| v.count_ones() as i32 == w)
    }

    pub fn degree_range(&self) -> RangeInclusive<i32> {
        -self.shifts.n_minus..=self.shifts.n_plus
    }

    /// Terms of the differential applied to a state: `(target, coefficient)`.
    pub fn differential_terms(
        &self,
        flavor: FrobeniusFlavor,
        state: EnhancedState,
        sign: &impl Fn(u64, usize) -> i64,
        out: &mut Vec<(EnhancedState, i64)>,
    ) {
        let n = self.crossings();
        let v = state.vertex as u64;
        for c in 0..n {
            let b = crossing_bit(n, c);
            if v & b != 0 {
                continue;
            }
            let s = sign(v, c);
            let shape = self.resolutions.edge_shape(&self.diagram, v, c);
            let target = (v | b) as u32;
            let k = shape.k_after as u8;
            for (lab, coef) in shape.apply(flavor, state.labeling as u64) {
                out.push((EnhancedState { vertex: target, labeling: lab as u32, circles: k }, s * coef));
            }
        }
    }
}

/// Generators of one homological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeGroup {
    pub i: i32,
    pub states: Vec<EnhancedState>,
    pub q: Vec<i32>,
}

impl DegreeGroup {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Positions of generators with quantum grading `j`.
    pub fn quantum_positions(&self, j: i32) -> Vec<usize> {
        (0..self.len()).filter(|k| self.q[*k] == j).collect()
    }
}

/// A cochain complex stored per homological degree. `diff[k]` maps
/// `groups[k]` to `groups[k + 1]`; rows index targets.
#[derive(Clone, Debug)]
pub struct GradedComplex<R: Ring> {
    pub flavor: FrobeniusFlavor,
    ring: R,
    groups: Vec<DegreeGroup>,
    diff: Vec<SparseMatrix<R>>,
}

/// Assembles the complex of `d` with the given signs, enumerating generators
/// by vertex and then labeling.
pub fn build_complex<R: Ring>(d: &PlanarDiagram, flavor: FrobeniusFlavor, ring: R, signs: &SignAssignment) -> Result<GradedComplex<R>> {
    if signs.dimension() != d.crossing_count() {
        return Err(Error::DimensionMismatch(format!(
            "sign assignment for {} crossings used on a diagram with {}",
            signs.dimension(),
            d.crossing_count()
        )));
    }
    let cube = Cube::new(d)?;
    Ok(assemble(&cube, flavor, ring, &|v, c| signs.sign(v, c)))
}

/// [`build_complex`] with the standard sign assignment.
pub fn build_standard<R: Ring>(d: &PlanarDiagram, flavor: FrobeniusFlavor, ring: R) -> Result<GradedComplex<R>> {
    let cube = Cube::new(d)?;
    let n = cube.crossings();
    Ok(assemble(&cube, flavor, ring, &|v, c| standard_sign(n, v, c)))
}

fn assemble<R: Ring>(cube: &Cube, flavor: FrobeniusFlavor, ring: R, sign: &impl Fn(u64, usize) -> i64) -> GradedComplex<R> {
    let shifts = cube.shifts();
    let n = cube.crossings();
    let mut position = vec![0usize; 1 << n];
    let mut groups = Vec::new();
    for i in cube.degree_range() {
        let mut states = Vec::new();
        for v in cube.vertices_in_degree(i) {
            position[v as usize] = states.len();
            let k = cube.circles(v);
            states.extend((0..1u32 << k).map(|labeling| EnhancedState { vertex: v, labeling, circles: k }));
        }
        let q = states.iter().map(|s| s.quantum(shifts)).collect();
        groups.push(DegreeGroup { i, states, q });
    }
    let mut diff = Vec::new();
    let mut terms = Vec::new();
    for w in groups.windows(2) {
        let mut triplets = Vec::new();
        for (col, s) in w[0].states.iter().enumerate() {
            terms.clear();
            cube.differential_terms(flavor, *s, sign, &mut terms);
            for (t, coef) in &terms {
                let row = position[t.vertex as usize] + t.labeling as usize;
                triplets.push((row, col, ring.from_i64(*coef)));
            }
        }
        let m = SparseMatrix::from_triplets(ring.clone(), w[1].len(), w[0].len(), triplets).expect("indices in range");
        diff.push(m);
    }
    GradedComplex { flavor, ring, groups, diff }
}

impl<R: Ring> GradedComplex<R> {
    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn groups(&self) -> &[DegreeGroup] {
        &self.groups
    }

    pub fn group(&self, i: i32) -> Option<&DegreeGroup> {
        self.groups.iter().find(|g| g.i == i)
    }

    fn index_of(&self, i: i32) -> Option<usize> {
        self.groups.iter().position(|g| g.i == i)
    }

    /// The differential leaving degree `i`, if degree `i + 1` exists.
    pub fn differential(&self, i: i32) -> Option<&SparseMatrix<R>> {
        self.index_of(i).and_then(|k| self.diff.get(k))
    }

    pub fn differentials(&self) -> &[SparseMatrix<R>] {
        &self.diff
    }

    pub fn dimension(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    pub fn quantum_range(&self) -> Option<(i32, i32)> {
        let all = self.groups.iter().flat_map(|g| g.q.iter().copied());
        all.fold(None, |acc, j| Some(acc.map_or((j, j), |(lo, hi): (i32, i32)| (lo.min(j), hi.max(j)))))
    }

    /// Checks `d^2 = 0` on every pair of consecutive differentials.
    pub fn is_d_squared_zero(&self) -> bool {
        self.diff.windows(2).all(|w| w[1].mul(&w[0]).map(|m| m.is_zero()).unwrap_or(false))
    }

    /// Every differential entry raises quantum grading by 0 (Khovanov) or
    /// by 0 or 2 (Bar-Natan).
    pub fn respects_filtration(&self) -> bool {
        self.diff.iter().enumerate().all(|(k, m)| {
            m.triplets().iter().all(|(r, c, _)| {
                let step = self.groups[k + 1].q[*r] - self.groups[k].q[*c];
                step == 0 || (self.flavor == FrobeniusFlavor::BarNatan && step == 2)
            })
        })
    }

    fn restrict(&self, keep: impl Fn(i32) -> bool, entry: impl Fn(i32, i32) -> bool) -> GradedComplex<R> {
        let mut maps = Vec::new();
        let groups: Vec<DegreeGroup> = self
            .groups
            .iter()
            .map(|g| {
                let pos: Vec<usize> = (0..g.len()).filter(|k| keep(g.q[*k])).collect();
                let mut map = vec![usize::MAX; g.len()];
                for (new, old) in pos.iter().enumerate() {
                    map[*old] = new;
                }
                maps.push(map);
                DegreeGroup { i: g.i, states: pos.iter().map(|k| g.states[*k]).collect(), q: pos.iter().map(|k| g.q[*k]).collect() }
            })
            .collect();
        let diff = self
            .diff
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let triplets = m
                    .triplets()
                    .into_iter()
                    .filter(|(r, c, _)| {
                        maps[k + 1][*r] != usize::MAX
                            && maps[k][*c] != usize::MAX
                            && entry(self.groups[k].q[*c], self.groups[k + 1].q[*r])
                    })
                    .map(|(r, c, v)| (maps[k + 1][r], maps[k][c], v))
                    .collect();
                SparseMatrix::from_triplets(self.ring.clone(), groups[k + 1].len(), groups[k].len(), triplets).expect("in range")
            })
            .collect();
        GradedComplex { flavor: self.flavor, ring: self.ring.clone(), groups, diff }
    }

    /// The subcomplex spanned by generators with quantum grading at least `q`.
    pub fn filtration_subcomplex(&self, q: i32) -> GradedComplex<R> {
        self.restrict(|j| j >= q, |_, _| true)
    }

    /// The associated graded piece `F_q / F_{q+2}`.
    pub fn graded_quotient(&self, q: i32) -> GradedComplex<R> {
        let mut out = self.restrict(|j| j == q, |a, b| a == b);
        out.flavor = FrobeniusFlavor::Khovanov;
        out
    }

    /// The quotient by `F_q`: generators with quantum grading below `q`.
    pub fn quotient_by_filtration(&self, q: i32) -> GradedComplex<R> {
        self.restrict(|j| j < q, |_, _| true)
    }

    /// The degree-preserving part of the differential from `(i, j)` to
    /// `(i + 1, j)`, with the positions of both bigradings in their groups.
    pub fn quantum_block(&self, i: i32, j: i32) -> (Vec<usize>, Vec<usize>, SparseMatrix<R>) {
        let src = self.group(i).map(|g| g.quantum_positions(j)).unwrap_or_default();
        let dst = self.group(i + 1).map(|g| g.quantum_positions(j)).unwrap_or_default();
        let m = match self.differential(i) {
            Some(d) => d.submatrix(&dst, &src),
            None => SparseMatrix::zeros(self.ring.clone(), dst.len(), src.len()),
        };
        (src, dst, m)
    }

    /// Integer cochain data for the cancellation engine; entries must have
    /// integer representatives.
    pub fn to_cochains(&self) -> CochainData {
        let mut data = CochainData::default();
        let mut base = Vec::new();
        for g in &self.groups {
            base.push(data.states.len());
            for (s, q) in g.states.iter().zip(&g.q) {
                data.push(*s, g.i, *q);
            }
        }
        for (k, m) in self.diff.iter().enumerate() {
            for (r, c, v) in m.triplets() {
                let coef = self.ring.to_i64(&v).expect("integral coefficient");
                data.out[base[k] + c].push(((base[k + 1] + r) as u32, coef));
            }
        }
        data
    }
}

/// Which generators the cube builder emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    All,
    Quantum(i32),
}

/// Rank of a labeling among labelings of the same popcount, in increasing
/// numeric order.
fn combinadic_rank(labeling: u32, binom: &[Vec<u64>]) -> u64 {
    let mut rank = 0;
    let mut bits = labeling;
    let mut t = 1;
    while bits != 0 {
        let b = bits.trailing_zeros() as usize;
        rank += binom[b][t];
        t += 1;
        bits &= bits - 1;
    }
    rank
}

fn binomials(n: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; n + 2]; n + 2];
    for i in 0..=n + 1 {
        b[i][0] = 1;
        for k in 1..=i {
            b[i][k] = b[i - 1][k - 1] + if k < i { b[i - 1][k] } else { 0 };
        }
    }
    b
}

/// Builds integral cochain data directly from the cube with the standard
/// signs, restricted to homological degrees in `window` and to `slice`.
pub fn cube_cochains(cube: &Cube, flavor: FrobeniusFlavor, window: RangeInclusive<i32>, slice: Slice) -> CochainData {
    let shifts = cube.shifts();
    let n = cube.crossings();
    let max_k = (0..1u32 << n).map(|v| cube.circles(v) as usize).max().unwrap_or(0);
    let binom = binomials(max_k.max(1));
    // popcount of labelings at vertex v in the slice, if any
    let popcount = |v: u32| -> Option<u32> {
        match slice {
            Slice::All => None,
            Slice::Quantum(j) => {
                let k = cube.circles(v) as i32;
                let twice = k + v.count_ones() as i32 + shifts.n_plus - 2 * shifts.n_minus - j;
                (twice >= 0 && twice % 2 == 0 && twice / 2 <= k).then_some((twice / 2) as u32)
            }
        }
    };
    let included = |v: u32| -> bool {
        let i = v.count_ones() as i32 - shifts.n_minus;
        window.contains(&i) && (slice == Slice::All || popcount(v).is_some())
    };
    let mut offset = vec![u32::MAX; 1 << n];
    let mut data = CochainData::default();
    let mut verts: Vec<u32> = (0..1u32 << n).filter(|v| included(*v)).collect();
    verts.sort_by_key(|v| (v.count_ones(), *v));
    for v in &verts {
        offset[*v as usize] = data.states.len() as u32;
        let k = cube.circles(*v);
        let i = v.count_ones() as i32 - shifts.n_minus;
        let mut push = |lab: u32| {
            let s = EnhancedState { vertex: *v, labeling: lab, circles: k };
            data.push(s, i, s.quantum(shifts));
        };
        match popcount(*v) {
            None => (0..1u32 << k).for_each(&mut push),
            Some(p) => {
                // labelings with exactly p bits, increasing
                if p == 0 {
                    push(0);
                } else if p as u8 <= k {
                    let mut lab: u32 = (1u32 << p) - 1;
                    while lab < 1u32 << k {
                        push(lab);
                        let c = lab & lab.wrapping_neg();
                        let r = lab + c;
                        lab = (((r ^ lab) >> 2) / c) | r;
                    }
                }
            }
        }
    }
    let index = |s: &EnhancedState| -> Option<u32> {
        let base = offset[s.vertex as usize];
        if base == u32::MAX {
            return None;
        }
        Some(match slice {
            Slice::All => base + s.labeling,
            Slice::Quantum(_) => base + combinadic_rank(s.labeling, &binom) as u32,
        })
    };
    let mut terms = Vec::new();
    for x in 0..data.states.len() {
        let s = data.states[x];
        terms.clear();
        cube.differential_terms(flavor, s, &|v, c| standard_sign(n, v, c), &mut terms);
        for (t, coef) in &terms {
            if let Slice::Quantum(j) = slice {
                if t.quantum(shifts) != j {
                    continue;
                }
            }
            if let Some(y) = index(t) {
                debug_assert_eq!(data.states[y as usize], *t);
                data.out[x].push((y, *coef));
            }
        }
    }
    data
}
