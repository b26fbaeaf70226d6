//! Gaussian cancellation of unit differential entries between generators of
//! equal quantum grading. Cancelling only such pairs keeps every step a
//! filtered homotopy equivalence, so the reduced complex computes the same
//! filtered homology (and, on the associated graded, the same Khovanov
//! homology) over every coefficient ring.

use crate::exactalg::{Field, Integers, SparseMatrix, SparseVec};

use std::collections::HashMap;

use super::EnhancedState;

/// Integral cochains with an explicit list of outgoing differential entries.
#[derive(Clone, Debug, Default)]
pub struct CochainData {
    pub states: Vec<EnhancedState>,
    pub degree: Vec<i32>,
    pub q: Vec<i32>,
    pub out: Vec<Vec<(u32, i64)>>,
}

impl CochainData {
    pub fn push(&mut self, state: EnhancedState, degree: i32, q: i32) {
        self.states.push(state);
        self.degree.push(degree);
        self.q.push(q);
        self.out.push(Vec::new());
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug)]
struct Step {
    x: u32,
    y: u32,
    c: i64,
    beta: Vec<(u32, i64)>,
    alpha: Vec<(u32, i64)>,
}

/// Generators of one degree of a reduced complex.
#[derive(Clone, Debug, Default)]
pub struct ReducedGroup {
    pub i: i32,
    /// Indices into the input cochain data.
    pub inputs: Vec<u32>,
    pub states: Vec<EnhancedState>,
    pub q: Vec<i32>,
}

impl ReducedGroup {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// The reduced complex with optional replay data for the homotopy
/// equivalences to and from the input.
#[derive(Clone, Debug)]
pub struct ReducedComplex {
    groups: Vec<ReducedGroup>,
    /// `diff[k]` maps `groups[k]` to `groups[k + 1]`; rows index targets.
    diff: Vec<SparseMatrix<Integers>>,
    input_len: usize,
    steps: Option<Vec<Step>>,
    position: Vec<(u32, u32)>,
    input_index: Option<HashMap<EnhancedState, u32>>,
}

fn add_entry(list: &mut Vec<(u32, i64)>, key: u32, value: i64) {
    if let Some(p) = list.iter().position(|(k, _)| *k == key) {
        let v = list[p].1.checked_add(value).expect("integer coefficient overflow");
        if v == 0 {
            list.swap_remove(p);
        } else {
            list[p].1 = v;
        }
    } else {
        list.push((key, value));
    }
}

fn remove_entry(list: &mut Vec<(u32, i64)>, key: u32) {
    if let Some(p) = list.iter().position(|(k, _)| *k == key) {
        list.swap_remove(p);
    }
}

/// Cancels unit entries between equal quantum gradings until none remain.
/// With `record`, the steps are kept so that cochains can be carried to and
/// from the reduced complex.
pub fn reduce_cochains(data: CochainData, record: bool) -> ReducedComplex {
    let n = data.len();
    let CochainData { states, degree, q, mut out } = data;
    let mut inn: Vec<Vec<(u32, i64)>> = vec![Vec::new(); n];
    for (x, list) in out.iter().enumerate() {
        for (y, c) in list {
            inn[*y as usize].push((x as u32, *c));
        }
    }
    let mut alive = vec![true; n];
    let mut steps = Vec::new();
    loop {
        let mut changed = false;
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            let mut best: Option<(u32, i64, usize)> = None;
            for (y, c) in &out[x] {
                if c.abs() == 1 && q[*y as usize] == q[x] {
                    let cost = inn[*y as usize].len();
                    if best.map_or(true, |b| cost < b.2) {
                        best = Some((*y, *c, cost));
                    }
                }
            }
            let Some((y, c, _)) = best else { continue };
            changed = true;
            let (xu, yu) = (x as u32, y as usize);
            let mut beta = std::mem::take(&mut out[x]);
            remove_entry(&mut beta, y);
            let mut alpha = std::mem::take(&mut inn[yu]);
            remove_entry(&mut alpha, xu);
            for (z, _) in &beta {
                remove_entry(&mut inn[*z as usize], xu);
            }
            for (w, _) in &alpha {
                remove_entry(&mut out[*w as usize], y);
            }
            for (v, _) in std::mem::take(&mut inn[x]) {
                remove_entry(&mut out[v as usize], xu);
            }
            for (u, _) in std::mem::take(&mut out[yu]) {
                remove_entry(&mut inn[u as usize], y);
            }
            for (w, b) in &alpha {
                for (z, a) in &beta {
                    let v = -(b.checked_mul(*a).expect("integer coefficient overflow")) * c;
                    add_entry(&mut out[*w as usize], *z, v);
                    add_entry(&mut inn[*z as usize], *w, v);
                }
            }
            alive[x] = false;
            alive[yu] = false;
            if record {
                steps.push(Step { x: xu, y, c, beta, alpha });
            }
        }
        if !changed {
            break;
        }
    }
    let (lo, hi) = match (degree.iter().min(), degree.iter().max()) {
        (Some(lo), Some(hi)) => (*lo, *hi),
        _ => (0, -1),
    };
    let mut groups: Vec<ReducedGroup> = (lo..=hi).map(|i| ReducedGroup { i, ..Default::default() }).collect();
    let mut position = vec![(u32::MAX, u32::MAX); n];
    for x in (0..n).filter(|x| alive[*x]) {
        let k = (degree[x] - lo) as usize;
        position[x] = (k as u32, groups[k].len() as u32);
        groups[k].inputs.push(x as u32);
        groups[k].states.push(states[x]);
        groups[k].q.push(q[x]);
    }
    let diff = (0..groups.len().saturating_sub(1))
        .map(|k| {
            let mut triplets = Vec::new();
            for (col, x) in groups[k].inputs.iter().enumerate() {
                for (y, c) in &out[*x as usize] {
                    let (gk, row) = position[*y as usize];
                    debug_assert_eq!(gk as usize, k + 1);
                    triplets.push((row as usize, col, *c));
                }
            }
            SparseMatrix::from_triplets(Integers, groups[k + 1].len(), groups[k].len(), triplets).expect("in range")
        })
        .collect();
    let input_index = record.then(|| states.iter().enumerate().map(|(k, s)| (*s, k as u32)).collect());
    ReducedComplex { groups, diff, input_len: n, steps: record.then_some(steps), position, input_index }
}

impl ReducedComplex {
    pub fn groups(&self) -> &[ReducedGroup] {
        &self.groups
    }

    pub fn group_index(&self, i: i32) -> Option<usize> {
        self.groups.iter().position(|g| g.i == i)
    }

    pub fn group(&self, i: i32) -> Option<&ReducedGroup> {
        self.group_index(i).map(|k| &self.groups[k])
    }

    /// The differential leaving degree `i` over the integers.
    pub fn differential(&self, i: i32) -> Option<&SparseMatrix<Integers>> {
        self.group_index(i).and_then(|k| self.diff.get(k))
    }

    /// The differential leaving degree `i` (zero matrices at the ends).
    pub fn differential_or_zero(&self, i: i32) -> SparseMatrix<Integers> {
        match self.differential(i) {
            Some(m) => m.clone(),
            None => {
                let rows = self.group(i + 1).map_or(0, |g| g.len());
                let cols = self.group(i).map_or(0, |g| g.len());
                SparseMatrix::zeros(Integers, rows, cols)
            }
        }
    }

    /// The differential leaving degree `i` reduced into a field.
    pub fn differential_over<F: Field>(&self, field: &F, i: i32) -> SparseMatrix<F> {
        self.differential_or_zero(i).map_ring(field.clone(), |v| field.from_i64(*v))
    }

    /// The part of the differential leaving degree `i` that preserves quantum
    /// grading, over the integers.
    pub fn graded_differential(&self, i: i32) -> SparseMatrix<Integers> {
        let m = self.differential_or_zero(i);
        let (Some(src), Some(dst)) = (self.group(i), self.group(i + 1)) else { return m };
        let triplets = m.triplets().into_iter().filter(|(r, c, _)| dst.q[*r] == src.q[*c]).collect();
        SparseMatrix::from_triplets(Integers, m.nrows(), m.ncols(), triplets).expect("in range")
    }

    pub fn dimension(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    pub fn is_d_squared_zero(&self) -> bool {
        self.diff.windows(2).all(|w| w[1].mul(&w[0]).map(|m| m.is_zero()).unwrap_or(false))
    }

    /// Index of a state in the input cochain data (replay data only).
    pub fn input_index(&self, state: &EnhancedState) -> Option<u32> {
        self.input_index.as_ref().and_then(|m| m.get(state).copied())
    }

    pub fn has_replay(&self) -> bool {
        self.steps.is_some()
    }

    /// Carries an input cochain (as `(input index, value)` pairs) through the
    /// recorded cancellations. Returns `(group index, position, value)`.
    pub fn project(&self, cochain: &[(u32, i64)]) -> Vec<(usize, usize, i64)> {
        let steps = self.steps.as_ref().expect("reduction recorded without replay data");
        let mut u = vec![0i64; self.input_len];
        let mut support = Vec::new();
        for (k, v) in cochain {
            if u[*k as usize] == 0 {
                support.push(*k);
            }
            u[*k as usize] += v;
        }
        for s in steps {
            u[s.x as usize] = 0;
            let uy = std::mem::take(&mut u[s.y as usize]);
            if uy != 0 {
                for (z, a) in &s.beta {
                    if u[*z as usize] == 0 {
                        support.push(*z);
                    }
                    u[*z as usize] -= uy * s.c * a;
                }
            }
        }
        support.sort_unstable();
        support.dedup();
        support
            .into_iter()
            .filter(|k| u[*k as usize] != 0)
            .map(|k| {
                let (g, p) = self.position[k as usize];
                debug_assert_ne!(g, u32::MAX);
                (g as usize, p as usize, u[k as usize])
            })
            .collect()
    }

    /// Carries a cochain of the reduced complex back to the input.
    pub fn include(&self, group: usize, coords: &[(usize, i64)]) -> Vec<(u32, i64)> {
        let steps = self.steps.as_ref().expect("reduction recorded without replay data");
        let mut w = vec![0i64; self.input_len];
        for (p, v) in coords {
            w[self.groups[group].inputs[*p] as usize] += v;
        }
        for s in steps.iter().rev() {
            let sum: i64 = s.alpha.iter().map(|(k, a)| w[*k as usize] * a).sum();
            if sum != 0 {
                w[s.x as usize] -= sum * s.c;
            }
        }
        w.iter().enumerate().filter(|(_, v)| **v != 0).map(|(k, v)| (k as u32, *v)).collect()
    }
}

/// Reduces an integer sparse vector into a field.
pub fn vec_over<F: Field>(field: &F, entries: impl IntoIterator<Item = (usize, i64)>) -> SparseVec<F::Elem> {
    SparseVec::from_pairs(field, entries.into_iter().map(|(k, v)| (k, field.from_i64(v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_standard, Cube, GradedComplex, Slice};
    use crate::cube::FrobeniusFlavor;
    use crate::diagram::parse_pd;
    use crate::exactalg::{Rationals, F2};

    const TREFOIL: &str = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]";
    const FIGURE_EIGHT: &str = "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]";

    fn field_betti<F: Field>(_f: &F, c: &GradedComplex<F>) -> Vec<(i32, usize)> {
        c.groups()
            .iter()
            .map(|g| {
                let out = c.differential(g.i).map_or(0, |m| m.rank());
                let inc = c.differential(g.i - 1).map_or(0, |m| m.rank());
                (g.i, g.len() - out - inc)
            })
            .collect()
    }

    fn reduced_betti<F: Field>(f: &F, r: &ReducedComplex) -> Vec<(i32, usize)> {
        r.groups()
            .iter()
            .map(|g| (g.i, g.len() - r.differential_over(f, g.i).rank() - r.differential_over(f, g.i - 1).rank()))
            .collect()
    }

    #[test]
    fn reduction_preserves_homology() {
        for pd in [TREFOIL, FIGURE_EIGHT] {
            let d = parse_pd(pd).unwrap();
            for flavor in [FrobeniusFlavor::Khovanov, FrobeniusFlavor::BarNatan] {
                let c = build_standard(&d, flavor, Integers).unwrap();
                let r = reduce_cochains(c.to_cochains(), false);
                assert!(r.is_d_squared_zero());
                let cf = build_standard(&d, flavor, F2).unwrap();
                assert_eq!(field_betti(&F2, &cf), reduced_betti(&F2, &r));
                let cq = build_standard(&d, flavor, Rationals).unwrap();
                assert_eq!(field_betti(&Rationals, &cq), reduced_betti(&Rationals, &r));
            }
        }
    }

    #[test]
    fn bar_natan_reduces_to_two_generators() {
        let d = parse_pd(FIGURE_EIGHT).unwrap();
        let c = build_standard(&d, FrobeniusFlavor::BarNatan, Integers).unwrap();
        let r = reduce_cochains(c.to_cochains(), false);
        let total: usize = reduced_betti(&Rationals, &r).iter().map(|x| x.1).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn replay_maps_are_chain_maps() {
        let d = parse_pd(TREFOIL).unwrap();
        let cube = Cube::new(&d).unwrap();
        let data = crate::complex::cube_cochains(&cube, FrobeniusFlavor::BarNatan, -10..=10, Slice::All);
        let input = data.clone();
        let r = reduce_cochains(data, true);
        let apply = |v: &[(u32, i64)]| -> Vec<(u32, i64)> {
            let mut acc = std::collections::BTreeMap::new();
            for (k, a) in v {
                for (t, c) in &input.out[*k as usize] {
                    *acc.entry(*t).or_insert(0) += a * c;
                }
            }
            acc.into_iter().filter(|(_, v)| *v != 0).collect()
        };
        for (g, grp) in r.groups().iter().enumerate() {
            for p in 0..grp.len() {
                // pi composed with iota is the identity on the reduced complex
                let lifted = r.include(g, &[(p, 1)]);
                assert_eq!(r.project(&lifted), vec![(g, p, 1)]);
                // iota commutes with the differentials
                let lhs = apply(&lifted);
                let dv = r.differential_or_zero(grp.i).mul_vec(&SparseVec::unit(&Integers, p)).unwrap();
                let coords: Vec<(usize, i64)> = dv.entries().to_vec();
                let rhs = if coords.is_empty() { vec![] } else { r.include(g + 1, &coords) };
                assert_eq!(lhs, rhs);
            }
        }
        // pi commutes with the differentials on input generators
        for x in 0..input.len() as u32 {
            let lhs: Vec<_> = {
                let px = r.project(&[(x, 1)]);
                let mut acc = std::collections::BTreeMap::new();
                for (g, p, v) in px {
                    let d = r.differential_or_zero(r.groups()[g].i).mul_vec(&SparseVec::unit(&Integers, p)).unwrap();
                    for (row, c) in d.entries() {
                        *acc.entry((g + 1, *row)).or_insert(0) += v * c;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != 0).map(|((g, p), v)| (g, p, v)).collect()
            };
            let rhs = r.project(&apply(&[(x, 1)]));
            assert_eq!(lhs, rhs);
        }
    }
}
