//! Chain maps of cups, caps and saddles, and their composites along movies.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{build_standard, EnhancedState, GradedComplex};
use crate::cube::{crossing_bit, CircleChange, EdgeShape, FrobeniusFlavor};
use crate::diagram::{EdgeLabel, PlanarDiagram};
use crate::error::{Error, Result};
use crate::exactalg::{Field, Integers, SparseMatrix, SparseVec};
use crate::homology::{canonical_bases, QuotientBasis};

/// One elementary cobordism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum MorseMove {
    /// Adds a distant crossing-free unknot.
    Cup,
    /// Deletes the crossing-free component carrying this edge label.
    Cap { edge: EdgeLabel },
    /// Attaches a band between two edges; equal labels on a crossing-free
    /// loop split it in two.
    Saddle { edges: (EdgeLabel, EdgeLabel) },
}

impl MorseMove {
    pub fn euler_characteristic(&self) -> i32 {
        match self {
            MorseMove::Cup | MorseMove::Cap { .. } => 1,
            MorseMove::Saddle { .. } => -1,
        }
    }
}

/// A chain map `C(source) -> C(target)` over the integers, one matrix per
/// homological degree.
#[derive(Clone, Debug)]
pub struct MovieMap {
    pub flavor: FrobeniusFlavor,
    pub source: PlanarDiagram,
    pub target: PlanarDiagram,
    /// Declared filtered degree, the Euler characteristic of the surface.
    pub euler_characteristic: i32,
    source_complex: GradedComplex<Integers>,
    target_complex: GradedComplex<Integers>,
    maps: Vec<SparseMatrix<Integers>>,
}

fn position_table(c: &GradedComplex<Integers>) -> HashMap<EnhancedState, (usize, usize)> {
    let mut out = HashMap::new();
    for (g, group) in c.groups().iter().enumerate() {
        for (k, s) in group.states.iter().enumerate() {
            out.insert(*s, (g, k));
        }
    }
    out
}

fn same_crossings(a: &PlanarDiagram, b: &PlanarDiagram) -> Result<()> {
    if a.crossing_count() != b.crossing_count() || a.n_plus() != b.n_plus() {
        return Err(Error::Precondition("a Morse move must keep the crossings of the diagram".into()));
    }
    Ok(())
}

impl MovieMap {
    /// The identity of `C(d)`.
    pub fn identity(d: &PlanarDiagram, flavor: FrobeniusFlavor) -> Result<MovieMap> {
        let c = build_standard(d, flavor, Integers)?;
        let maps = c.groups().iter().map(|g| SparseMatrix::identity(Integers, g.len())).collect();
        Ok(MovieMap {
            flavor,
            source: d.clone(),
            target: d.clone(),
            euler_characteristic: 0,
            source_complex: c.clone(),
            target_complex: c,
            maps,
        })
    }

    /// Builds the map that applies `shape(v)` at every cube vertex `v`.
    fn from_shapes(
        flavor: FrobeniusFlavor,
        source: &PlanarDiagram,
        target: PlanarDiagram,
        euler_characteristic: i32,
        shape: impl Fn(u64) -> Result<EdgeShape>,
    ) -> Result<MovieMap> {
        same_crossings(source, &target)?;
        let sc = build_standard(source, flavor, Integers)?;
        let tc = build_standard(&target, flavor, Integers)?;
        let positions = position_table(&tc);
        let mut maps = Vec::with_capacity(sc.groups().len());
        let mut shapes: HashMap<u32, EdgeShape> = HashMap::new();
        for (g, group) in sc.groups().iter().enumerate() {
            let mut triplets = Vec::new();
            for (col, s) in group.states.iter().enumerate() {
                if !shapes.contains_key(&s.vertex) {
                    shapes.insert(s.vertex, shape(s.vertex as u64)?);
                }
                let sh = &shapes[&s.vertex];
                for (lab, coef) in sh.apply(flavor, s.labeling as u64) {
                    let t = EnhancedState { vertex: s.vertex, labeling: lab as u32, circles: sh.k_after as u8 };
                    let (tg, row) = positions[&t];
                    debug_assert_eq!(tg, g);
                    triplets.push((row, col, coef));
                }
            }
            maps.push(SparseMatrix::from_triplets(Integers, tc.groups()[g].len(), group.len(), triplets)?);
        }
        Ok(MovieMap {
            flavor,
            source: source.clone(),
            target,
            euler_characteristic,
            source_complex: sc,
            target_complex: tc,
            maps,
        })
    }

    pub fn source_complex(&self) -> &GradedComplex<Integers> {
        &self.source_complex
    }

    pub fn target_complex(&self) -> &GradedComplex<Integers> {
        &self.target_complex
    }

    /// The matrix in homological degree `i`.
    pub fn degree_map(&self, i: i32) -> Option<&SparseMatrix<Integers>> {
        let k = self.source_complex.groups().iter().position(|g| g.i == i)?;
        self.maps.get(k)
    }

    pub fn maps(&self) -> &[SparseMatrix<Integers>] {
        &self.maps
    }

    /// `δ ∘ F = F ∘ δ` in every degree.
    pub fn is_chain_map(&self) -> bool {
        let (s, t) = (&self.source_complex, &self.target_complex);
        (0..self.maps.len().saturating_sub(1)).all(|k| {
            let lhs = t.differentials()[k].mul(&self.maps[k]);
            let rhs = self.maps[k + 1].mul(&s.differentials()[k]);
            matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
        })
    }

    /// Every entry raises quantum grading by at least the declared degree;
    /// for the Khovanov flavor by exactly that much.
    pub fn respects_filtered_degree(&self) -> bool {
        let exact = self.flavor == FrobeniusFlavor::Khovanov;
        self.maps.iter().enumerate().all(|(k, m)| {
            let (sq, tq) = (&self.source_complex.groups()[k].q, &self.target_complex.groups()[k].q);
            m.triplets().iter().all(|(r, c, _)| {
                let step = tq[*r] - sq[*c];
                if exact {
                    step == self.euler_characteristic
                } else {
                    step >= self.euler_characteristic
                }
            })
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MovieMap) -> Result<MovieMap> {
        if self.flavor != other.flavor || self.target != other.source {
            return Err(Error::Precondition("movie steps do not match up".into()));
        }
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| b.mul(a)).collect::<std::result::Result<_, _>>()?;
        Ok(MovieMap {
            flavor: self.flavor,
            source: self.source.clone(),
            target: other.target.clone(),
            euler_characteristic: self.euler_characteristic + other.euler_characteristic,
            source_complex: self.source_complex.clone(),
            target_complex: other.target_complex.clone(),
            maps,
        })
    }

    /// The induced map `H^i(source) -> H^i(target)` over a field, in the
    /// bases of [`QuotientBasis::of_maps`].
    pub fn induced_on_homology<F: Field>(&self, field: F, i: i32) -> Result<SparseMatrix<F>> {
        let basis = |c: &GradedComplex<Integers>| -> QuotientBasis<F> {
            let len = c.group(i).map_or(0, |g| g.len());
            let conv = |m: &SparseMatrix<Integers>| m.map_ring(field.clone(), |v| field.from_i64(*v));
            let inc = c.differential(i - 1).map(conv).unwrap_or_else(|| SparseMatrix::zeros(field.clone(), len, 0));
            let out = c.differential(i).map(conv).unwrap_or_else(|| SparseMatrix::zeros(field.clone(), 0, len));
            QuotientBasis::of_maps(&inc, &out)
        };
        let (hs, ht) = (basis(&self.source_complex), basis(&self.target_complex));
        let Some(map) = self.degree_map(i) else {
            return Ok(SparseMatrix::zeros(field, ht.dim(), hs.dim()));
        };
        let map = map.map_ring(field.clone(), |v| field.from_i64(*v));
        let images = hs.representatives().iter().map(|r| map.mul_vec(r)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(ht.class_matrix(&images))
    }
}

fn circle_maps(d: &PlanarDiagram, v: u64) -> (usize, Vec<u16>) {
    let n = d.crossing_count();
    d.resolve_labels(|c| v & crossing_bit(n, c) != 0)
}

fn circle_of(of: &[u16], e: EdgeLabel) -> usize {
    of[e as usize - 1] as usize
}

/// The unit on a new crossing-free circle; each generator gains an `x_+`.
pub fn cup_map(d: &PlanarDiagram, flavor: FrobeniusFlavor) -> Result<MovieMap> {
    let (target, fresh) = d.add_loop();
    MovieMap::from_shapes(flavor, d, target.clone(), 1, |v| {
        let (k0, of0) = circle_maps(d, v);
        let (k1, of1) = circle_maps(&target, v);
        let change = CircleChange::Birth { to: circle_of(&of1, fresh) };
        let pairs = (1..=d.edge_count()).map(|e| (circle_of(&of0, e), circle_of(&of1, e)));
        Ok(EdgeShape::with_untouched(k0, k1, change, pairs))
    })
}

/// The counit on a crossing-free circle: `x_-` goes to 1 and `x_+` to 0.
pub fn cap_map(d: &PlanarDiagram, edge: EdgeLabel, flavor: FrobeniusFlavor) -> Result<MovieMap> {
    let (target, label_map) = d.remove_loop(edge)?;
    MovieMap::from_shapes(flavor, d, target.clone(), 1, |v| {
        let (k0, of0) = circle_maps(d, v);
        let (k1, of1) = circle_maps(&target, v);
        let change = CircleChange::Death { from: circle_of(&of0, edge) };
        let pairs = (1..=d.edge_count())
            .filter_map(|e| label_map[e as usize - 1].map(|e1| (circle_of(&of0, e), circle_of(&of1, e1))));
        Ok(EdgeShape::with_untouched(k0, k1, change, pairs))
    })
}

/// The saddle along a band between two edges: the edge map of a crossing
/// inserted at the band, whose 0- and 1-resolutions are the diagrams before
/// and after. As that crossing comes first in the cube, its sign is `+1`.
pub fn saddle_map(d: &PlanarDiagram, e1: EdgeLabel, e2: EdgeLabel, flavor: FrobeniusFlavor) -> Result<MovieMap> {
    let band = d.band(e1, e2)?;
    let target = band.diagram.clone();
    let (n1, n2) = band.new_edges;
    MovieMap::from_shapes(flavor, d, target.clone(), -1, |v| {
        let (k0, of0) = circle_maps(d, v);
        let (k1, of1) = circle_maps(&target, v);
        let (a, b) = (circle_of(&of0, e1), circle_of(&of0, e2));
        let change = if a != b {
            CircleChange::Merge { from: (a.min(b), a.max(b)), to: circle_of(&of1, n1) }
        } else {
            let (p, q) = (circle_of(&of1, n1), circle_of(&of1, n2));
            if p == q {
                return Err(Error::Precondition(format!("band between {e1} and {e2} does not change the circles")));
            }
            CircleChange::Split { from: a, to: (p.min(q), p.max(q)) }
        };
        let pairs = (1..=d.edge_count())
            .filter_map(|e| band.label_map[e as usize - 1].map(|e1| (circle_of(&of0, e), circle_of(&of1, e1))));
        Ok(EdgeShape::with_untouched(k0, k1, change, pairs))
    })
}

/// The map of one move applied to `d`.
pub fn move_map(d: &PlanarDiagram, m: &MorseMove, flavor: FrobeniusFlavor) -> Result<MovieMap> {
    match m {
        MorseMove::Cup => cup_map(d, flavor),
        MorseMove::Cap { edge } => cap_map(d, *edge, flavor),
        MorseMove::Saddle { edges } => saddle_map(d, edges.0, edges.1, flavor),
    }
}

/// Composes the maps of a movie starting at `d`.
pub fn compose_movie(d: &PlanarDiagram, moves: &[MorseMove], flavor: FrobeniusFlavor) -> Result<MovieMap> {
    let mut acc = MovieMap::identity(d, flavor)?;
    for m in moves {
        let step = move_map(&acc.target, m, flavor)?;
        acc = acc.then(&step)?;
    }
    if !acc.respects_filtered_degree() {
        return Err(Error::Precondition("movie map violates its filtered degree".into()));
    }
    Ok(acc)
}

/// Parses a movie: a JSON list of `{"move": "cup" | "cap" | "saddle", ...}`.
pub fn parse_movie(text: &str) -> Result<Vec<MorseMove>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("movie: {e}")))
}

/// The map a Khovanov-flavor movie induces on `Kh(-; F)` in the canonical
/// bases of source and target, keyed by the source bigrading.
pub fn induced_on_khovanov<F: Field>(field: &F, map: &MovieMap) -> Result<BTreeMap<(i32, i32), SparseMatrix<F>>> {
    if map.flavor != FrobeniusFlavor::Khovanov {
        return Err(Error::Precondition("induced maps on Khovanov homology need the Khovanov flavor".into()));
    }
    let source = canonical_bases(field, &crate::complex::Cube::new(&map.source)?);
    let target = canonical_bases(field, &crate::complex::Cube::new(&map.target)?);
    let positions = position_table(&map.source_complex);
    let mut out = BTreeMap::new();
    for s in &source {
        let j1 = s.j + map.euler_characteristic;
        let t = target.iter().find(|b| b.i == s.i && b.j == j1);
        let tdim = t.map_or(0, |b| b.basis.dim());
        let mut cols = Vec::with_capacity(s.basis.dim());
        let Some(m) = map.degree_map(s.i) else { continue };
        let tq = &map.target_complex.group(s.i).expect("same degrees").states;
        for rep in s.basis.representatives() {
            let lifted: Vec<(usize, F::Elem)> = rep
                .entries()
                .iter()
                .map(|(k, v)| (positions[&s.states[*k]].1, v.clone()))
                .collect();
            let x = SparseVec::from_pairs(field, lifted);
            let y = m.map_ring(field.clone(), |v| field.from_i64(*v)).mul_vec(&x)?;
            let Some(t) = t else {
                cols.push(SparseVec::new());
                continue;
            };
            let index: HashMap<EnhancedState, usize> = t.states.iter().enumerate().map(|(k, st)| (*st, k)).collect();
            let restricted = y.entries().iter().map(|(r, v)| (index[&tq[*r]], v.clone())).collect();
            let classes = t
                .basis
                .classes(&SparseVec::from_pairs(field, restricted))
                .ok_or_else(|| Error::Precondition("image of a cocycle is not a cocycle".into()))?;
            cols.push(SparseVec::from_dense(field, &classes));
        }
        out.insert((s.i, s.j), SparseMatrix::from_columns(field.clone(), tdim, &cols));
    }
    Ok(out)
}
