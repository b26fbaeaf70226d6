//! The cube of resolutions: sign assignments, gauge transformations and the
//! Frobenius-algebra maps carried by its edges.
//!
//! Vertices are encoded as integers whose bit `N-1-c` is the smoothing at
//! crossing `c`, so numeric order is lexicographic order with crossing 0
//! most significant. Circle labelings are encoded the same way: bit `k-1-m`
//! is set when circle `m` carries `x_-`.

use std::collections::VecDeque;

use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};
use crate::exactalg::{Ring, SparseMatrix};

/// Bit mask of crossing `c` in a vertex code of an `n`-cube.
#[inline]
pub fn crossing_bit(n: usize, c: usize) -> u64 {
    1 << (n - 1 - c)
}

/// Sign of the edge leaving `vertex` along crossing `c` in the standard
/// assignment: `(-1)^(number of 1-bits at crossings before c)`.
#[inline]
pub fn standard_sign(n: usize, vertex: u64, c: usize) -> i64 {
    if (vertex >> (n - c)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A choice of sign for every edge of the cube `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    n: usize,
    /// `signs[vertex * n + c]`, meaningful when crossing `c` is 0 at `vertex`.
    signs: Vec<i8>,
}

impl SignAssignment {
    pub fn standard(n: usize) -> Self {
        Self::from_fn(n, |v, c| standard_sign(n, v, c) as i8)
    }

    pub fn from_fn(n: usize, f: impl Fn(u64, usize) -> i8) -> Self {
        let mut signs = vec![0i8; (1usize << n) * n];
        for v in 0..1u64 << n {
            for c in 0..n {
                if v & crossing_bit(n, c) == 0 {
                    signs[v as usize * n + c] = if f(v, c) < 0 { -1 } else { 1 };
                }
            }
        }
        SignAssignment { n, signs }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Sign of the edge from `vertex` flipping crossing `c` from 0 to 1.
    pub fn sign(&self, vertex: u64, c: usize) -> i64 {
        debug_assert_eq!(vertex & crossing_bit(self.n, c), 0);
        self.signs[vertex as usize * self.n + c] as i64
    }

    /// Checks that every square face anticommutes.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for v in 0..1u64 << n {
            for a in 0..n {
                for b in a + 1..n {
                    let (ba, bb) = (crossing_bit(n, a), crossing_bit(n, b));
                    if v & (ba | bb) != 0 {
                        continue;
                    }
                    let prod = self.sign(v, a) * self.sign(v | ba, b) * self.sign(v, b) * self.sign(v | bb, a);
                    if prod != -1 {
                        return Err(Error::Precondition(format!(
                            "face at vertex {v:0width$b} spanned by crossings {} and {} commutes",
                            a + 1,
                            b + 1,
                            width = n
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of square faces of the cube.
    pub fn face_count(n: usize) -> usize {
        if n < 2 {
            0
        } else {
            n * (n - 1) / 2 * (1 << (n - 2))
        }
    }

    /// Applies a gauge transformation: `s'(u -> v) = t(u) s(u -> v) t(v)`.
    pub fn gauged(&self, t: &GaugeTransformation) -> SignAssignment {
        let n = self.n;
        SignAssignment::from_fn(n, |v, c| {
            (t.value(v) * self.sign(v, c) * t.value(v | crossing_bit(n, c))) as i8
        })
    }
}

/// A function from cube vertices to `{+1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTransformation {
    values: Vec<i8>,
}

impl GaugeTransformation {
    pub fn from_values(values: Vec<i8>) -> Self {
        GaugeTransformation { values: values.into_iter().map(|x| if x < 0 { -1 } else { 1 }).collect() }
    }

    pub fn value(&self, vertex: u64) -> i64 {
        self.values[vertex as usize] as i64
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn negated(&self) -> GaugeTransformation {
        GaugeTransformation { values: self.values.iter().map(|x| -x).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().all(|x| *x == 1)
    }
}

/// The gauge transformation `t` with `t(0...0) = +1` carrying `s1` to `s2`.
/// Its negation is the only other one.
pub fn gauge_transform(s1: &SignAssignment, s2: &SignAssignment) -> Result<GaugeTransformation> {
    if s1.n != s2.n {
        return Err(Error::DimensionMismatch("sign assignments on different cubes".into()));
    }
    s1.validate()?;
    s2.validate()?;
    let n = s1.n;
    let mut values = vec![0i8; 1 << n];
    values[0] = 1;
    let mut queue = VecDeque::from([0u64]);
    while let Some(u) = queue.pop_front() {
        for c in 0..n {
            let b = crossing_bit(n, c);
            if u & b == 0 && values[(u | b) as usize] == 0 {
                values[(u | b) as usize] = (values[u as usize] as i64 * s1.sign(u, c) * s2.sign(u, c)) as i8;
                queue.push_back(u | b);
            }
        }
    }
    let t = GaugeTransformation { values };
    if s1.gauged(&t) != *s2 {
        return Err(Error::Precondition("sign assignments are not gauge equivalent".into()));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrobeniusFlavor {
    Khovanov,
    BarNatan,
}

/// How the circles change along one edge of a cube (or one Morse move).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircleChange {
    Merge { from: (usize, usize), to: usize },
    Split { from: usize, to: (usize, usize) },
    Birth { to: usize },
    Death { from: usize },
}

/// Circle bookkeeping for a map between two resolutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeShape {
    pub k_before: usize,
    pub k_after: usize,
    pub change: CircleChange,
    /// `(before, after)` index pairs of circles the map leaves alone.
    pub untouched: Vec<(usize, usize)>,
}

#[inline]
fn label_bit(k: usize, m: usize) -> u64 {
    1 << (k - 1 - m)
}

impl EdgeShape {
    /// Shape of the cube edge from `before` to `after` at crossing `c`,
    /// given circle indices per edge label.
    pub fn for_crossing(d: &PlanarDiagram, c: usize, before: (usize, &[u16]), after: (usize, &[u16])) -> EdgeShape {
        let x = d.crossings()[c];
        let cb = |e: u32| before.1[e as usize - 1] as usize;
        let ca = |e: u32| after.1[e as usize - 1] as usize;
        // the arcs at the crossing lie on circle(a), circle(c) before and circle(a), circle(b) after
        let change = if cb(x[0]) != cb(x[2]) {
            let (p, q) = (cb(x[0]).min(cb(x[2])), cb(x[0]).max(cb(x[2])));
            CircleChange::Merge { from: (p, q), to: ca(x[0]) }
        } else {
            let (p, q) = (ca(x[0]).min(ca(x[1])), ca(x[0]).max(ca(x[1])));
            CircleChange::Split { from: cb(x[0]), to: (p, q) }
        };
        Self::with_untouched(before.0, after.0, change, (1..=d.edge_count()).map(|e| (cb(e), ca(e))))
    }

    /// Fills in the untouched-circle correspondence from pairs of circle
    /// indices sharing an edge.
    pub fn with_untouched(k_before: usize, k_after: usize, change: CircleChange, pairs: impl Iterator<Item = (usize, usize)>) -> EdgeShape {
        let (touched_b, touched_a): (Vec<usize>, Vec<usize>) = match change {
            CircleChange::Merge { from, to } => (vec![from.0, from.1], vec![to]),
            CircleChange::Split { from, to } => (vec![from], vec![to.0, to.1]),
            CircleChange::Birth { to } => (vec![], vec![to]),
            CircleChange::Death { from } => (vec![from], vec![]),
        };
        let mut map = vec![usize::MAX; k_before];
        for (b, a) in pairs {
            if !touched_b.contains(&b) && !touched_a.contains(&a) {
                map[b] = a;
            }
        }
        let untouched = map.iter().enumerate().filter(|(_, a)| **a != usize::MAX).map(|(b, a)| (b, *a)).collect();
        EdgeShape { k_before, k_after, change, untouched }
    }

    /// Image of a labeling; each term is `(labeling, coefficient)`.
    pub fn apply(&self, flavor: FrobeniusFlavor, labeling: u64) -> Vec<(u64, i64)> {
        let (kb, ka) = (self.k_before, self.k_after);
        let mut base = 0u64;
        for (b, a) in &self.untouched {
            if labeling & label_bit(kb, *b) != 0 {
                base |= label_bit(ka, *a);
            }
        }
        let get = |m: usize| labeling & label_bit(kb, m) != 0;
        let bn = flavor == FrobeniusFlavor::BarNatan;
        let mut out = Vec::with_capacity(3);
        match self.change {
            CircleChange::Merge { from: (p, q), to } => {
                let t = label_bit(ka, to);
                match (get(p), get(q)) {
                    (false, false) => out.push((base, 1)),
                    (true, true) => {
                        if bn {
                            out.push((base | t, 1));
                        }
                    }
                    _ => out.push((base | t, 1)),
                }
            }
            CircleChange::Split { from, to: (p, q) } => {
                let (tp, tq) = (label_bit(ka, p), label_bit(ka, q));
                if get(from) {
                    out.push((base | tp | tq, 1));
                } else {
                    out.push((base | tq, 1));
                    out.push((base | tp, 1));
                    if bn {
                        out.push((base, -1));
                    }
                }
            }
            CircleChange::Birth { .. } => out.push((base, 1)),
            CircleChange::Death { from } => {
                if get(from) {
                    out.push((base, 1));
                }
            }
        }
        out
    }

    /// The map as a `2^k_after x 2^k_before` matrix over `ring`.
    pub fn block<R: Ring>(&self, ring: R, flavor: FrobeniusFlavor) -> SparseMatrix<R> {
        let mut triplets = Vec::new();
        for lab in 0..1u64 << self.k_before {
            for (img, coef) in self.apply(flavor, lab) {
                triplets.push((img as usize, lab as usize, ring.from_i64(coef)));
            }
        }
        SparseMatrix::from_triplets(ring, 1 << self.k_after, 1 << self.k_before, triplets).expect("in range")
    }

    /// Change of `#x_+ - #x_-` for a labeling term.
    pub fn label_degree(k: usize, labeling: u64) -> i32 {
        k as i32 - 2 * labeling.count_ones() as i32
    }
}

/// Circle data of every vertex of a diagram's cube.
#[derive(Clone, Debug)]
pub struct CubeResolutions {
    n: usize,
    edges: usize,
    circles: Vec<u8>,
    circle_of: Vec<u16>,
}

impl CubeResolutions {
    pub fn new(d: &PlanarDiagram) -> Self {
        let n = d.crossing_count();
        let edges = d.edge_count() as usize;
        let mut circles = Vec::with_capacity(1 << n);
        let mut circle_of = Vec::with_capacity((1 << n) * edges);
        for v in 0..1u64 << n {
            let (k, of) = d.resolve_labels(|c| v & crossing_bit(n, c) != 0);
            circles.push(k as u8);
            circle_of.extend(of);
        }
        CubeResolutions { n, edges, circles, circle_of }
    }

    pub fn crossings(&self) -> usize {
        self.n
    }

    pub fn circle_count(&self, v: u64) -> usize {
        self.circles[v as usize] as usize
    }

    pub fn circle_of(&self, v: u64) -> &[u16] {
        &self.circle_of[v as usize * self.edges..(v as usize + 1) * self.edges]
    }

    pub fn edge_shape(&self, d: &PlanarDiagram, v: u64, c: usize) -> EdgeShape {
        let w = v | crossing_bit(self.n, c);
        EdgeShape::for_crossing(d, c, (self.circle_count(v), self.circle_of(v)), (self.circle_count(w), self.circle_of(w)))
    }
}
