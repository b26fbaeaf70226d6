//! Oriented link diagrams in planar-diagram (PD) notation.
//!
//! A crossing `X[a,b,c,d]` lists its four edge labels counterclockwise,
//! starting from the incoming under-strand, so the under-strand runs from
//! position 0 to position 2. The over-strand runs between positions 1 and 3;
//! the crossing is positive when it enters at position 3. Crossing-free
//! components are written `Loop[k]`.
//!
//! The 0-smoothing of a crossing joins positions (0,1) and (2,3), the
//! 1-smoothing joins (0,3) and (1,2). For a positive crossing the 0-smoothing
//! is the oriented one.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};

pub type EdgeLabel = u32;

/// Position of an edge end inside a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub crossing: usize,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossingSign {
    Positive,
    Negative,
}

/// A validated oriented link diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarDiagram {
    crossings: Vec<[EdgeLabel; 4]>,
    /// `heads[c][p]` is true when the edge at that slot arrives at the crossing.
    heads: Vec<[bool; 4]>,
    loops: Vec<EdgeLabel>,
    edge_count: u32,
    signs: Vec<CrossingSign>,
    component_count: usize,
}

/// The circles of one vertex of the cube of resolutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedState {
    pub vertex: Vec<bool>,
    /// Edge labels of each circle, circles sorted by their minimum label.
    pub circles: Vec<Vec<EdgeLabel>>,
}

impl ResolvedState {
    pub fn weight(&self) -> usize {
        self.vertex.iter().filter(|b| **b).count()
    }

    /// Canonical identity of each circle (its minimum edge label).
    pub fn circle_ids(&self) -> Vec<EdgeLabel> {
        self.circles.iter().map(|c| c[0]).collect()
    }
}

/// Outcome of a band move between two edges.
#[derive(Clone, Debug)]
pub struct BandResult {
    pub diagram: PlanarDiagram,
    /// Image of each old edge label (index `label - 1`) in the new diagram;
    /// `None` for a removed crossing-free loop.
    pub label_map: Vec<Option<EdgeLabel>>,
    /// Labels in the new diagram of the edges the band attaches to.
    pub new_edges: (EdgeLabel, EdgeLabel),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl PlanarDiagram {
    /// The empty diagram (no components).
    pub fn empty() -> Self {
        PlanarDiagram {
            crossings: Vec::new(),
            heads: Vec::new(),
            loops: Vec::new(),
            edge_count: 0,
            signs: Vec::new(),
            component_count: 0,
        }
    }

    /// The 0-crossing unknot `PD[Loop[1]]`.
    pub fn unknot() -> Self {
        Self::new(Vec::new(), vec![1]).expect("valid unknot")
    }

    /// Validates labels and derives orientations from the under-strands,
    /// falling back to the consecutive-label rule on components that only
    /// pass over.
    pub fn new(crossings: Vec<[EdgeLabel; 4]>, loops: Vec<EdgeLabel>) -> Result<Self> {
        let occurrences = check_labels(&crossings, &loops)?;
        let heads = derive_orientation(&crossings, &occurrences)?;
        Self::assemble(crossings, heads, loops)
    }

    /// Builds a diagram with explicitly given edge orientations.
    pub fn with_orientation(crossings: Vec<[EdgeLabel; 4]>, heads: Vec<[bool; 4]>, loops: Vec<EdgeLabel>) -> Result<Self> {
        if heads.len() != crossings.len() {
            return Err(Error::InvalidDiagram("orientation data does not match the crossings".into()));
        }
        let occurrences = check_labels(&crossings, &loops)?;
        for (c, h) in heads.iter().enumerate() {
            if !h[0] || h[2] || h[1] == h[3] {
                return Err(Error::InvalidDiagram(format!("crossing {} has an inconsistent orientation", c + 1)));
            }
        }
        for (label, occ) in &occurrences {
            let (s, t) = (occ[0], occ[1]);
            if heads[s.crossing][s.position] == heads[t.crossing][t.position] {
                return Err(Error::InvalidDiagram(format!("edge {label} has no consistent orientation")));
            }
        }
        Self::assemble(crossings, heads, loops)
    }

    fn assemble(crossings: Vec<[EdgeLabel; 4]>, heads: Vec<[bool; 4]>, loops: Vec<EdgeLabel>) -> Result<Self> {
        let edge_count = (crossings.len() * 2 + loops.len()) as u32;
        let signs = heads
            .iter()
            .map(|h| if h[3] { CrossingSign::Positive } else { CrossingSign::Negative })
            .collect();
        let mut d = PlanarDiagram { crossings, heads, loops, edge_count, signs, component_count: 0 };
        d.component_count = d.count_components();
        Ok(d)
    }

    fn count_components(&self) -> usize {
        let mut uf = UnionFind::new(self.edge_count as usize + 1);
        for x in &self.crossings {
            uf.union(x[0] as usize, x[2] as usize);
            uf.union(x[1] as usize, x[3] as usize);
        }
        (1..=self.edge_count as usize).filter(|e| uf.find(*e) == *e).count()
    }

    pub fn crossings(&self) -> &[[EdgeLabel; 4]] {
        &self.crossings
    }
    pub fn heads(&self) -> &[[bool; 4]] {
        &self.heads
    }
    pub fn loops(&self) -> &[EdgeLabel] {
        &self.loops
    }
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }
    pub fn edge_count(&self) -> u32 {
        self.edge_count
    }
    pub fn component_count(&self) -> usize {
        self.component_count
    }
    pub fn is_knot(&self) -> bool {
        self.component_count == 1
    }
    pub fn sign(&self, crossing: usize) -> CrossingSign {
        self.signs[crossing]
    }
    pub fn signs(&self) -> &[CrossingSign] {
        &self.signs
    }
    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|s| **s == CrossingSign::Positive).count()
    }
    pub fn n_minus(&self) -> usize {
        self.crossings.len() - self.n_plus()
    }
    pub fn writhe(&self) -> i64 {
        self.n_plus() as i64 - self.n_minus() as i64
    }

    /// Slots of a crossing edge as `(tail, head)`; `None` for loops and
    /// unknown labels.
    pub fn edge_ends(&self, label: EdgeLabel) -> Option<(Slot, Slot)> {
        let mut tail = None;
        let mut head = None;
        for (c, x) in self.crossings.iter().enumerate() {
            for p in 0..4 {
                if x[p] == label {
                    let s = Slot { crossing: c, position: p };
                    if self.heads[c][p] {
                        head = Some(s);
                    } else {
                        tail = Some(s);
                    }
                }
            }
        }
        tail.zip(head)
    }

    pub fn is_loop(&self, label: EdgeLabel) -> bool {
        self.loops.contains(&label)
    }

    /// Circles of the resolution at `vertex` (one bit per crossing, in PD order).
    pub fn resolve(&self, vertex: &[bool]) -> Result<ResolvedState> {
        if vertex.len() != self.crossings.len() {
            return Err(Error::Precondition(format!(
                "vertex has {} entries but the diagram has {} crossings",
                vertex.len(),
                self.crossings.len()
            )));
        }
        let (k, circle_of) = self.resolve_labels(|c| vertex[c]);
        let mut circles = vec![Vec::new(); k];
        for e in 1..=self.edge_count {
            circles[circle_of[e as usize - 1] as usize].push(e);
        }
        Ok(ResolvedState { vertex: vertex.to_vec(), circles })
    }

    /// Circle index of each edge label (index `label - 1`), circles numbered
    /// by increasing minimum label. Returns the circle count as well.
    pub fn resolve_labels(&self, bit: impl Fn(usize) -> bool) -> (usize, Vec<u16>) {
        let e = self.edge_count as usize;
        let mut uf = UnionFind::new(e + 1);
        for (c, x) in self.crossings.iter().enumerate() {
            let [a, b, cc, d] = x.map(|v| v as usize);
            if bit(c) {
                uf.union(a, d);
                uf.union(b, cc);
            } else {
                uf.union(a, b);
                uf.union(cc, d);
            }
        }
        let mut id = vec![u16::MAX; e + 1];
        let mut out = Vec::with_capacity(e);
        let mut k = 0u16;
        for label in 1..=e {
            let r = uf.find(label);
            if id[r] == u16::MAX {
                id[r] = k;
                k += 1;
            }
            out.push(id[r]);
        }
        (k as usize, out)
    }

    /// Swaps over- and under-strands at every crossing.
    pub fn mirror(&self) -> PlanarDiagram {
        let mut crossings = Vec::with_capacity(self.crossings.len());
        let mut heads = Vec::with_capacity(self.crossings.len());
        for (x, h) in self.crossings.iter().zip(&self.heads) {
            // start the tuple at the incoming over-strand
            let start = if h[3] { 3 } else { 1 };
            crossings.push([0, 1, 2, 3].map(|k| x[(start + k) % 4]));
            heads.push([0, 1, 2, 3].map(|k| h[(start + k) % 4]));
        }
        PlanarDiagram::with_orientation(crossings, heads, self.loops.clone()).expect("mirror of a valid diagram")
    }

    /// Places `other` beside `self`, shifting its labels past ours.
    pub fn disjoint_union(&self, other: &PlanarDiagram) -> PlanarDiagram {
        let off = self.edge_count;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|x| x.map(|v| v + off)));
        let mut heads = self.heads.clone();
        heads.extend(other.heads.iter().cloned());
        let mut loops = self.loops.clone();
        loops.extend(other.loops.iter().map(|v| v + off));
        PlanarDiagram::with_orientation(crossings, heads, loops).expect("union of valid diagrams")
    }

    /// Connected sum along edge `e1` of `self` and edge `e2` of `other`.
    pub fn connected_sum(&self, e1: EdgeLabel, other: &PlanarDiagram, e2: EdgeLabel) -> Result<PlanarDiagram> {
        if e1 == 0 || e1 > self.edge_count {
            return Err(Error::InvalidDiagram(format!("edge {e1} is not an edge of the first diagram")));
        }
        if e2 == 0 || e2 > other.edge_count {
            return Err(Error::InvalidDiagram(format!("edge {e2} is not an edge of the second diagram")));
        }
        let union = self.disjoint_union(other);
        Ok(union.band_unchecked(e1, e2 + self.edge_count)?.diagram)
    }

    /// Regions of the diagram as cyclic lists of `(edge, traversed along its
    /// orientation)`.
    pub fn faces(&self) -> Vec<Vec<(EdgeLabel, bool)>> {
        let occ = self.occurrences();
        let other_end = |s: Slot| -> Slot {
            let o = &occ[&self.crossings[s.crossing][s.position]];
            if o[0] == s {
                o[1]
            } else {
                o[0]
            }
        };
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut faces = Vec::new();
        for c in 0..n {
            for p in 0..4 {
                if seen[c][p] {
                    continue;
                }
                let mut face = Vec::new();
                let mut s = Slot { crossing: c, position: p };
                while !seen[s.crossing][s.position] {
                    seen[s.crossing][s.position] = true;
                    let leave = Slot { crossing: s.crossing, position: (s.position + 1) % 4 };
                    let label = self.crossings[leave.crossing][leave.position];
                    face.push((label, !self.heads[leave.crossing][leave.position]));
                    s = other_end(leave);
                }
                faces.push(face);
            }
        }
        faces
    }

    fn occurrences(&self) -> BTreeMap<EdgeLabel, [Slot; 2]> {
        let mut occ: BTreeMap<EdgeLabel, Vec<Slot>> = BTreeMap::new();
        for (c, x) in self.crossings.iter().enumerate() {
            for (p, v) in x.iter().enumerate() {
                occ.entry(*v).or_default().push(Slot { crossing: c, position: p });
            }
        }
        occ.into_iter().map(|(k, v)| (k, [v[0], v[1]])).collect()
    }

    /// Attaches an oriented band between edges `e1` and `e2`. For two crossing
    /// edges the band must lie in a region both edges bound, with the edges
    /// antiparallel there.
    pub fn band(&self, e1: EdgeLabel, e2: EdgeLabel) -> Result<BandResult> {
        if !self.is_loop(e1) && !self.is_loop(e2) && e1 != e2 && self.edge_ends(e1).is_some() && self.edge_ends(e2).is_some() {
            let compatible = self.faces().iter().any(|f| {
                f.iter().any(|(l, along)| *l == e1 && f.iter().any(|(m, a2)| *m == e2 && a2 == along))
            });
            if !compatible {
                return Err(Error::Precondition(format!(
                    "edges {e1} and {e2} do not bound a common region with opposite directions"
                )));
            }
        }
        self.band_unchecked(e1, e2)
    }

    fn band_unchecked(&self, e1: EdgeLabel, e2: EdgeLabel) -> Result<BandResult> {
        for e in [e1, e2] {
            if e == 0 || e > self.edge_count {
                return Err(Error::Precondition(format!("edge {e} does not exist")));
            }
        }
        let identity: Vec<Option<EdgeLabel>> = (1..=self.edge_count).map(Some).collect();
        match (self.is_loop(e1), self.is_loop(e2)) {
            (true, true) if e1 == e2 => {
                // split a crossing-free loop in two
                let mut loops = self.loops.clone();
                let fresh = self.edge_count + 1;
                loops.push(fresh);
                let diagram = PlanarDiagram::with_orientation(self.crossings.clone(), self.heads.clone(), loops)?;
                Ok(BandResult { diagram, label_map: identity, new_edges: (e1, fresh) })
            }
            (true, _) => {
                let (diagram, label_map) = self.remove_loop(e1)?;
                let kept = label_map[e2 as usize - 1].expect("kept edge");
                Ok(BandResult { diagram, label_map, new_edges: (kept, kept) })
            }
            (false, true) => {
                let (diagram, label_map) = self.remove_loop(e2)?;
                let kept = label_map[e1 as usize - 1].expect("kept edge");
                Ok(BandResult { diagram, label_map, new_edges: (kept, kept) })
            }
            (false, false) => {
                if e1 == e2 {
                    return Err(Error::Precondition("a band needs two distinct edges".into()));
                }
                let (_, h1) = self.edge_ends(e1).expect("crossing edge");
                let (_, h2) = self.edge_ends(e2).expect("crossing edge");
                // tail of e1 now runs into the head of e2 and vice versa
                let mut crossings = self.crossings.clone();
                crossings[h2.crossing][h2.position] = e1;
                crossings[h1.crossing][h1.position] = e2;
                let diagram = PlanarDiagram::with_orientation(crossings, self.heads.clone(), self.loops.clone())?;
                Ok(BandResult { diagram, label_map: identity, new_edges: (e1, e2) })
            }
        }
    }

    /// Deletes a crossing-free loop and closes the gap in the labels.
    pub fn remove_loop(&self, label: EdgeLabel) -> Result<(PlanarDiagram, Vec<Option<EdgeLabel>>)> {
        if !self.is_loop(label) {
            return Err(Error::Precondition(format!("edge {label} is not a crossing-free component")));
        }
        let map: Vec<Option<EdgeLabel>> = (1..=self.edge_count)
            .map(|e| match e.cmp(&label) {
                std::cmp::Ordering::Less => Some(e),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(e - 1),
            })
            .collect();
        let f = |e: EdgeLabel| map[e as usize - 1].expect("kept edge");
        let crossings = self.crossings.iter().map(|x| x.map(f)).collect();
        let loops = self.loops.iter().filter(|l| **l != label).map(|l| f(*l)).collect();
        let d = PlanarDiagram::with_orientation(crossings, self.heads.clone(), loops)?;
        Ok((d, map))
    }

    /// Adds a crossing-free loop with the next free label.
    pub fn add_loop(&self) -> (PlanarDiagram, EdgeLabel) {
        let fresh = self.edge_count + 1;
        let mut loops = self.loops.clone();
        loops.push(fresh);
        let d = PlanarDiagram::with_orientation(self.crossings.clone(), self.heads.clone(), loops).expect("valid");
        (d, fresh)
    }

    /// Knot-Atlas style text, e.g. `PD[X[1,4,2,5],...]`.
    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        parts.extend(self.loops.iter().map(|l| format!("Loop[{l}]")));
        format!("PD[{}]", parts.join(","))
    }

    /// Equality up to the order of crossings and loops.
    pub fn same_up_to_order(&self, other: &PlanarDiagram) -> bool {
        let mut a = self.crossings.clone();
        let mut b = other.crossings.clone();
        a.sort_unstable();
        b.sort_unstable();
        let mut la = self.loops.clone();
        let mut lb = other.loops.clone();
        la.sort_unstable();
        lb.sort_unstable();
        a == b && la == lb
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}

fn check_labels(crossings: &[[EdgeLabel; 4]], loops: &[EdgeLabel]) -> Result<BTreeMap<EdgeLabel, [Slot; 2]>> {
    let mut occ: BTreeMap<EdgeLabel, Vec<Slot>> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (p, v) in x.iter().enumerate() {
            if *v == 0 {
                return Err(Error::InvalidDiagram(format!("crossing {} uses edge label 0; labels start at 1", c + 1)));
            }
            occ.entry(*v).or_default().push(Slot { crossing: c, position: p });
        }
    }
    for (label, slots) in &occ {
        if slots.len() != 2 {
            let where_ = slots.iter().map(|s| (s.crossing + 1).to_string()).collect::<Vec<_>>().join(", ");
            let count = if slots.len() == 1 { "once".to_string() } else { format!("{} times", slots.len()) };
            return Err(Error::InvalidDiagram(format!(
                "edge label {label} appears {count} (crossing {where_}); every edge must appear exactly twice"
            )));
        }
    }
    let mut seen_loops = std::collections::BTreeSet::new();
    for l in loops {
        if *l == 0 || occ.contains_key(l) || !seen_loops.insert(*l) {
            return Err(Error::InvalidDiagram(format!("loop label {l} is zero, repeated, or used by a crossing")));
        }
    }
    let total = occ.len() + loops.len();
    let max = occ.keys().chain(loops.iter()).copied().max().unwrap_or(0) as usize;
    if max != total {
        let missing = (1..=max as u32).find(|e| !occ.contains_key(e) && !seen_loops.contains(e)).unwrap_or(0);
        return Err(Error::InvalidDiagram(format!("edge labels must be 1..{total}; label {missing} is missing")));
    }
    Ok(occ.into_iter().map(|(k, v)| (k, [v[0], v[1]])).collect())
}

fn derive_orientation(crossings: &[[EdgeLabel; 4]], occ: &BTreeMap<EdgeLabel, [Slot; 2]>) -> Result<Vec<[bool; 4]>> {
    let n = crossings.len();
    let mut role: Vec<[Option<bool>; 4]> = vec![[None; 4]; n];
    let mut queue = VecDeque::new();
    let assign = |role: &mut Vec<[Option<bool>; 4]>, queue: &mut VecDeque<Slot>, s: Slot, head: bool| -> Result<()> {
        match role[s.crossing][s.position] {
            Some(r) if r != head => Err(Error::InvalidDiagram(format!(
                "edge {} at crossing {} has inconsistent orientation",
                crossings[s.crossing][s.position],
                s.crossing + 1
            ))),
            Some(_) => Ok(()),
            None => {
                role[s.crossing][s.position] = Some(head);
                queue.push_back(s);
                Ok(())
            }
        }
    };
    for c in 0..n {
        assign(&mut role, &mut queue, Slot { crossing: c, position: 0 }, true)?;
        assign(&mut role, &mut queue, Slot { crossing: c, position: 2 }, false)?;
    }
    let mut next_unresolved = 0;
    loop {
        while let Some(s) = queue.pop_front() {
            let head = role[s.crossing][s.position].unwrap();
            let label = crossings[s.crossing][s.position];
            let o = occ[&label];
            let other = if o[0] == s { o[1] } else { o[0] };
            assign(&mut role, &mut queue, other, !head)?;
            if s.position % 2 == 1 {
                let partner = Slot { crossing: s.crossing, position: (s.position + 2) % 4 };
                assign(&mut role, &mut queue, partner, !head)?;
            }
        }
        while next_unresolved < n && role[next_unresolved][1].is_some() {
            next_unresolved += 1;
        }
        if next_unresolved == n {
            break;
        }
        // over-only component: orient along increasing labels
        let x = crossings[next_unresolved];
        let (j, l) = (x[1], x[3]);
        let enters_at_3 = j == l + 1 || l > j + 1;
        assign(&mut role, &mut queue, Slot { crossing: next_unresolved, position: 3 }, enters_at_3)?;
    }
    Ok(role.into_iter().map(|r| r.map(|v| v.unwrap())).collect())
}

#[derive(Deserialize)]
struct JsonDiagram {
    pd: Vec<[EdgeLabel; 4]>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    loops: Vec<EdgeLabel>,
}

/// Parses Knot-Atlas text (`PD[X[1,4,2,5],...,Loop[7]]`), a JSON list of
/// 4-tuples, or a JSON object `{"pd": [...], "name": ..., "loops": [...]}`.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram> {
    parse_named_pd(text).map(|(_, d)| d)
}

/// Like [`parse_pd`], also returning the name from a JSON object.
pub fn parse_named_pd(text: &str) -> Result<(Option<String>, PlanarDiagram)> {
    let t = text.trim();
    if t.starts_with('{') {
        let j: JsonDiagram = serde_json::from_str(t).map_err(|e| Error::Parse(format!("bad diagram JSON: {e}")))?;
        return Ok((j.name, PlanarDiagram::new(j.pd, j.loops)?));
    }
    if t.starts_with('[') {
        let pd: Vec<[EdgeLabel; 4]> =
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("bad diagram JSON: {e}")))?;
        return Ok((None, PlanarDiagram::new(pd, Vec::new())?));
    }
    let (crossings, loops) = parse_knot_atlas(t)?;
    Ok((None, PlanarDiagram::new(crossings, loops)?))
}

fn parse_knot_atlas(t: &str) -> Result<(Vec<[EdgeLabel; 4]>, Vec<EdgeLabel>)> {
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let body = compact
        .strip_prefix("PD[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected PD[...], found {:?}", truncate(t))))?;
    let mut crossings = Vec::new();
    let mut loops = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        let (head, after) = rest
            .split_once('[')
            .ok_or_else(|| Error::Parse(format!("expected X[...] or Loop[...] near {:?}", truncate(rest))))?;
        let (args, tail) = after
            .split_once(']')
            .ok_or_else(|| Error::Parse(format!("unterminated {head}[ near {:?}", truncate(rest))))?;
        let nums = args
            .split(',')
            .map(|a| a.parse::<EdgeLabel>().map_err(|_| Error::Parse(format!("bad edge label {a:?} in {head}[{args}]"))))
            .collect::<Result<Vec<_>>>()?;
        match head {
            "X" => {
                let x: [EdgeLabel; 4] = nums.try_into().map_err(|_| {
                    Error::Parse(format!("crossing {} must have four edge labels: X[{args}]", crossings.len() + 1))
                })?;
                crossings.push(x);
            }
            "Loop" if nums.len() == 1 => loops.push(nums[0]),
            _ => return Err(Error::Parse(format!("unknown PD element {head}[{args}]"))),
        }
        rest = tail.strip_prefix(',').unwrap_or(tail);
        if tail.starts_with(',') && rest.is_empty() {
            return Err(Error::Parse("trailing comma in PD".into()));
        }
    }
    Ok((crossings, loops))
}

fn truncate(s: &str) -> String {
    s.chars().take(40).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TREFOIL: &str = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]";

    fn trace_components(d: &PlanarDiagram) -> usize {
        // independent oracle: walk edges following orientation
        let mut next = vec![0u32; d.edge_count() as usize + 1];
        for (x, h) in d.crossings().iter().zip(d.heads()) {
            next[x[0] as usize] = x[2];
            if h[3] {
                next[x[3] as usize] = x[1];
            } else {
                next[x[1] as usize] = x[3];
            }
        }
        for l in d.loops() {
            next[*l as usize] = *l;
        }
        let mut seen = vec![false; next.len()];
        let mut count = 0;
        for e in 1..next.len() {
            if !seen[e] {
                count += 1;
                let mut f = e;
                while !seen[f] {
                    seen[f] = true;
                    f = next[f] as usize;
                }
            }
        }
        count
    }

    #[test]
    fn trefoil_parses() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.writhe(), -3);
        assert_eq!(trace_components(&d), 1);
    }

    #[test]
    fn single_crossing_unknot() {
        let d = parse_pd("PD[X[1,1,2,2]]").unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.sign(0), CrossingSign::Positive);
        assert_eq!(d.resolve(&[false]).unwrap().circles.len(), 2);
        assert_eq!(d.resolve(&[true]).unwrap().circles.len(), 1);
    }

    #[test]
    fn label_validation() {
        let err = parse_pd("PD[X[1,4,2,3]]").unwrap_err().to_string();
        assert!(err.contains("appears once"), "{err}");
        assert!(err.contains("crossing 1"), "{err}");
        let err = parse_pd("PD[X[1,1,2,2],X[3,3,4,4],X[5,5,6,7]]").unwrap_err().to_string();
        assert!(err.contains("appears once"), "{err}");
        assert!(parse_pd("PD[X[1,2,3]]").is_err());
        assert!(parse_pd("PD[X[1,a,2,2]]").is_err());
        assert!(parse_pd("X[1,1,2,2]").is_err());
    }

    #[test]
    fn orientation_conflict_is_reported() {
        // edge 1 enters as an under-strand at both ends
        let err = parse_pd("PD[X[1,3,2,4],X[1,4,2,3]]").unwrap_err();
        assert!(err.to_string().contains("orientation"), "{err}");
    }

    #[test]
    fn json_forms() {
        let a = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]").unwrap();
        let (name, b) = parse_named_pd(r#"{"pd": [[1,4,2,5],[3,6,4,1],[5,2,6,3]], "name": "3_1"}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(name.as_deref(), Some("3_1"));
        assert_eq!(a, parse_pd(&a.to_pd_string()).unwrap());
    }

    #[test]
    fn zero_crossing_diagrams() {
        let u = PlanarDiagram::unknot();
        assert_eq!(u.component_count(), 1);
        assert_eq!(u.resolve(&[]).unwrap().circles.len(), 1);
        assert_eq!(parse_pd("PD[Loop[1]]").unwrap(), u);
        let uu = u.disjoint_union(&u);
        assert_eq!(uu.component_count(), 2);
        assert_eq!(uu.crossing_count(), 0);
        assert_eq!(u.mirror(), u);
        assert_eq!(PlanarDiagram::empty().component_count(), 0);
    }

    #[test]
    fn trefoil_resolutions() {
        let d = parse_pd(TREFOIL).unwrap();
        let counts: Vec<usize> = (0..8u32)
            .map(|v| d.resolve(&[v & 4 != 0, v & 2 != 0, v & 1 != 0]).unwrap().circles.len())
            .collect();
        // the all-zero resolution of this diagram is the all-A smoothing
        assert_eq!(counts[0], if d.writhe() > 0 { 2 } else { 3 });
        assert!(d.resolve(&[false]).is_err());
    }

    #[test]
    fn neighbouring_vertices_change_circle_count_by_one() {
        let d = parse_pd("PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]").unwrap();
        let n = d.crossing_count();
        for v in 0..(1u32 << n) {
            let k = d.resolve_labels(|c| v >> c & 1 == 1).0;
            for c in 0..n {
                let u = v ^ (1 << c);
                let k2 = d.resolve_labels(|c| u >> c & 1 == 1).0;
                assert_eq!((k as i64 - k2 as i64).abs(), 1);
            }
        }
    }

    #[test]
    fn mirror_is_an_involution() {
        let d = parse_pd(TREFOIL).unwrap();
        let m = d.mirror();
        assert_eq!(m.writhe(), -d.writhe());
        assert_eq!(m.component_count(), 1);
        assert!(m.mirror().same_up_to_order(&d));
        assert_eq!(m.mirror(), d);
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let t = parse_pd(TREFOIL).unwrap();
        let s = t.connected_sum(1, &t, 1).unwrap();
        assert_eq!(s.crossing_count(), 6);
        assert_eq!(s.component_count(), 1);
        assert_eq!(trace_components(&s), 1);
        assert_eq!(s.writhe(), 2 * t.writhe());
        assert!(t.connected_sum(9, &t, 1).is_err());
        let u = PlanarDiagram::unknot();
        assert_eq!(t.connected_sum(2, &u, 1).unwrap().crossing_count(), 3);
    }

    #[test]
    fn face_count_is_euler() {
        for pd in [TREFOIL, "PD[X[1,1,2,2]]", "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]"] {
            let d = parse_pd(pd).unwrap();
            assert_eq!(d.faces().len(), d.crossing_count() + 2);
        }
    }

    #[test]
    fn band_between_parallel_edges_of_unlink_shape() {
        let d = parse_pd(TREFOIL).unwrap();
        // some pair of edges is compatible, and the band changes components
        let mut found = false;
        for e1 in 1..=6 {
            for e2 in e1 + 1..=6 {
                if let Ok(r) = d.band(e1, e2) {
                    found = true;
                    assert_eq!(r.diagram.component_count(), 2);
                    assert_eq!(trace_components(&r.diagram), 2);
                }
            }
        }
        assert!(found);
    }
}
