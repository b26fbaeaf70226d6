//! s-invariants and their refinements by cohomology operations: the
//! fullness search, the Bockstein, operation-matrix files and the integral
//! variant of s.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{Cube, EnhancedState, ReducedComplex};
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};
use crate::exactalg::{
    invariant_factors, smith_normal_form, Coefficients, Field, IntMatrix, Integers, Rationals, Ring, SparseMatrix,
    SparseVec, Subspace, F2,
};
use crate::homology::{bar_natan_window, canonical_bases, CanonicalBlock, canonical_slice, require_knot, slice_vector, FiltrationMaps};

pub const SCHEMA: u32 = 1;

/// `s_min`, `s_max` and `s = s_min + 1` for one coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SInvariant {
    pub s_min: i32,
    pub s_max: i32,
    pub s: i32,
}

fn top_level<F: Field>(fm: &FiltrationMaps<F>, pred: impl Fn(usize) -> bool) -> Result<i32> {
    let (lo, hi) = fm.q_range();
    (lo..=hi)
        .rev()
        .step_by(2)
        .find(|q| pred(fm.inclusion_rank(*q)))
        .ok_or_else(|| Error::Precondition("empty filtration scan".into()))
}

/// Reads the s-invariant off filtration maps.
pub fn s_from_maps<F: Field>(fm: &FiltrationMaps<F>) -> Result<SInvariant> {
    if fm.total_dim() != 2 {
        return Err(Error::Precondition(format!("Bar-Natan homology in degree 0 has dimension {}, not 2", fm.total_dim())));
    }
    let s_min = top_level(fm, |r| r == 2)?;
    let s_max = top_level(fm, |r| r >= 1)?;
    Ok(SInvariant { s_min, s_max, s: s_min + 1 })
}

/// The s-invariant of a knot over a field.
pub fn s_field(d: &PlanarDiagram, coeffs: Coefficients) -> Result<SInvariant> {
    require_knot(d)?;
    let cube = Cube::new(d)?;
    let model = bar_natan_window(&cube, -2, false);
    crate::with_field!(coeffs, |f| s_from_maps(&FiltrationMaps::new(f, &model)?))
}

/// `(s^{Z,m}_min + 1, s^{Z,m}_max - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralS {
    pub m: u64,
    pub s_min_plus_one: i32,
    pub s_max_minus_one: i32,
}

fn big_rational(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Integer basis (as columns) of the kernel of `m`, saturated in `Z^n`.
fn integer_kernel(m: &SparseMatrix<Integers>) -> Vec<Vec<BigInt>> {
    let n = m.ncols();
    if n == 0 {
        return vec![];
    }
    // the rational row space has the same integer kernel; use its cleared rows
    let q = m.map_ring(Rationals, |v| Rationals.from_i64(*v));
    let rref = q.rref();
    let rows: Vec<Vec<(usize, BigInt)>> = rref
        .reduced
        .rows()
        .iter()
        .map(|row| {
            let lcm = row.entries().iter().fold(BigInt::one(), |acc, (_, v)| num_integer::lcm(acc, v.denom().clone()));
            row.entries().iter().map(|(c, v)| (*c, (v * big_rational(&lcm)).to_integer())).collect()
        })
        .collect();
    let ints = IntMatrix::from_triplets(
        rows.len(),
        n,
        rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone()))),
    )
    .expect("in range");
    let snf = smith_normal_form(&ints);
    (snf.rank()..n).map(|k| (0..n).map(|r| snf.v[r][k].clone()).collect()).collect()
}

/// Nontrivial invariant factors of `Z^r / span(cols)`, with free summands
/// reported as zeros at the end.
fn cokernel_factors(r: usize, cols: &[Vec<BigInt>]) -> Vec<BigInt> {
    let m = IntMatrix::from_triplets(
        r,
        cols.len(),
        cols.iter().enumerate().flat_map(|(c, col)| col.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(row, v)| (row, c, v.clone()))),
    )
    .expect("in range");
    let factors = invariant_factors(&m);
    let mut out: Vec<BigInt> = factors.iter().filter(|d| !d.is_one()).cloned().collect();
    out.extend(std::iter::repeat(BigInt::zero()).take(r - factors.len()));
    out
}

fn divides(d: &BigInt, m: u64) -> bool {
    !d.is_zero() && (BigInt::from(m) % d).is_zero()
}

/// Whether `Z/m` and `Z + Z/m` surject onto `H_0(C) / i_* H_0(F_q)` over the
/// integers, for every level of a reduced complex.
fn integral_levels(model: &ReducedComplex, m: u64) -> Result<Vec<(i32, bool, bool)>> {
    let g0 = model.group(0).ok_or_else(|| Error::Precondition("reduced complex has no degree 0".into()))?;
    let q0 = g0.q.clone();
    let n = q0.len();
    let d_out = model.differential_or_zero(0);
    let d_in = model.differential_or_zero(-1);
    let kernel = integer_kernel(&d_out);
    let r = kernel.len();
    let kmat = SparseMatrix::from_triplets(
        Rationals,
        n,
        r,
        kernel.iter().enumerate().flat_map(|(c, col)| col.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(row, v)| (row, c, big_rational(v)))).collect(),
    )?;
    let coords = |v: &[BigInt]| -> Result<Vec<BigInt>> {
        let b = SparseVec::from_pairs(&Rationals, v.iter().enumerate().map(|(k, x)| (k, big_rational(x))).collect());
        let y = kmat.solve(&b)?.ok_or_else(|| Error::Precondition("vector is not a cocycle".into()))?;
        let dense = y.to_dense(&Rationals, r);
        dense
            .into_iter()
            .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::Precondition("non-integral lattice coordinates".into())) })
            .collect()
    };
    let boundary_cols: Vec<Vec<BigInt>> = d_in
        .columns()
        .iter()
        .map(|c| c.to_dense(&Integers, n).into_iter().map(BigInt::from).collect())
        .collect();
    let boundaries: Vec<Vec<BigInt>> = boundary_cols.iter().map(|b| coords(b)).collect::<Result<_>>()?;
    let (lo, hi) = (q0.iter().copied().min().unwrap_or(0), q0.iter().copied().max().unwrap_or(0));
    let mut out = Vec::new();
    for q in (lo - 2..=hi + 2).step_by(2) {
        let keep0: Vec<usize> = (0..n).filter(|k| q0[*k] >= q).collect();
        let rows: Vec<usize> = (0..d_out.nrows()).collect();
        let sub_kernel = integer_kernel(&d_out.submatrix(&rows, &keep0));
        let mut gens = Vec::new();
        for z in &sub_kernel {
            let mut full = vec![BigInt::zero(); n];
            for (k, v) in z.iter().enumerate() {
                full[keep0[k]] = v.clone();
            }
            gens.push(coords(&full)?);
        }
        gens.extend(boundaries.iter().cloned());
        let factors = cokernel_factors(r, &gens);
        let cyclic = factors.is_empty() || (factors.len() == 1 && divides(&factors[0], m));
        let plus_free = factors.len() <= 1 || (factors.len() == 2 && divides(&factors[0], m));
        out.push((q, cyclic, plus_free));
    }
    Ok(out)
}

/// The integral s-invariants of a knot for `m >= 1`.
pub fn s_integral(d: &PlanarDiagram, m: u64) -> Result<IntegralS> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    require_knot(d)?;
    let cube = Cube::new(d)?;
    let model = bar_natan_window(&cube, -2, false);
    let levels = integral_levels(&model, m)?;
    let s_min = levels.iter().rev().find(|l| l.1).map(|l| l.0);
    let s_max = levels.iter().rev().find(|l| l.2).map(|l| l.0);
    match (s_min, s_max) {
        (Some(a), Some(b)) => Ok(IntegralS { m, s_min_plus_one: a + 1, s_max_minus_one: b - 1 }),
        _ => Err(Error::Precondition("empty filtration scan".into())),
    }
}

/// One block `Kh^{i,j} -> Kh^{i+n,j}` of an operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationBlock {
    pub i: i32,
    pub j: i32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, u32)>,
}

/// A cohomology operation given by matrices in canonical homology bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationMatrix {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub degree: u32,
    pub field: Coefficients,
    pub basis_fingerprint: String,
    pub blocks: Vec<OperationBlock>,
}

fn default_schema() -> u32 {
    SCHEMA
}

impl OperationMatrix {
    pub fn zero(degree: u32, field: Coefficients, basis_fingerprint: String) -> Self {
        OperationMatrix { schema: SCHEMA, degree, field, basis_fingerprint, blocks: vec![] }
    }

    pub fn block(&self, i: i32, j: i32) -> Option<&OperationBlock> {
        self.blocks.iter().find(|b| b.i == i && b.j == j)
    }

    /// The block leaving `(i, j)` as a matrix over `f`.
    pub fn block_matrix<F: Field>(&self, f: &F, i: i32, j: i32) -> Option<SparseMatrix<F>> {
        self.block(i, j).map(|b| block_matrix(f, b))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.entries.is_empty())
    }

    /// Rank of the block leaving `(i, j)` over the operation's field.
    pub fn block_rank(&self, i: i32, j: i32) -> Result<usize> {
        let Some(b) = self.block(i, j) else { return Ok(0) };
        Ok(crate::with_field!(self.field, |f| block_matrix(&f, b).rank()))
    }

    /// `other ∘ self`, with both in the same bases.
    pub fn then(&self, other: &OperationMatrix) -> Result<OperationMatrix> {
        if self.field != other.field || self.basis_fingerprint != other.basis_fingerprint {
            return Err(Error::DimensionMismatch("operations over different bases".into()));
        }
        let n = self.degree as i32;
        let mut blocks = Vec::new();
        for a in &self.blocks {
            let Some(b) = other.block(a.i + n, a.j) else { continue };
            if b.cols != a.rows {
                return Err(Error::DimensionMismatch(format!("blocks at ({}, {}) do not compose", a.i, a.j)));
            }
            let entries = crate::with_field!(self.field, |f| {
                block_matrix(&f, b)
                    .mul(&block_matrix(&f, a))?
                    .triplets()
                    .into_iter()
                    .map(|(r, c, v)| (r, c, f.to_i64(&v).expect("residue") as u32))
                    .collect::<Vec<_>>()
            });
            blocks.push(OperationBlock { i: a.i, j: a.j, rows: b.rows, cols: a.cols, entries });
        }
        Ok(OperationMatrix {
            schema: SCHEMA,
            degree: self.degree + other.degree,
            field: self.field,
            basis_fingerprint: self.basis_fingerprint.clone(),
            blocks,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("operation file: {e}")))
    }
}

fn block_matrix<F: Field>(f: &F, b: &OperationBlock) -> SparseMatrix<F> {
    let triplets = b.entries.iter().map(|(r, c, v)| (*r, *c, f.from_i64(*v as i64))).collect();
    SparseMatrix::from_triplets(f.clone(), b.rows, b.cols, triplets).expect("validated block")
}

/// Canonical cocycle representatives of one Khovanov group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisBlock {
    pub i: i32,
    pub j: i32,
    /// Number of generators of `C^{i,j}`.
    pub generators: usize,
    /// Each representative as `(generator position, residue)` pairs.
    pub representatives: Vec<Vec<(usize, u32)>>,
}

/// The canonical homology basis of a diagram over a finite field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisManifest {
    pub schema: u32,
    pub pd: String,
    pub field: Coefficients,
    pub fingerprint: String,
    pub blocks: Vec<BasisBlock>,
}

impl BasisManifest {
    pub fn dimension(&self, i: i32, j: i32) -> usize {
        self.blocks.iter().find(|b| b.i == i && b.j == j).map_or(0, |b| b.representatives.len())
    }
}

fn finite_field(coeffs: Coefficients) -> Result<Coefficients> {
    match coeffs.normalized()? {
        c @ (Coefficients::F2 | Coefficients::Fp(_)) => Ok(c),
        c => Err(Error::InvalidField(format!("basis manifests need a finite field, not {c}"))),
    }
}

/// Exports the canonical homology basis with its fingerprint.
pub fn export_basis(d: &PlanarDiagram, coeffs: Coefficients) -> Result<BasisManifest> {
    let field = finite_field(coeffs)?;
    let cube = Cube::new(d)?;
    Ok(crate::with_field!(field, |f| manifest_of(d, field, &f, &canonical_bases(&f, &cube))))
}

fn manifest_of<F: Field>(d: &PlanarDiagram, field: Coefficients, f: &F, bases: &[CanonicalBlock<F>]) -> BasisManifest {
    let mut blocks: Vec<BasisBlock> = bases
        .iter()
        .map(|b| BasisBlock {
            i: b.i,
            j: b.j,
            generators: b.states.len(),
            representatives: b
                .basis
                .representatives()
                .iter()
                .map(|r| r.entries().iter().map(|(k, v)| (*k, f.to_i64(v).expect("residue") as u32)).collect())
                .collect(),
        })
        .collect();
    blocks.sort_by_key(|b| (b.j, b.i));
    let mut manifest = BasisManifest { schema: SCHEMA, pd: d.to_pd_string(), field, fingerprint: String::new(), blocks };
    let digest = Sha256::digest(serde_json::to_vec(&manifest).expect("manifest serializes"));
    manifest.fingerprint = hex::encode(digest);
    manifest
}

/// Reads an operation file and checks it against the diagram's basis.
pub fn load_operation(path: &Path, d: &PlanarDiagram, coeffs: Coefficients) -> Result<OperationMatrix> {
    let text = std::fs::read_to_string(path)?;
    let op = OperationMatrix::from_json(&text)?;
    validate_operation(&op, &export_basis(d, coeffs)?)?;
    Ok(op)
}

/// Checks fingerprint, field and block dimensions against a manifest.
pub fn validate_operation(op: &OperationMatrix, manifest: &BasisManifest) -> Result<()> {
    if op.field.normalized()? != manifest.field {
        return Err(Error::InvalidField(format!("operation over {} used with a basis over {}", op.field, manifest.field)));
    }
    if op.basis_fingerprint != manifest.fingerprint {
        return Err(Error::FingerprintMismatch { expected: manifest.fingerprint.clone(), found: op.basis_fingerprint.clone() });
    }
    if op.degree == 0 {
        return Err(Error::DimensionMismatch("operations must have positive degree".into()));
    }
    let p = manifest.field.characteristic();
    for b in &op.blocks {
        let (rows, cols) = (manifest.dimension(b.i + op.degree as i32, b.j), manifest.dimension(b.i, b.j));
        if (b.rows, b.cols) != (rows, cols) {
            return Err(Error::DimensionMismatch(format!(
                "block at ({}, {}) is {}x{} but the homology groups give {}x{}",
                b.i, b.j, b.rows, b.cols, rows, cols
            )));
        }
        if let Some((r, c, v)) = b.entries.iter().find(|(r, c, v)| *r >= rows || *c >= cols || *v >= p) {
            return Err(Error::DimensionMismatch(format!("entry ({r}, {c}, {v}) of block ({}, {}) is out of range", b.i, b.j)));
        }
    }
    Ok(())
}

/// The Bockstein `Sq^1` on Khovanov homology with coefficients in F2, in
/// the canonical basis: lift a cocycle to the integers, apply the
/// differential, halve and reduce.
pub fn bockstein_sq1(d: &PlanarDiagram) -> Result<OperationMatrix> {
    let cube = Cube::new(d)?;
    let bases = canonical_bases(&F2, &cube);
    let manifest = manifest_of(d, Coefficients::F2, &F2, &bases);
    let mut by_j: BTreeMap<i32, Vec<_>> = BTreeMap::new();
    for b in bases {
        by_j.entry(b.j).or_default().push(b);
    }
    let mut blocks = Vec::new();
    for slice in by_j.values() {
        for src in slice {
            let Some(dst) = slice.iter().find(|b| b.i == src.i + 1) else { continue };
            let mut entries = Vec::new();
            for (c, rep) in src.basis.representatives().iter().enumerate() {
                let lift = SparseVec::from_pairs(&Integers, rep.entries().iter().map(|(k, _)| (*k, 1i64)).collect());
                let image = src.outgoing.mul_vec(&lift)?;
                let halved = image.entries().iter().map(|(k, v)| {
                    debug_assert_eq!(v % 2, 0, "mod 2 cocycle");
                    (*k, (v / 2).rem_euclid(2) as u8)
                });
                let z = SparseVec::from_pairs(&F2, halved.collect());
                let classes = dst.basis.classes(&z).ok_or_else(|| Error::Precondition("Bockstein image is not a cocycle".into()))?;
                entries.extend(classes.iter().enumerate().filter(|(_, v)| **v == 1).map(|(r, _)| (r, c, 1u32)));
            }
            blocks.push(OperationBlock { i: src.i, j: src.j, rows: dst.basis.dim(), cols: src.basis.dim(), entries });
        }
    }
    blocks.sort_by_key(|b| (b.j, b.i));
    Ok(OperationMatrix { schema: SCHEMA, degree: 1, field: Coefficients::F2, basis_fingerprint: manifest.fingerprint, blocks })
}

/// Which operation the refined invariants use.
#[derive(Clone, Debug)]
pub enum Operation {
    Zero,
    Sq1,
    Imported(OperationMatrix),
}

impl Operation {
    pub fn degree(&self) -> u32 {
        match self {
            Operation::Zero | Operation::Sq1 => 1,
            Operation::Imported(op) => op.degree,
        }
    }
}

/// Images of an operation in `Kh^{0,q}`, as cocycles in the reduced model.
#[derive(Clone, Debug)]
pub struct OperationImage<F: Field> {
    per_level: BTreeMap<i32, Vec<SparseVec<F::Elem>>>,
}

impl<F: Field> OperationImage<F> {
    pub fn zero() -> Self {
        OperationImage { per_level: BTreeMap::new() }
    }

    pub fn at(&self, q: i32) -> &[SparseVec<F::Elem>] {
        self.per_level.get(&q).map_or(&[], |v| v.as_slice())
    }
}

/// `Sq^1: Kh^{-1,q} -> Kh^{0,q}` on the associated graded of a reduced
/// Bar-Natan model.
pub fn sq1_image(model: &ReducedComplex, fm: &FiltrationMaps<F2>) -> OperationImage<F2> {
    let gr_in = model.graded_differential(-1);
    let qm = model.group(-1).map(|g| g.q.clone()).unwrap_or_default();
    let q0 = model.group(0).map(|g| g.q.clone()).unwrap_or_default();
    let mut per_level = BTreeMap::new();
    for level in fm.levels() {
        let q = level.q;
        let cols: Vec<usize> = (0..qm.len()).filter(|k| qm[*k] == q).collect();
        let block = gr_in.submatrix(&level.slice, &cols);
        let cocycles = block.map_ring(F2, |v| F2.from_i64(*v)).kernel();
        let mut images = Vec::new();
        for z in cocycles.basis() {
            let lift = SparseVec::from_pairs(&Integers, z.entries().iter().map(|(k, _)| (*k, 1i64)).collect());
            let dz = block.mul_vec(&lift).expect("dimensions agree");
            let halved: Vec<(usize, u8)> = dz.entries().iter().map(|(k, v)| (*k, (v / 2).rem_euclid(2) as u8)).collect();
            images.push(SparseVec::from_pairs(&F2, halved));
        }
        debug_assert!(level.slice.iter().all(|p| q0[*p] == q));
        per_level.insert(q, images);
    }
    OperationImage { per_level }
}

/// Carries an imported operation's image in `Kh^{0,q}` into a reduced model
/// built with replay data.
fn imported_image<F: Field>(
    field: &F,
    op: &OperationMatrix,
    cube: &Cube,
    model: &ReducedComplex,
    fm: &FiltrationMaps<F>,
) -> Result<OperationImage<F>> {
    let n = op.degree as i32;
    let g0 = model.group_index(0).ok_or_else(|| Error::Precondition("reduced complex has no degree 0".into()))?;
    let mut per_level = BTreeMap::new();
    for level in fm.levels() {
        let q = level.q;
        let Some(block) = op.block(-n, q) else { continue };
        if block.entries.is_empty() {
            continue;
        }
        let bases = canonical_slice(field, cube, q);
        let target = bases
            .iter()
            .find(|b| b.i == 0)
            .ok_or_else(|| Error::DimensionMismatch(format!("operation block into (0, {q}) but that group vanishes")))?;
        // each canonical representative of Kh^{0,q}, carried into the model
        let carried: Vec<SparseVec<F::Elem>> = target
            .basis
            .representatives()
            .iter()
            .map(|r| {
                let cochain: Vec<(u32, i64)> = r
                    .entries()
                    .iter()
                    .map(|(k, v)| {
                        let idx = model.input_index(&target.states[*k]).expect("state inside the window");
                        (idx, field.to_i64(v).expect("field residue"))
                    })
                    .collect();
                let projected: Vec<(usize, i64)> =
                    model.project(&cochain).into_iter().filter(|(g, _, _)| *g == g0).map(|(_, p, v)| (p, v)).collect();
                slice_vector(field, &projected, &level.slice)
            })
            .collect();
        let mut images = vec![SparseVec::new(); block.cols];
        for (r, c, v) in &block.entries {
            images[*c] = images[*c].axpy(field, &field.from_i64(*v as i64), &carried[*r]);
        }
        per_level.insert(q, images);
    }
    Ok(OperationImage { per_level })
}

/// An element certifying (half-)fullness: a cocycle of `F_q` in degree 0 of
/// the reduced model, with its classes in `H_0(C)` and `Kh^{0,q}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessElement {
    pub cocycle: Vec<(EnhancedState, String)>,
    pub total_class: Vec<String>,
    pub graded_class: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fullness {
    pub q: i32,
    pub half_full: bool,
    pub full: bool,
    pub witnesses: Vec<WitnessElement>,
}

/// Decides whether `q` is half-full and full: the elements of `H_0(F_q)`
/// whose projection lies in the image of the operation are computed as a
/// preimage, and their images in `H_0(C)` are ranked.
pub fn fullness<F: Field>(fm: &FiltrationMaps<F>, image: &OperationImage<F>, q: i32) -> Result<Fullness> {
    if q.rem_euclid(2) != 1 {
        return Err(Error::Precondition(format!("filtration level {q} is even")));
    }
    let f = fm.field().clone();
    let total = fm.total_dim();
    let Some(level) = fm.level(q) else {
        let below = q < fm.q_range().0;
        return Ok(Fullness { q, half_full: below && total > 0, full: below, witnesses: vec![] });
    };
    let classes: Vec<SparseVec<F::Elem>> = image
        .at(q)
        .iter()
        .map(|v| SparseVec::from_dense(&f, &level.kh.classes(v).expect("operation image is a cocycle")))
        .collect();
    let a = Subspace::from_spanning(f.clone(), level.kh.dim(), classes);
    let v = level.projection.preimage(&a)?;
    // greedily pick elements with independent images in H_0(C)
    let mut chosen = Vec::new();
    let mut span = Subspace::zero(f.clone(), total);
    for x in v.basis() {
        let img = level.inclusion.mul_vec(x)?;
        if !span.contains(&img) {
            span = span.sum(&Subspace::from_spanning(f.clone(), total, vec![img.clone()]));
            chosen.push((x.clone(), img));
        }
    }
    let rank = span.dim();
    let witnesses = chosen
        .iter()
        .map(|(x, img)| {
            let coords = x.to_dense(&f, level.sub.dim());
            let cocycle = level.sub.lift(&coords);
            let graded = level.projection.mul_vec(x).expect("dimensions agree").to_dense(&f, level.kh.dim());
            WitnessElement {
                cocycle: cocycle.entries().iter().map(|(k, c)| (fm.degree0_states()[*k], f.render(c))).collect(),
                total_class: img.to_dense(&f, total).iter().map(|c| f.render(c)).collect(),
                graded_class: graded.iter().map(|c| f.render(c)).collect(),
            }
        })
        .collect();
    Ok(Fullness { q, half_full: rank >= 1, full: rank == total && total > 0, witnesses })
}

/// Fullness at every level of the scan range and the one below it, top to
/// bottom.
pub fn fullness_profile<F: Field>(fm: &FiltrationMaps<F>, image: &OperationImage<F>) -> Result<Vec<Fullness>> {
    let (lo, hi) = fm.q_range();
    (lo - 2..=hi).rev().step_by(2).map(|q| fullness(fm, image, q)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSided {
    pub r: i32,
    pub s: i32,
    pub half_full_witness: Fullness,
    pub full_witness: Fullness,
}

/// `r_+` and `s_+` of a knot over a field for an operation.
pub fn plus_invariants(d: &PlanarDiagram, coeffs: Coefficients, op: &Operation) -> Result<(SInvariant, OneSided)> {
    let (s, profile) = operation_profile(d, coeffs, op)?;
    let half = profile.iter().find(|x| x.half_full).cloned();
    let full = profile.iter().find(|x| x.full).cloned();
    match (half, full) {
        (Some(h), Some(fu)) => Ok((s, OneSided { r: h.q + 1, s: fu.q + 3, half_full_witness: h, full_witness: fu })),
        _ => Err(Error::Precondition("empty filtration scan".into())),
    }
}

/// Whether `q` is half-full and full for the operation.
pub fn fullness_at(d: &PlanarDiagram, coeffs: Coefficients, op: &Operation, q: i32) -> Result<Fullness> {
    if q.rem_euclid(2) != 1 {
        return Err(Error::Precondition(format!("filtration level {q} is even")));
    }
    let (_, profile) = operation_profile(d, coeffs, op)?;
    let lowest = profile.last().map_or(i32::MAX, |f| f.q);
    if let Some(f) = profile.into_iter().find(|f| f.q == q) {
        return Ok(f);
    }
    // outside the scan every level below is full and every level above is empty
    let below = q < lowest;
    Ok(Fullness { q, half_full: below, full: below, witnesses: vec![] })
}

/// The s-invariant and the fullness of every level that can matter, top to
/// bottom.
pub fn operation_profile(d: &PlanarDiagram, coeffs: Coefficients, op: &Operation) -> Result<(SInvariant, Vec<Fullness>)> {
    require_knot(d)?;
    let cube = Cube::new(d)?;
    let n = op.degree() as i32;
    let imported = matches!(op, Operation::Imported(_));
    let model = bar_natan_window(&cube, -n - 1, imported);
    crate::with_field!(coeffs, |f| {
        let fm = FiltrationMaps::new(f.clone(), &model)?;
        let s = s_from_maps(&fm)?;
        let image = match op {
            Operation::Zero => OperationImage::zero(),
            Operation::Sq1 => {
                if coeffs.normalized()? != Coefficients::F2 {
                    return Err(Error::InvalidField("the Bockstein is computed over f2".into()));
                }
                let fm2 = FiltrationMaps::new(F2, &model)?;
                let img = sq1_image(&model, &fm2);
                convert_image(&f, img)
            }
            Operation::Imported(m) => {
                if m.field.normalized()? != coeffs.normalized()? {
                    return Err(Error::InvalidField(format!("operation over {} used over {}", m.field, coeffs)));
                }
                validate_operation(m, &export_basis(d, coeffs)?)?;
                imported_image(&f, m, &cube, &model, &fm)?
            }
        };
        Ok((s, fullness_profile(&fm, &image)?))
    })
}

fn convert_image<F: Field>(f: &F, img: OperationImage<F2>) -> OperationImage<F> {
    let per_level = img
        .per_level
        .into_iter()
        .map(|(q, vs)| (q, vs.into_iter().map(|v| SparseVec::from_pairs(f, v.entries().iter().map(|(k, _)| (*k, f.one())).collect())).collect()))
        .collect();
    OperationImage { per_level }
}

/// All invariants of a knot for one field and operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedInvariants {
    pub s_min: i32,
    pub s_max: i32,
    pub s: i32,
    pub r_plus: i32,
    pub s_plus: i32,
    pub r_minus: i32,
    pub s_minus: i32,
    pub witnesses: BTreeMap<String, Fullness>,
}

/// `r_±` and `s_±`; the minus side is computed on the mirror, which needs
/// its own operation for imported data.
pub fn refined_invariants(d: &PlanarDiagram, coeffs: Coefficients, op: &Operation, mirror_op: Option<&Operation>) -> Result<RefinedInvariants> {
    let mirror = d.mirror();
    let mirror_op = match (op, mirror_op) {
        (_, Some(m)) => m.clone(),
        (Operation::Imported(_), None) => {
            return Err(Error::Precondition("an imported operation needs a mirror operation file".into()))
        }
        (other, None) => other.clone(),
    };
    let (s, plus) = plus_invariants(d, coeffs, op)?;
    let (_, minus) = plus_invariants(&mirror, coeffs, &mirror_op)?;
    let mut witnesses = BTreeMap::new();
    witnesses.insert("half_full".to_string(), plus.half_full_witness);
    witnesses.insert("full".to_string(), plus.full_witness);
    witnesses.insert("mirror_half_full".to_string(), minus.half_full_witness);
    witnesses.insert("mirror_full".to_string(), minus.full_witness);
    Ok(RefinedInvariants {
        s_min: s.s_min,
        s_max: s.s_max,
        s: s.s,
        r_plus: plus.r,
        s_plus: plus.s,
        r_minus: -minus.r,
        s_minus: -minus.s,
        witnesses,
    })
}
