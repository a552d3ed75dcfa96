//! Normal surfaces given by their coordinates.
//!
//! Each tetrahedron carries seven counts: the triangle cutting off vertex `v`
//! at index `v`, and at index `4 + q` the quadrilateral separating `{0, q+1}`
//! from the other two vertices. Everything here works on sparse vectors over
//! any [`TetComplex`], so surfaces in large lazy complexes only cost time in
//! the tetrahedra they meet.
//!
//! Intersection points with the 1-skeleton are numbered `1..=W` edge class by
//! edge class, and the normal arcs in each face become interval pairings
//! between those numbers. Components of the surface are then orbits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use knotgenus_core::{count_orbits, run, Interval, Pairing, PairingSystem, RunOptions, WeightList, WeightVec};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Result, TopoError};
use crate::subdivision::BoundarySurface;
use crate::triangulation::{edge_index, walk_edge, TetComplex, Triangulation, EDGES};

pub const DISK_TYPES: usize = 7;

/// Vectors with more coordinates than this serialize sparsely.
const DENSE_JSON_LIMIT: usize = 100_000;

/// The quadrilateral type separating `{a, b}` from the other two vertices.
pub fn quad_of(a: u8, b: u8) -> usize {
    let other = if a == 0 {
        b
    } else if b == 0 {
        a
    } else {
        6 - a - b
    };
    other as usize - 1
}

/// Vertices of face `f` other than `c`, in increasing order.
fn others(f: u8, c: u8) -> (u8, u8) {
    let mut it = (0..4u8).filter(|&v| v != f && v != c);
    (it.next().unwrap(), it.next().unwrap())
}

/// The edge each disk type puts its unit weight on: the least local edge it
/// meets.
const FIXED_EDGE: [(u8, u8); DISK_TYPES] = [(0, 1), (0, 1), (0, 2), (0, 3), (0, 2), (0, 1), (0, 1)];

/// Coordinates of one tetrahedron.
pub type TetCoords = [BigUint; DISK_TYPES];

/// Normal arcs of `d` cutting off corner `c` of face `f`.
pub fn arcs(d: &TetCoords, f: u8, c: u8) -> BigUint {
    &d[c as usize] + &d[4 + quad_of(c, f)]
}

/// Points of `d` on local edge `(a, b)`.
pub fn edge_weight(d: &TetCoords, a: u8, b: u8) -> BigUint {
    let skip = quad_of(a, b);
    let mut w = &d[a as usize] + &d[b as usize];
    for q in (0..3).filter(|&q| q != skip) {
        w += &d[4 + q];
    }
    w
}

fn zero_coords() -> TetCoords {
    std::array::from_fn(|_| BigUint::zero())
}

/// A vector of `7t` nonnegative integers, stored by tetrahedron with all-zero
/// tetrahedra omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalVector {
    t: usize,
    coords: BTreeMap<usize, TetCoords>,
}

impl NormalVector {
    pub fn zero(t: usize) -> Self {
        NormalVector { t, coords: BTreeMap::new() }
    }

    pub fn from_dense(values: Vec<BigUint>) -> Result<Self> {
        if !values.len().is_multiple_of(DISK_TYPES) {
            return Err(TopoError::Input(format!("{} coordinates is not a multiple of 7", values.len())));
        }
        let t = values.len() / DISK_TYPES;
        let mut v = NormalVector::zero(t);
        let mut it = values.into_iter();
        for x in 0..t {
            let d: TetCoords = std::array::from_fn(|_| it.next().unwrap());
            v.set_tet(x, d);
        }
        Ok(v)
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::from_dense(values.iter().map(|&x| BigUint::from(x)).collect())
    }

    /// Builds from per-tetrahedron coordinates; repeated tetrahedra add up.
    pub fn from_tets(t: usize, entries: impl IntoIterator<Item = (usize, TetCoords)>) -> Result<Self> {
        let mut v = NormalVector::zero(t);
        for (x, d) in entries {
            if x >= t {
                return Err(TopoError::Input(format!("tetrahedron {x} out of range for t = {t}")));
            }
            let mut cur = v.coords.remove(&x).unwrap_or_else(zero_coords);
            for i in 0..DISK_TYPES {
                cur[i] += &d[i];
            }
            v.set_tet(x, cur);
        }
        Ok(v)
    }

    pub fn num_tets(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.t * DISK_TYPES
    }

    pub fn is_empty(&self) -> bool {
        self.t == 0
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn set_tet(&mut self, x: usize, d: TetCoords) {
        if d.iter().all(|c| c.is_zero()) {
            self.coords.remove(&x);
        } else {
            self.coords.insert(x, d);
        }
    }

    pub fn tet(&self, x: usize) -> Option<&TetCoords> {
        self.coords.get(&x)
    }

    /// Coordinate `i` of the flat `7t` vector.
    pub fn get(&self, i: usize) -> BigUint {
        self.coords.get(&(i / DISK_TYPES)).map_or_else(BigUint::zero, |d| d[i % DISK_TYPES].clone())
    }

    /// Tetrahedra with a nonzero coordinate, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &TetCoords)> {
        self.coords.iter().map(|(x, d)| (*x, d))
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn to_dense(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); self.len()];
        for (x, d) in &self.coords {
            for i in 0..DISK_TYPES {
                out[x * DISK_TYPES + i] = d[i].clone();
            }
        }
        out
    }

    pub fn scaled(&self, k: &BigUint) -> NormalVector {
        if k.is_zero() {
            return NormalVector::zero(self.t);
        }
        let coords = self.coords.iter().map(|(x, d)| (*x, std::array::from_fn(|i| &d[i] * k))).collect();
        NormalVector { t: self.t, coords }
    }

    pub fn add(&self, other: &NormalVector) -> Result<NormalVector> {
        if self.t != other.t {
            return Err(TopoError::Input(format!("adding vectors over {} and {} tetrahedra", self.t, other.t)));
        }
        NormalVector::from_tets(self.t, self.iter().chain(other.iter()).map(|(x, d)| (x, d.clone())))
    }

    /// Sum of all coordinates, the number of elementary disks.
    pub fn disk_count(&self) -> BigUint {
        self.coords.values().flat_map(|d| d.iter()).sum()
    }

    pub fn max_coordinate(&self) -> BigUint {
        self.coords.values().flat_map(|d| d.iter()).max().cloned().unwrap_or_default()
    }

    /// `{"t": t, "coords": [...]}` with `7t` decimal strings, or, for long
    /// vectors, `{"t": t, "sparse": [[tet, [7 decimal strings]], ...]}`.
    pub fn to_json_value(&self) -> Value {
        let strings = |d: &TetCoords| d.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>();
        if self.len() <= DENSE_JSON_LIMIT {
            let coords: Vec<Value> = self.to_dense().iter().map(|c| Value::String(c.to_string())).collect();
            serde_json::json!({ "t": self.t, "coords": coords })
        } else {
            let sparse: Vec<Value> = self.coords.iter().map(|(x, d)| serde_json::json!([x, strings(d)])).collect();
            serde_json::json!({ "t": self.t, "sparse": sparse })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("vector serializes")
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            t: usize,
            coords: Option<Vec<NumText>>,
            sparse: Option<Vec<(usize, Vec<NumText>)>>,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        match (raw.coords, raw.sparse) {
            (Some(c), None) => {
                if c.len() != raw.t * DISK_TYPES {
                    return Err(TopoError::Input(format!("expected {} coordinates for t = {}, found {}", raw.t * DISK_TYPES, raw.t, c.len())));
                }
                Self::from_dense(c.into_iter().map(|x| x.parse()).collect::<Result<_>>()?)
            }
            (None, Some(s)) => {
                let mut entries = Vec::with_capacity(s.len());
                for (x, d) in s {
                    if d.len() != DISK_TYPES {
                        return Err(TopoError::Input(format!("tetrahedron {x} has {} coordinates", d.len())));
                    }
                    let vals = d.into_iter().map(|c| c.parse()).collect::<Result<Vec<_>>>()?;
                    entries.push((x, <TetCoords>::try_from(vals).unwrap()));
                }
                Self::from_tets(raw.t, entries)
            }
            _ => Err(TopoError::Input("a normal vector needs exactly one of \"coords\" and \"sparse\"".into())),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

/// A JSON integer given as a decimal string or a plain number.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumText {
    Text(String),
    Num(u64),
}

impl NumText {
    fn parse(self) -> Result<BigUint> {
        match self {
            NumText::Num(n) => Ok(BigUint::from(n)),
            NumText::Text(s) => s.trim().parse().map_err(|_| TopoError::Input(format!("not a nonnegative integer: {s:?}"))),
        }
    }
}

/// Matching equations of an explicit triangulation, three per interior face:
/// `v[a] + v[b] = v[c] + v[d]` for `[a, b, c, d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingSystem {
    pub equations: Vec<[usize; 4]>,
}

impl MatchingSystem {
    /// Index of the first equation `v` violates.
    pub fn first_violation(&self, v: &NormalVector) -> Option<usize> {
        self.equations.iter().position(|e| v.get(e[0]) + v.get(e[1]) != v.get(e[2]) + v.get(e[3]))
    }
}

pub fn matching_system(t: &Triangulation) -> MatchingSystem {
    let mut equations = Vec::new();
    for x in 0..t.num_tets() {
        for f in 0..4u8 {
            let Some(g) = t.gluing(x, f) else { continue };
            if (g.tet, g.face) < (x, f) {
                continue;
            }
            for c in (0..4u8).filter(|&c| c != f) {
                let gc = g.perm.apply(c);
                equations.push([
                    x * DISK_TYPES + c as usize,
                    x * DISK_TYPES + 4 + quad_of(c, f),
                    g.tet * DISK_TYPES + gc as usize,
                    g.tet * DISK_TYPES + 4 + quad_of(gc, g.face),
                ]);
            }
        }
    }
    MatchingSystem { equations }
}

/// The first constraint an inadmissible vector breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two quadrilateral types are present in one tetrahedron.
    Quadrilaterals { tet: usize, first: usize, second: usize },
    /// The arcs cutting off a corner differ on the two sides of a face.
    Matching { tet: usize, face: u8, corner: u8, here: BigUint, there: BigUint },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Quadrilaterals { tet, first, second } => {
                write!(f, "quadrilateral condition: tetrahedron {tet} has quadrilateral types {first} and {second}")
            }
            Violation::Matching { tet, face, corner, here, there } => write!(
                f,
                "matching condition: tetrahedron {tet} face {face} has {here} arcs at corner {corner} but the glued side has {there}"
            ),
        }
    }
}

fn check_length<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<()> {
    if v.num_tets() != c.num_tets() {
        return Err(TopoError::Input(format!(
            "vector has {} coordinates but the triangulation has {} tetrahedra",
            v.len(),
            c.num_tets()
        )));
    }
    Ok(())
}

/// Quadrilateral and matching conditions; positivity holds by type. Only
/// tetrahedra in the support and their neighbours are examined.
pub fn check_admissible<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<Option<Violation>> {
    check_length(c, v)?;
    for (x, d) in v.iter() {
        let quads: Vec<usize> = (0..3).filter(|&q| !d[4 + q].is_zero()).collect();
        if quads.len() > 1 {
            return Ok(Some(Violation::Quadrilaterals { tet: x, first: quads[0], second: quads[1] }));
        }
    }
    let zero = zero_coords();
    for (x, d) in v.iter() {
        for f in 0..4u8 {
            let Some(g) = c.gluing(x, f) else { continue };
            let other = v.tet(g.tet).unwrap_or(&zero);
            for corner in (0..4u8).filter(|&k| k != f) {
                let here = arcs(d, f, corner);
                let there = arcs(other, g.face, g.perm.apply(corner));
                if here != there {
                    return Ok(Some(Violation::Matching { tet: x, face: f, corner, here, there }));
                }
            }
        }
    }
    Ok(None)
}

fn require_admissible<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<()> {
    match check_admissible(c, v)? {
        None => Ok(()),
        Some(why) => Err(TopoError::Input(format!("vector is not admissible: {why}"))),
    }
}

/// One edge class met by the surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedEdge {
    /// Smallest `tet * 6 + local edge` over the class.
    pub code: u64,
    pub weight: BigUint,
    /// Points on this edge are numbered `offset + 1 ..= offset + weight`
    /// from the tail of the class.
    pub offset: BigInt,
    pub boundary: bool,
}

/// Numbering of the intersection points with the 1-skeleton.
#[derive(Clone, Debug)]
pub struct EdgeIndexing {
    pub edges: Vec<IndexedEdge>,
    pub total: BigInt,
    /// `(tet, local edge)` → (position in `edges`, local vertex at the tail).
    occurrences: HashMap<(usize, u8), (usize, u8)>,
}

impl EdgeIndexing {
    /// Walks every edge with points on it. `v` must satisfy the matching
    /// conditions, so that all occurrences of a class agree on the weight.
    pub fn new<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<Self> {
        let mut found: Vec<IndexedEdge> = Vec::new();
        let mut occurrences = HashMap::new();
        for (x, d) in v.iter() {
            for &(a, b) in &EDGES {
                let e = edge_index(a, b);
                if occurrences.contains_key(&(x, e)) {
                    continue;
                }
                let w = edge_weight(d, a, b);
                if w.is_zero() {
                    continue;
                }
                let walk = walk_edge(c, x, a, b);
                if walk.degenerate {
                    return Err(TopoError::Precondition(format!("edge {a}{b} of tetrahedron {x} is identified with itself reversed")));
                }
                let fwd = walk.forward();
                for &(y, p, q) in &walk.occurrences {
                    occurrences.insert((y, edge_index(p, q)), (found.len(), if fwd { p } else { q }));
                }
                found.push(IndexedEdge { code: walk.code(), weight: w, offset: BigInt::zero(), boundary: walk.is_boundary() });
            }
        }
        let mut order: Vec<usize> = (0..found.len()).collect();
        order.sort_by_key(|&i| found[i].code);
        let mut rank = vec![0; found.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut edges: Vec<IndexedEdge> = order.iter().map(|&i| found[i].clone()).collect();
        let mut total = BigInt::zero();
        for e in &mut edges {
            e.offset = total.clone();
            total += BigInt::from(e.weight.clone());
        }
        for slot in occurrences.values_mut() {
            slot.0 = rank[slot.0];
        }
        Ok(EdgeIndexing { edges, total, occurrences })
    }

    /// The indexing of `k` times the vector.
    pub fn scaled(&self, k: &BigUint) -> Self {
        let mut total = BigInt::zero();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let weight = &e.weight * k;
                let offset = total.clone();
                total += BigInt::from(weight.clone());
                IndexedEdge { weight, offset, ..e.clone() }
            })
            .collect();
        EdgeIndexing { edges, total, occurrences: self.occurrences.clone() }
    }

    pub fn edge_at(&self, tet: usize, a: u8, b: u8) -> Option<&IndexedEdge> {
        self.occurrences.get(&(tet, edge_index(a, b))).map(|&(i, _)| &self.edges[i])
    }

    /// Label of the `j`th point from `a` on local edge `(a, b)`, and whether
    /// labels grow away from `a`.
    fn label(&self, tet: usize, a: u8, b: u8, j: &BigUint) -> (BigInt, bool) {
        let (i, tail) = self.occurrences[&(tet, edge_index(a, b))];
        let e = &self.edges[i];
        if tail == a {
            (&e.offset + BigInt::from(j.clone()), true)
        } else {
            (&e.offset + BigInt::from(&e.weight + 1u32) - BigInt::from(j.clone()), false)
        }
    }

    /// The labels `1..=r` from `a` on `(a, b)` as an interval.
    fn run_from(&self, tet: usize, a: u8, b: u8, r: &BigUint) -> (Interval, bool) {
        let (first, up) = self.label(tet, a, b, &BigUint::one());
        let (last, _) = self.label(tet, a, b, r);
        let iv = if up { Interval::new(first, last) } else { Interval::new(last, first) };
        (iv.expect("labels are positive"), up)
    }
}

/// Pairings of the arcs cutting off `corner` in face `f` of `tet`.
fn arc_pairing(ix: &EdgeIndexing, tet: usize, f: u8, corner: u8, r: &BigUint) -> Pairing {
    let (u1, u2) = others(f, corner);
    let (dom, up1) = ix.run_from(tet, corner, u1, r);
    let (ran, up2) = ix.run_from(tet, corner, u2, r);
    Pairing::new(dom, ran, up1 != up2).expect("equal widths")
}

/// Faces of the support, each glued pair once.
fn support_faces<'a, C: TetComplex + ?Sized>(c: &'a C, v: &'a NormalVector) -> impl Iterator<Item = (usize, u8, &'a TetCoords)> + 'a {
    v.iter().flat_map(move |(x, d)| {
        (0..4u8).filter_map(move |f| match c.gluing(x, f) {
            Some(g) if (g.tet, g.face) < (x, f) && v.tet(g.tet).is_some() => None,
            _ => Some((x, f, d)),
        })
    })
}

fn pairings_of<C: TetComplex + ?Sized>(c: &C, v: &NormalVector, ix: &EdgeIndexing) -> Vec<Pairing> {
    let mut out = Vec::new();
    for (x, f, d) in support_faces(c, v) {
        for corner in (0..4u8).filter(|&k| k != f) {
            let r = arcs(d, f, corner);
            if !r.is_zero() {
                out.push(arc_pairing(ix, x, f, corner, &r));
            }
        }
    }
    out
}

/// The interval pairings of an admissible vector on `[1, W]`: one per arc
/// type and face, so at most `12t`.
pub fn build_pairings<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<(PairingSystem, EdgeIndexing)> {
    require_admissible(c, v)?;
    let ix = EdgeIndexing::new(c, v)?;
    let sys = PairingSystem::new(ix.total.clone(), pairings_of(c, v, &ix))?;
    Ok((sys, ix))
}

/// Total number of intersection points with the 1-skeleton.
pub fn weight<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<BigUint> {
    require_admissible(c, v)?;
    Ok(EdgeIndexing::new(c, v)?.edges.iter().map(|e| &e.weight).sum())
}

pub(crate) fn components_unchecked<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<BigInt> {
    components_in(c, v, &EdgeIndexing::new(c, v)?)
}

pub(crate) fn components_in<C: TetComplex + ?Sized>(c: &C, v: &NormalVector, ix: &EdgeIndexing) -> Result<BigInt> {
    let sys = PairingSystem::new(ix.total.clone(), pairings_of(c, v, ix))?;
    Ok(count_orbits(&sys))
}

pub fn count_components<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<BigInt> {
    require_admissible(c, v)?;
    components_unchecked(c, v)
}

pub(crate) fn euler_unchecked<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<BigInt> {
    Ok(euler_in(c, v, &EdgeIndexing::new(c, v)?))
}

pub(crate) fn euler_in<C: TetComplex + ?Sized>(c: &C, v: &NormalVector, ix: &EdgeIndexing) -> BigInt {
    let vertices: BigUint = ix.edges.iter().map(|e| &e.weight).sum();
    let mut edges = BigUint::zero();
    for (_, f, d) in support_faces(c, v) {
        for corner in (0..4u8).filter(|&k| k != f) {
            edges += arcs(d, f, corner);
        }
    }
    BigInt::from(vertices) - BigInt::from(edges) + BigInt::from(v.disk_count())
}

/// `V - E + F` of the cell structure cut out by the skeleton: points, arcs
/// (those in glued faces counted once) and disks.
pub fn euler_characteristic<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<BigInt> {
    require_admissible(c, v)?;
    euler_unchecked(c, v)
}

pub(crate) fn orientable_unchecked<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<bool> {
    orientable_in(c, v, &EdgeIndexing::new(c, v)?)
}

pub(crate) fn orientable_in<C: TetComplex + ?Sized>(c: &C, v: &NormalVector, ix: &EdgeIndexing) -> Result<bool> {
    let two = BigUint::from(2u8);
    Ok(components_in(c, &v.scaled(&two), &ix.scaled(&two))? == BigInt::from(2))
}

/// A connected surface in an orientable manifold is orientable iff its double
/// has two components.
pub fn check_orientable<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<bool> {
    require_admissible(c, v)?;
    if !c.is_orientable() {
        return Err(TopoError::Precondition("the ambient triangulation is not orientable".into()));
    }
    let k = components_unchecked(c, v)?;
    if k != BigInt::one() {
        return Err(TopoError::Precondition(format!("surface has {k} components; split it first")));
    }
    orientable_unchecked(c, v)
}

/// Normal arcs on a boundary surface: per face of `surface.faces`, the arcs
/// at its three corners in increasing local vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalCurveVector {
    pub coords: Vec<[BigUint; 3]>,
}

fn corners(f: u8) -> [u8; 3] {
    let mut out = [0u8; 3];
    for (i, v) in (0..4u8).filter(|&v| v != f).enumerate() {
        out[i] = v;
    }
    out
}

impl NormalCurveVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|a| a.iter().all(|x| x.is_zero()))
    }

    pub fn scaled(&self, k: &BigUint) -> Self {
        NormalCurveVector { coords: self.coords.iter().map(|a| std::array::from_fn(|i| &a[i] * k)).collect() }
    }

    /// Points on each boundary edge, by code; fails if the two faces at an
    /// edge disagree.
    pub fn edge_weights(&self, surface: &BoundarySurface) -> Result<BTreeMap<u64, BigUint>> {
        if self.coords.len() != surface.faces.len() {
            return Err(TopoError::Input(format!("curve has {} faces, surface has {}", self.coords.len(), surface.faces.len())));
        }
        let mut out: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (i, &(_, f)) in surface.faces.iter().enumerate() {
            let cs = corners(f);
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                let (code, _) = surface.edge_sides[&(i, edge_index(cs[p], cs[q]))];
                let w = &self.coords[i][p] + &self.coords[i][q];
                match out.get(&code) {
                    Some(old) if *old != w => {
                        return Err(TopoError::Input(format!("curve meets boundary edge {code} {old} times from one side and {w} from the other")))
                    }
                    _ => {
                        out.insert(code, w);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Restriction of a surface to the boundary.
pub fn boundary_curve(surface: &BoundarySurface, v: &NormalVector) -> NormalCurveVector {
    let zero = zero_coords();
    let coords = surface
        .faces
        .iter()
        .map(|&(x, f)| {
            let d = v.tet(x).unwrap_or(&zero);
            let cs = corners(f);
            std::array::from_fn(|i| arcs(d, f, cs[i]))
        })
        .collect();
    NormalCurveVector { coords }
}

/// Pairings of a normal curve, on the points where it meets boundary edges.
pub fn curve_pairings(surface: &BoundarySurface, curve: &NormalCurveVector) -> Result<PairingSystem> {
    let weights = curve.edge_weights(surface)?;
    let mut offsets: HashMap<u64, BigInt> = HashMap::with_capacity(weights.len());
    let mut total = BigInt::zero();
    for (code, w) in &weights {
        offsets.insert(*code, total.clone());
        total += BigInt::from(w.clone());
    }
    let run_from = |i: usize, a: u8, b: u8, r: &BigUint| -> (Interval, bool) {
        let (code, low_to_high) = surface.edge_sides[&(i, edge_index(a, b))];
        let (o, w) = (&offsets[&code], BigInt::from(weights[&code].clone()));
        let r = BigInt::from(r.clone());
        if (a < b) == low_to_high {
            (Interval::new(o + 1, o + &r).unwrap(), true)
        } else {
            (Interval::new(o + &w - &r + 1, o + &w).unwrap(), false)
        }
    };
    let mut pairings = Vec::new();
    for (i, &(_, f)) in surface.faces.iter().enumerate() {
        let cs = corners(f);
        for (k, &corner) in cs.iter().enumerate() {
            let r = &curve.coords[i][k];
            if r.is_zero() {
                continue;
            }
            let (u1, u2) = others(f, corner);
            let (dom, up1) = run_from(i, corner, u1, r);
            let (ran, up2) = run_from(i, corner, u2, r);
            pairings.push(Pairing::new(dom, ran, up1 != up2)?);
        }
    }
    Ok(PairingSystem::new(total, pairings)?)
}

pub fn curve_components(surface: &BoundarySurface, curve: &NormalCurveVector) -> Result<BigInt> {
    Ok(count_orbits(&curve_pairings(surface, curve)?))
}

/// Whether the curve meets the closed edge path `cycle` (edge codes) an odd
/// number of times.
pub fn parity_check(surface: &BoundarySurface, curve: &NormalCurveVector, cycle: &[u64]) -> Result<bool> {
    check_cycle(surface, cycle)?;
    let weights = curve.edge_weights(surface)?;
    let mut odd = false;
    for code in cycle {
        odd ^= weights.get(code).is_some_and(|w| w.bit(0));
    }
    Ok(odd)
}

/// Checks that `cycle` lists boundary edges forming a closed walk.
pub fn check_cycle(surface: &BoundarySurface, cycle: &[u64]) -> Result<()> {
    let ends: Vec<(usize, usize)> = cycle
        .iter()
        .map(|c| surface.edges.get(c).copied().ok_or_else(|| TopoError::Input(format!("edge {c} is not a boundary edge"))))
        .collect::<Result<_>>()?;
    let Some(&(s0, s1)) = ends.first() else {
        return Err(TopoError::Input("empty cycle".into()));
    };
    let closes = |start: usize| {
        let mut at = start;
        for &(p, q) in &ends {
            at = if p == at {
                q
            } else if q == at {
                p
            } else {
                return false;
            };
        }
        at == start
    };
    if closes(s0) || closes(s1) {
        Ok(())
    } else {
        Err(TopoError::Input("edges do not form a closed walk".into()))
    }
}

/// Boundary curves of a surface in a triangulation with boundary.
pub fn boundary_components(t: &Triangulation, v: &NormalVector) -> Result<BigInt> {
    require_admissible(t, v)?;
    if t.is_closed() {
        return Err(TopoError::Precondition("closed triangulation has no boundary".into()));
    }
    let surface = BoundarySurface::new(t, t.boundary_faces());
    curve_components(&surface, &boundary_curve(&surface, v))
}

/// Genus of a connected orientable surface with at most one boundary curve.
pub fn genus(chi: &BigInt, boundary: &BigInt, orientable: bool) -> Result<BigInt> {
    if !orientable {
        return Err(TopoError::Unsupported("genus of a non-orientable surface".into()));
    }
    let top = match boundary.to_u8() {
        Some(0) => BigInt::from(2) - chi,
        Some(1) => BigInt::one() - chi,
        _ => return Err(TopoError::Unsupported(format!("genus with {boundary} boundary curves"))),
    };
    if top < BigInt::zero() || top.bit(0) {
        return Err(TopoError::Input(format!("no orientable surface has Euler characteristic {chi} and {boundary} boundary curves")));
    }
    Ok(top / 2)
}

/// Topology of one kind of component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    /// How many components share this vector.
    pub multiplicity: BigInt,
    pub vector: NormalVector,
    pub weight: BigUint,
    pub euler_characteristic: BigInt,
    /// `None` when the ambient triangulation is not orientable.
    pub orientable: Option<bool>,
    pub boundary_components: BigInt,
    /// Only for orientable components with at most one boundary curve.
    pub genus: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub components: Vec<ComponentSummary>,
}

impl ComponentReport {
    pub fn component_count(&self) -> BigInt {
        self.components.iter().map(|c| &c.multiplicity).sum()
    }

    pub fn to_json_value(&self) -> Value {
        let items: Vec<Value> = self
            .components
            .iter()
            .map(|c| {
                serde_json::json!({
                    "multiplicity": c.multiplicity.to_string(),
                    "vector": c.vector.to_json_value(),
                    "weight": c.weight.to_string(),
                    "euler_characteristic": c.euler_characteristic.to_string(),
                    "orientable": c.orientable,
                    "boundary_components": c.boundary_components.to_string(),
                    "genus": c.genus.as_ref().map(|g| g.to_string()),
                })
            })
            .collect();
        Value::Array(items)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }
}

/// Per-component coordinates from one weighted orbit count: each disk type
/// puts a unit weight on the point where each of its disks meets the type's
/// fixed edge, so an orbit's weight counts its disks.
pub fn component_vectors<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<Vec<(BigInt, NormalVector)>> {
    require_admissible(c, v)?;
    let ix = EdgeIndexing::new(c, v)?;
    let d = v.len();
    if d > u32::MAX as usize {
        return Err(TopoError::Capacity(format!("{d} coordinates do not fit 32-bit weight indices")));
    }
    let mut entries = Vec::new();
    for (x, dc) in v.iter() {
        for (ty, count) in dc.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            let (p, q) = FIXED_EDGE[ty];
            // positions counted from p along (p, q)
            let from = match ty {
                _ if ty == p as usize => BigUint::one(),
                _ if ty == q as usize => edge_weight(dc, p, q) - count + 1u32,
                _ => &dc[p as usize] + 1u32,
            };
            let to = &from + count - 1u32;
            let (a, _) = ix.label(x, p, q, &from);
            let (b, _) = ix.label(x, p, q, &to);
            let iv = if a <= b { Interval::new(a, b) } else { Interval::new(b, a) }.expect("labels are positive");
            entries.push((iv, WeightVec::unit((x * DISK_TYPES + ty) as u32)));
        }
    }
    let weights = WeightList::from_additive(d, entries)?;
    let sys = PairingSystem::new(ix.total.clone(), pairings_of(c, v, &ix))?;
    let report = run(&sys, Some(&weights), &RunOptions::default())?.report.expect("weighted run");
    let mut groups: BTreeMap<Vec<(u32, BigUint)>, BigInt> = BTreeMap::new();
    for (iv, w) in &report.entries {
        if w.is_zero() {
            return Err(TopoError::Invariant(format!("orbit {iv} carries no disk")));
        }
        let key: Vec<(u32, BigUint)> = w.iter().map(|(i, x)| (i, x.clone())).collect();
        *groups.entry(key).or_default() += iv.width();
    }
    let mut out = Vec::with_capacity(groups.len());
    for (key, mult) in groups {
        let u = NormalVector::from_tets(
            v.num_tets(),
            key.into_iter().map(|(i, x)| {
                let mut d = zero_coords();
                d[i as usize % DISK_TYPES] = x;
                (i as usize / DISK_TYPES, d)
            }),
        )?;
        out.push((mult, u));
    }
    Ok(out)
}

/// Splits an admissible vector into components and reports the topology of
/// each kind.
pub fn analyze_components<C: TetComplex + ?Sized>(c: &C, v: &NormalVector) -> Result<ComponentReport> {
    let groups = component_vectors(c, v)?;
    let ambient_orientable = c.is_orientable();
    let surface = {
        let faces = c.boundary_faces();
        (!faces.is_empty()).then(|| BoundarySurface::new(c, faces))
    };
    let mut components = Vec::with_capacity(groups.len());
    for (multiplicity, u) in groups {
        let ix = EdgeIndexing::new(c, &u)?;
        let k = components_in(c, &u, &ix)?;
        if k != BigInt::one() {
            return Err(TopoError::Invariant(format!("component vector has {k} components")));
        }
        let weight: BigUint = ix.edges.iter().map(|e| &e.weight).sum();
        let chi = euler_in(c, &u, &ix);
        let orientable = if ambient_orientable { Some(orientable_in(c, &u, &ix)?) } else { None };
        let boundary = match &surface {
            Some(s) => curve_components(s, &boundary_curve(s, &u))?,
            None => BigInt::zero(),
        };
        let genus = match orientable {
            Some(true) if boundary <= BigInt::one() => Some(genus(&chi, &boundary, true)?),
            _ => None,
        };
        components.push(ComponentSummary { multiplicity, vector: u, weight, euler_characteristic: chi, orientable, boundary_components: boundary, genus });
    }
    Ok(ComponentReport { components })
}

/// The link of each vertex class: one triangle at every corner in the class.
pub fn vertex_links(t: &Triangulation) -> Vec<NormalVector> {
    let cl = t.classes();
    let mut out = vec![NormalVector::zero(t.num_tets()); cl.vertex_count];
    for x in 0..t.num_tets() {
        for v in 0..4 {
            let mut d = zero_coords();
            d[v] = BigUint::one();
            let link = &mut out[cl.vertex_of[x][v]];
            *link = link.add(&NormalVector::from_tets(t.num_tets(), [(x, d)]).unwrap()).unwrap();
        }
    }
    out
}
