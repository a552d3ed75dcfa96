//! Tetrahedra with face gluings, identification classes and manifold checks.
//!
//! Faces are numbered by the opposite vertex. A [`Gluing`] on face `f` of
//! tetrahedron `x` names the neighbour `y`, the neighbour's face, and a
//! permutation sending local vertices of `x` to local vertices of `y`, so that
//! `perm(f)` is the neighbour's face.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TopoError};
use crate::perm::Perm4;

/// Local edges of a tetrahedron, indexed 0..6.
pub const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn edge_index(a: u8, b: u8) -> u8 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("not an edge: {a}{b}"),
    }
}

/// The two vertices other than `a` and `b`, in increasing order.
pub fn other_two(a: u8, b: u8) -> (u8, u8) {
    let mut it = (0..4u8).filter(|&v| v != a && v != b);
    (it.next().unwrap(), it.next().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub face: u8,
    pub perm: Perm4,
}

/// Anything that can answer face-gluing queries. Large subdivisions implement
/// this lazily instead of materializing their tetrahedra.
pub trait TetComplex {
    fn num_tets(&self) -> usize;
    fn gluing(&self, tet: usize, face: u8) -> Option<Gluing>;

    /// Whether the tetrahedra can be oriented consistently.
    fn is_orientable(&self) -> bool {
        orientation(self).is_some()
    }

    /// Unglued faces in increasing order.
    fn boundary_faces(&self) -> Vec<(usize, u8)> {
        (0..self.num_tets()).flat_map(|x| (0..4u8).map(move |f| (x, f))).filter(|&(x, f)| self.gluing(x, f).is_none()).collect()
    }
}

impl<T: TetComplex + ?Sized> TetComplex for &T {
    fn num_tets(&self) -> usize {
        (**self).num_tets()
    }
    fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        (**self).gluing(tet, face)
    }
    fn is_orientable(&self) -> bool {
        (**self).is_orientable()
    }
    fn boundary_faces(&self) -> Vec<(usize, u8)> {
        (**self).boundary_faces()
    }
}

/// Per-tetrahedron signs making every gluing orientation reversing, if any.
pub fn orientation<C: TetComplex + ?Sized>(c: &C) -> Option<Vec<bool>> {
    let n = c.num_tets();
    let mut sign: Vec<Option<bool>> = vec![None; n];
    let mut stack = Vec::new();
    for root in 0..n {
        if sign[root].is_some() {
            continue;
        }
        sign[root] = Some(true);
        stack.push(root);
        while let Some(x) = stack.pop() {
            let sx = sign[x].unwrap();
            for f in 0..4 {
                if let Some(g) = c.gluing(x, f) {
                    // an odd gluing permutation joins equally signed tetrahedra
                    let want = if g.perm.is_even() { !sx } else { sx };
                    match sign[g.tet] {
                        None => {
                            sign[g.tet] = Some(want);
                            stack.push(g.tet);
                        }
                        Some(s) if s != want => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    Some(sign.into_iter().map(|s| s.unwrap()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    gluings: Vec<[Option<Gluing>; 4]>,
}

impl Triangulation {
    /// Checks that the table is an involution without self-glued faces.
    pub fn new(gluings: Vec<[Option<Gluing>; 4]>) -> Result<Self> {
        let n = gluings.len();
        for (x, row) in gluings.iter().enumerate() {
            for f in 0..4u8 {
                let Some(g) = row[f as usize] else { continue };
                if g.tet >= n || g.face > 3 {
                    return Err(TopoError::Structure(format!("tet {x} face {f} glued to missing tet {} face {}", g.tet, g.face)));
                }
                if g.perm.apply(f) != g.face {
                    return Err(TopoError::Structure(format!("tet {x} face {f}: permutation {:?} does not send the face to face {}", g.perm, g.face)));
                }
                if g.tet == x && g.face == f {
                    return Err(TopoError::Structure(format!("tet {x} face {f} is glued to itself")));
                }
                let back = gluings[g.tet][g.face as usize];
                let ok = matches!(back, Some(b) if b.tet == x && b.face == f && b.perm == g.perm.inverse());
                if !ok {
                    return Err(TopoError::Structure(format!("gluing of tet {x} face {f} is not matched by its partner")));
                }
            }
        }
        Ok(Triangulation { gluings })
    }

    pub fn materialize<C: TetComplex + ?Sized>(c: &C) -> Result<Self> {
        let gl = (0..c.num_tets()).map(|x| [c.gluing(x, 0), c.gluing(x, 1), c.gluing(x, 2), c.gluing(x, 3)]).collect();
        Self::new(gl)
    }

    pub fn gluings(&self) -> &[[Option<Gluing>; 4]] {
        &self.gluings
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|r| r.iter().all(|g| g.is_some()))
    }

    pub fn boundary_faces(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        for (x, row) in self.gluings.iter().enumerate() {
            for f in 0..4u8 {
                if row[f as usize].is_none() {
                    out.push((x, f));
                }
            }
        }
        out
    }

    pub fn classes(&self) -> Classes {
        Classes::compute(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TriangulationJson = serde_json::from_str(s)?;
        raw.into_triangulation()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TriangulationJson::from(self)).expect("serializable")
    }
}

impl TetComplex for Triangulation {
    fn num_tets(&self) -> usize {
        self.gluings.len()
    }
    fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        self.gluings[tet][face as usize]
    }
    fn boundary_faces(&self) -> Vec<(usize, u8)> {
        Triangulation::boundary_faces(self)
    }
}

#[derive(Serialize, Deserialize)]
struct GluingJson {
    tet: usize,
    face: u8,
    perm: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TriangulationJson {
    tets: usize,
    gluings: Vec<Vec<Option<GluingJson>>>,
}

impl TriangulationJson {
    pub(crate) fn into_triangulation(self) -> Result<Triangulation> {
        if self.gluings.len() != self.tets {
            return Err(TopoError::Structure(format!("{} gluing rows for {} tets", self.gluings.len(), self.tets)));
        }
        let mut rows = Vec::with_capacity(self.tets);
        for (x, row) in self.gluings.into_iter().enumerate() {
            if row.len() != 4 {
                return Err(TopoError::Structure(format!("tet {x} has {} face entries", row.len())));
            }
            let mut out = [None; 4];
            for (f, g) in row.into_iter().enumerate() {
                if let Some(g) = g {
                    let imgs: [u8; 4] = g.perm.as_slice().try_into().map_err(|_| TopoError::Structure(format!("tet {x} face {f}: permutation must list 4 images")))?;
                    let perm = Perm4::new(imgs).ok_or_else(|| TopoError::Structure(format!("tet {x} face {f}: {:?} is not a permutation", g.perm)))?;
                    out[f] = Some(Gluing { tet: g.tet, face: g.face, perm });
                }
            }
            rows.push(out);
        }
        Triangulation::new(rows)
    }
}

impl From<&Triangulation> for TriangulationJson {
    fn from(t: &Triangulation) -> Self {
        TriangulationJson {
            tets: t.num_tets(),
            gluings: t
                .gluings
                .iter()
                .map(|row| row.iter().map(|g| g.map(|g| GluingJson { tet: g.tet, face: g.face, perm: g.perm.images().to_vec() })).collect())
                .collect(),
        }
    }
}

/// The occurrences of one edge, found by walking around it through the faces
/// that contain it.
#[derive(Clone, Debug)]
pub struct EdgeWalk {
    /// `(tet, a, b)` with `a` glued to `a` throughout the walk.
    pub occurrences: Vec<(usize, u8, u8)>,
    /// Boundary faces reached at the two ends of an open walk, as
    /// `(tet, face, a, b)`.
    pub ends: Vec<(usize, u8, u8, u8)>,
    /// Some wedge is visited twice, e.g. the edge is glued to itself reversed.
    pub degenerate: bool,
}

impl EdgeWalk {
    pub fn is_boundary(&self) -> bool {
        !self.ends.is_empty()
    }

    /// Smallest `tet * 6 + local edge` among the occurrences.
    pub fn code(&self) -> u64 {
        self.occurrences.iter().map(|&(t, a, b)| t as u64 * 6 + edge_index(a, b) as u64).min().unwrap()
    }

    /// The edge is oriented from the lower to the higher local vertex of its
    /// smallest occurrence. True if that agrees with the walk's `a → b`.
    pub fn forward(&self) -> bool {
        let &(_, a, b) = self.occurrences.iter().min_by_key(|&&(t, a, b)| (t, edge_index(a, b))).unwrap();
        a < b
    }
}

pub fn walk_edge<C: TetComplex + ?Sized>(c: &C, tet: usize, a: u8, b: u8) -> EdgeWalk {
    let (p, q) = other_two(a, b);
    let mut occ = vec![(tet, a, b)];
    let mut ends = Vec::new();
    let start = (tet, a, b, p, q);
    let mut closed = false;
    let mut state = start;
    loop {
        let (x, a, b, p, q) = state;
        match c.gluing(x, q) {
            None => {
                ends.push((x, q, a, b));
                break;
            }
            Some(g) => {
                let next = (g.tet, g.perm.apply(a), g.perm.apply(b), g.face, g.perm.apply(p));
                if next == start {
                    closed = true;
                    break;
                }
                occ.push((next.0, next.1, next.2));
                state = next;
            }
        }
    }
    if !closed {
        let mut state = (tet, a, b, q, p);
        loop {
            let (x, a, b, p, q) = state;
            match c.gluing(x, q) {
                None => {
                    ends.push((x, q, a, b));
                    break;
                }
                Some(g) => {
                    let next = (g.tet, g.perm.apply(a), g.perm.apply(b), g.face, g.perm.apply(p));
                    occ.push((next.0, next.1, next.2));
                    state = next;
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(occ.len());
    let degenerate = !occ.iter().all(|&(t, a, b)| seen.insert((t, edge_index(a, b))));
    EdgeWalk { occurrences: occ, ends, degenerate }
}

/// Vertex, edge and face classes of an explicit triangulation. Every class is
/// numbered by the order of its smallest `(tet, local index)` representative.
#[derive(Clone, Debug)]
pub struct Classes {
    pub vertex_of: Vec<[usize; 4]>,
    pub edge_of: Vec<[usize; 6]>,
    pub face_of: Vec<[usize; 4]>,
    pub edges: Vec<EdgeWalk>,
    /// One or two `(tet, face)` sides per face class, smallest first.
    pub faces: Vec<Vec<(usize, u8)>>,
    pub vertex_count: usize,
}

impl Classes {
    fn compute(t: &Triangulation) -> Self {
        let n = t.num_tets();
        let mut dsu = Dsu::new(4 * n);
        for x in 0..n {
            for f in 0..4u8 {
                if let Some(g) = t.gluing(x, f) {
                    for v in (0..4u8).filter(|&v| v != f) {
                        dsu.union(4 * x + v as usize, 4 * g.tet + g.perm.apply(v) as usize);
                    }
                }
            }
        }
        let mut vid = HashMap::new();
        let mut vertex_of = vec![[0; 4]; n];
        for x in 0..n {
            for v in 0..4 {
                let r = dsu.find(4 * x + v);
                let next = vid.len();
                vertex_of[x][v] = *vid.entry(r).or_insert(next);
            }
        }

        let mut edge_of = vec![[usize::MAX; 6]; n];
        let mut edges = Vec::new();
        for x in 0..n {
            for (e, &(a, b)) in EDGES.iter().enumerate() {
                if edge_of[x][e] != usize::MAX {
                    continue;
                }
                let mut w = walk_edge(t, x, a, b);
                if !w.forward() {
                    for o in &mut w.occurrences {
                        *o = (o.0, o.2, o.1);
                    }
                    for end in &mut w.ends {
                        *end = (end.0, end.1, end.3, end.2);
                    }
                }
                for &(y, a, b) in &w.occurrences {
                    edge_of[y][edge_index(a, b) as usize] = edges.len();
                }
                edges.push(w);
            }
        }

        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces = Vec::new();
        for x in 0..n {
            for f in 0..4u8 {
                if face_of[x][f as usize] != usize::MAX {
                    continue;
                }
                let mut sides = vec![(x, f)];
                if let Some(g) = t.gluing(x, f) {
                    sides.push((g.tet, g.face));
                }
                for &(y, h) in &sides {
                    face_of[y][h as usize] = faces.len();
                }
                faces.push(sides);
            }
        }
        Classes { vertex_of, edge_of, face_of, edges, faces, vertex_count: vid.len() }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Vertex classes at the tail and head of an edge class.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let (x, a, b) = self.edges[e].occurrences[0];
        (self.vertex_of[x][a as usize], self.vertex_of[x][b as usize])
    }

    /// Sign of local edge `a → b` of tetrahedron `x` relative to its class.
    pub fn edge_sign(&self, x: usize, a: u8, b: u8) -> i64 {
        let e = self.edge_of[x][edge_index(a, b) as usize];
        let hit = self.edges[e].occurrences.iter().find(|o| o.0 == x && edge_index(o.1, o.2) == edge_index(a, b)).unwrap();
        if hit.1 == a {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    /// The link of a vertex is not a sphere (interior) or disk (boundary).
    VertexLink { vertex: usize, euler: i64, boundary: bool },
    /// The link of an edge is not a single circle or arc.
    EdgeLink { edge: usize, reason: String },
    /// A closed complex whose Euler characteristic is not zero.
    Euler(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldReport {
    pub valid: bool,
    pub closed: bool,
    pub tets: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub problems: Vec<Problem>,
}

impl ManifoldReport {
    pub fn offending_edge(&self) -> Option<usize> {
        self.problems.iter().find_map(|p| match p {
            Problem::EdgeLink { edge, .. } => Some(*edge),
            _ => None,
        })
    }
}

/// Vertex links must be spheres or, at boundary vertices, disks; edge links
/// must be single circles or arcs.
pub fn validate_manifold(t: &Triangulation) -> ManifoldReport {
    let cl = t.classes();
    let n = t.num_tets();
    let mut problems = Vec::new();

    for (e, w) in cl.edges.iter().enumerate() {
        if w.degenerate {
            problems.push(Problem::EdgeLink { edge: e, reason: "edge is identified with itself so that its link is not a single circle or arc".into() });
        }
    }

    // Link vertex (x, v, w): the point of edge vw near v.
    let token = |x: usize, v: u8, w: u8| 12 * x + 3 * v as usize + (if w < v { w } else { w - 1 }) as usize;
    let mut dsu = Dsu::new(12 * n);
    for x in 0..n {
        for f in 0..4u8 {
            if let Some(g) = t.gluing(x, f) {
                for v in (0..4u8).filter(|&v| v != f) {
                    for w in (0..4u8).filter(|&w| w != f && w != v) {
                        dsu.union(token(x, v, w), token(g.tet, g.perm.apply(v), g.perm.apply(w)));
                    }
                }
            }
        }
    }
    let nv = cl.vertex_count;
    let mut corners = vec![0i64; nv];
    let mut half_edges = vec![0i64; nv];
    let mut bdry_edges = vec![0i64; nv];
    let mut link_vertices: Vec<std::collections::HashSet<usize>> = vec![Default::default(); nv];
    for x in 0..n {
        for v in 0..4u8 {
            let c = cl.vertex_of[x][v as usize];
            corners[c] += 1;
            for f in (0..4u8).filter(|&f| f != v) {
                if t.gluing(x, f).is_some() {
                    half_edges[c] += 1;
                } else {
                    bdry_edges[c] += 1;
                }
            }
            for w in (0..4u8).filter(|&w| w != v) {
                link_vertices[c].insert(dsu.find(token(x, v, w)));
            }
        }
    }
    for c in 0..nv {
        let euler = link_vertices[c].len() as i64 - (half_edges[c] / 2 + bdry_edges[c]) + corners[c];
        let boundary = bdry_edges[c] > 0;
        let want = if boundary { 1 } else { 2 };
        if euler != want {
            problems.push(Problem::VertexLink { vertex: c, euler, boundary });
        }
    }

    let closed = t.is_closed();
    let euler = nv as i64 - cl.edge_count() as i64 + cl.face_count() as i64 - n as i64;
    if closed && euler != 0 {
        problems.push(Problem::Euler(euler));
    }
    ManifoldReport {
        valid: problems.is_empty(),
        closed,
        tets: n,
        vertices: nv,
        edges: cl.edge_count(),
        faces: cl.face_count(),
        euler_characteristic: euler,
        problems,
    }
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }
    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
