//! Barycentric subdivision, knots in the 1-skeleton, and knot complements.
//!
//! Tetrahedron `(x, π)` of the subdivision of `T` has index `24x + π.index()`.
//! Its local vertex `j` is the barycentre of the face of `x` spanned by
//! `π(0), …, π(j)`; so vertex 0 is an old vertex and vertex 3 the centre of `x`.

use std::collections::{HashMap, HashSet};

use crate::error::{Result, TopoError};
use crate::perm::{Perm4, ALL};
use crate::triangulation::{edge_index, walk_edge, Classes, Dsu, Gluing, TetComplex, Triangulation, EDGES};

/// Lazy barycentric subdivision of any complex.
#[derive(Clone, Debug)]
pub struct Subdivision<B> {
    base: B,
}

impl<B: TetComplex> Subdivision<B> {
    pub fn new(base: B) -> Self {
        Subdivision { base }
    }

    pub fn base(&self) -> &B {
        &self.base
    }
}

impl<B: TetComplex> TetComplex for Subdivision<B> {
    fn num_tets(&self) -> usize {
        self.base.num_tets() * 24
    }

    fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        let x = tet / 24;
        let pi = ALL[tet % 24];
        if face < 3 {
            let q = pi.compose(&Perm4::transposition(face, face + 1));
            return Some(Gluing { tet: x * 24 + q.index(), face, perm: Perm4::IDENTITY });
        }
        let g = self.base.gluing(x, pi.apply(3))?;
        let q = g.perm.compose(&pi);
        Some(Gluing { tet: g.tet * 24 + q.index(), face: 3, perm: Perm4::IDENTITY })
    }

    fn is_orientable(&self) -> bool {
        self.base.is_orientable()
    }

    fn boundary_faces(&self) -> Vec<(usize, u8)> {
        let mut out: Vec<(usize, u8)> = self
            .base
            .boundary_faces()
            .into_iter()
            .flat_map(|(x, f)| ALL.iter().filter(move |pi| pi.apply(3) == f).map(move |pi| (x * 24 + pi.index(), 3)))
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn barycentric_subdivide(t: &Triangulation) -> Triangulation {
    Triangulation::materialize(&Subdivision::new(t)).expect("subdivision of a consistent table is consistent")
}

/// A knot given as a list of edge-class ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotSpec {
    pub edges: Vec<usize>,
}

impl KnotSpec {
    pub fn new(edges: Vec<usize>) -> Self {
        KnotSpec { edges }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let edges: Vec<usize> = serde_json::from_str(s)?;
        Ok(KnotSpec { edges })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.edges).expect("serializable")
    }

    /// Checks that the edges form one simple closed curve and returns its
    /// vertex classes.
    pub fn validate(&self, cl: &Classes) -> Result<Vec<usize>> {
        if self.edges.is_empty() {
            return Err(TopoError::Input("knot has no edges".into()));
        }
        let mut seen = HashSet::new();
        for &e in &self.edges {
            if e >= cl.edge_count() {
                return Err(TopoError::Input(format!("edge class {e} does not exist")));
            }
            if !seen.insert(e) {
                return Err(TopoError::Input(format!("edge class {e} repeated")));
            }
        }
        let mut degree: HashMap<usize, usize> = HashMap::new();
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &self.edges {
            let (a, b) = cl.edge_ends(e);
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        if let Some((v, d)) = degree.iter().find(|(_, &d)| d != 2) {
            return Err(TopoError::Input(format!("knot meets vertex {v} {d} times; it must be a simple closed curve")));
        }
        // connected
        let start = *degree.keys().min().unwrap();
        let mut stack = vec![start];
        let mut reached = HashSet::from([start]);
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if reached.insert(w) {
                    stack.push(w);
                }
            }
        }
        if reached.len() != degree.len() {
            return Err(TopoError::Input("knot edges form more than one closed curve".into()));
        }
        let mut vs: Vec<usize> = degree.into_keys().collect();
        vs.sort_unstable();
        Ok(vs)
    }

    /// The image of the knot in the barycentric subdivision: each edge
    /// becomes two half-edges.
    pub fn subdivide(&self, t: &Triangulation, sub: &Triangulation) -> KnotSpec {
        let cl = t.classes();
        let scl = sub.classes();
        let mut out = Vec::new();
        for &e in &self.edges {
            let (x, a, b) = cl.edges[e].occurrences[0];
            for (u, w) in [(a, b), (b, a)] {
                let (c, d) = crate::triangulation::other_two(u, w);
                let pi = Perm4::new([u, w, c, d]).unwrap();
                out.push(scl.edge_of[x * 24 + pi.index()][0]);
            }
        }
        out.sort_unstable();
        KnotSpec { edges: out }
    }
}

/// The boundary surface of a complex: its unglued faces, edges between them,
/// and vertices.
#[derive(Clone, Debug)]
pub struct BoundarySurface {
    pub faces: Vec<(usize, u8)>,
    /// Canonical edge code → the vertex ids at its two ends.
    pub edges: HashMap<u64, (usize, usize)>,
    /// `(face position, local edge index)` → the edge's code and whether
    /// its class runs from the lower to the higher local vertex.
    pub edge_sides: HashMap<(usize, u8), (u64, bool)>,
    pub vertex_count: usize,
    pub components: usize,
}

impl BoundarySurface {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn is_torus(&self) -> bool {
        self.components == 1 && self.euler_characteristic() == 0
    }

    /// Builds the surface from its list of boundary faces.
    pub fn new<C: TetComplex + ?Sized>(c: &C, mut faces: Vec<(usize, u8)>) -> Self {
        faces.sort_unstable();
        let index: HashMap<(usize, u8), usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut corners = Dsu::new(4 * faces.len());
        let mut comps = Dsu::new(faces.len());
        let mut seen: HashMap<(usize, u8), u64> = HashMap::new();
        let mut edge_list: Vec<(u64, usize, u8)> = Vec::new();
        let mut edge_sides = HashMap::new();
        for &(x, f) in &faces {
            for &(a, b) in EDGES.iter().filter(|(a, b)| *a != f && *b != f) {
                if seen.contains_key(&(x, edge_index(a, b))) {
                    continue;
                }
                let w = walk_edge(c, x, a, b);
                let code = w.code();
                let fwd = w.forward();
                for &(y, p, q) in &w.occurrences {
                    seen.insert((y, edge_index(p, q)), code);
                }
                debug_assert_eq!(w.ends.len(), 2);
                let (y0, f0, a0, b0) = w.ends[0];
                let (y1, f1, a1, b1) = w.ends[1];
                let (i0, i1) = (index[&(y0, f0)], index[&(y1, f1)]);
                edge_sides.insert((i0, edge_index(a0, b0)), (code, (a0 < b0) == fwd));
                edge_sides.insert((i1, edge_index(a1, b1)), (code, (a1 < b1) == fwd));
                corners.union(4 * i0 + a0 as usize, 4 * i1 + a1 as usize);
                corners.union(4 * i0 + b0 as usize, 4 * i1 + b1 as usize);
                comps.union(i0, i1);
                edge_list.push((code, i0, a0));
                edge_list.push((code, i0, b0));
            }
        }
        let mut vid: HashMap<usize, usize> = HashMap::new();
        for (i, &(_, f)) in faces.iter().enumerate() {
            for v in (0..4u8).filter(|&v| v != f) {
                let r = corners.find(4 * i + v as usize);
                let next = vid.len();
                vid.entry(r).or_insert(next);
            }
        }
        let mut edges = HashMap::new();
        for pair in edge_list.chunks(2) {
            let (code, i0, a0) = pair[0];
            let (_, _, b0) = pair[1];
            let va = vid[&corners.find(4 * i0 + a0 as usize)];
            let vb = vid[&corners.find(4 * i0 + b0 as usize)];
            edges.insert(code, (va, vb));
        }
        let components = (0..faces.len()).filter(|&i| comps.find(i) == i).count();
        BoundarySurface { faces, edges, edge_sides, vertex_count: vid.len(), components }
    }
}

/// The complement of a knot in the second barycentric subdivision of a
/// closed triangulation, without materializing it. Tetrahedra keep the
/// relative order they have in the double subdivision.
#[derive(Clone, Debug)]
pub struct KnotComplement {
    t2: Subdivision<Subdivision<Triangulation>>,
    /// Per tetrahedron of the first subdivision: bit `π` set iff its child
    /// `π` survives.
    mask: Vec<u32>,
    prefix: Vec<usize>,
    orientable: bool,
}

const FULL: u32 = (1 << 24) - 1;

impl KnotComplement {
    pub fn new(t: &Triangulation, k: &KnotSpec) -> Result<Self> {
        let cl = t.classes();
        let kv: HashSet<usize> = k.validate(&cl)?.into_iter().collect();
        let ke: HashSet<usize> = k.edges.iter().copied().collect();
        let n1 = t.num_tets() * 24;
        let mut mask = vec![FULL; n1];
        for (t1, m) in mask.iter_mut().enumerate() {
            let (x, sigma) = (t1 / 24, ALL[t1 % 24]);
            let v0 = kv.contains(&cl.vertex_of[x][sigma.apply(0) as usize]);
            let e01 = ke.contains(&cl.edge_of[x][edge_index(sigma.apply(0), sigma.apply(1)) as usize]);
            if !v0 && !e01 {
                continue;
            }
            // knot vertices of the first subdivision here: local 0 if v0, local 1 if e01
            for (i, pi) in ALL.iter().enumerate() {
                let p0 = pi.apply(0);
                let p1 = pi.apply(1);
                let hits_vertex = (p0 == 0 && v0) || (p0 == 1 && e01);
                let hits_edge = e01 && ((p0 == 0 && p1 == 1) || (p0 == 1 && p1 == 0));
                if hits_vertex || hits_edge {
                    *m &= !(1 << i);
                }
            }
        }
        let mut prefix = Vec::with_capacity(n1 + 1);
        let mut acc = 0;
        prefix.push(0);
        for m in &mask {
            acc += m.count_ones() as usize;
            prefix.push(acc);
        }
        let orientable = t.is_orientable();
        Ok(KnotComplement { t2: Subdivision::new(Subdivision::new(t.clone())), mask, prefix, orientable })
    }

    pub fn second_subdivision(&self) -> &Subdivision<Subdivision<Triangulation>> {
        &self.t2
    }

    pub fn base(&self) -> &Triangulation {
        self.t2.base().base()
    }

    /// Index in the complement of a tetrahedron of the double subdivision.
    pub fn rank(&self, t2: usize) -> Option<usize> {
        let (t1, i) = (t2 / 24, t2 % 24);
        let m = self.mask[t1];
        if m & (1 << i) == 0 {
            return None;
        }
        Some(self.prefix[t1] + (m & ((1 << i) - 1)).count_ones() as usize)
    }

    /// Tetrahedron of the double subdivision at complement index `r`.
    pub fn unrank(&self, r: usize) -> usize {
        let t1 = self.prefix.partition_point(|&p| p <= r) - 1;
        let mut m = self.mask[t1];
        for _ in 0..r - self.prefix[t1] {
            m &= m - 1;
        }
        t1 * 24 + m.trailing_zeros() as usize
    }

    pub fn removed_count(&self) -> usize {
        self.t2.num_tets() - self.num_tets()
    }

    /// Faces of surviving tetrahedra that were glued to removed ones.
    pub fn boundary_faces(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        for (t1, &m) in self.mask.iter().enumerate() {
            if m == FULL {
                continue;
            }
            for i in (0..24).filter(|i| m & (1 << i) == 0) {
                for f in 0..4 {
                    if let Some(g) = self.t2.gluing(t1 * 24 + i, f) {
                        if let Some(r) = self.rank(g.tet) {
                            out.push((r, g.face));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The boundary surface, checked to be a single torus.
    pub fn boundary(&self) -> Result<BoundarySurface> {
        let b = BoundarySurface::new(self, self.boundary_faces());
        if !b.is_torus() {
            return Err(TopoError::Invariant(format!(
                "knot complement boundary has {} components and Euler characteristic {}",
                b.components,
                b.euler_characteristic()
            )));
        }
        Ok(b)
    }
}

impl TetComplex for KnotComplement {
    fn num_tets(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        let g = self.t2.gluing(self.unrank(tet), face)?;
        let r = self.rank(g.tet)?;
        Some(Gluing { tet: r, ..g })
    }

    fn boundary_faces(&self) -> Vec<(usize, u8)> {
        KnotComplement::boundary_faces(self)
    }

    fn is_orientable(&self) -> bool {
        self.orientable
    }
}

/// Removes every tetrahedron meeting the knot. `t` should already be a
/// second barycentric subdivision; the result's boundary must be one torus.
pub fn knot_complement(t: &Triangulation, k: &KnotSpec) -> Result<Triangulation> {
    let cl = t.classes();
    let kv: HashSet<usize> = k.validate(&cl)?.into_iter().collect();
    let n = t.num_tets();
    let removed: Vec<bool> = (0..n).map(|x| (0..4).any(|v| kv.contains(&cl.vertex_of[x][v]))).collect();
    let mut rank = vec![usize::MAX; n];
    let mut kept = 0;
    for x in 0..n {
        if !removed[x] {
            rank[x] = kept;
            kept += 1;
        }
    }
    let mut gl = Vec::with_capacity(kept);
    for x in (0..n).filter(|&x| !removed[x]) {
        let mut row = [None; 4];
        for f in 0..4u8 {
            row[f as usize] = t.gluing(x, f).filter(|g| !removed[g.tet]).map(|g| Gluing { tet: rank[g.tet], ..g });
        }
        gl.push(row);
    }
    let out = Triangulation::new(gl)?;
    let b = BoundarySurface::new(&out, out.boundary_faces());
    if !b.is_torus() {
        return Err(TopoError::Invariant(format!(
            "knot complement boundary has {} components and Euler characteristic {}",
            b.components,
            b.euler_characteristic()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::triangulation::validate_manifold;

    #[test]
    fn subdivision_counts() {
        let b = fixtures::ball();
        let s = barycentric_subdivide(&b);
        assert_eq!(s.num_tets(), 24);
        let ss = barycentric_subdivide(&s);
        assert_eq!(ss.num_tets(), 576);
        let r = validate_manifold(&s);
        assert!(r.valid);
        // 4 vertices + 6 edge midpoints + 4 face centres + 1 centre
        assert_eq!(r.vertices, 15);
    }

    #[test]
    fn subdivision_preserves_validity() {
        for (name, t) in fixtures::all() {
            let s = barycentric_subdivide(&t);
            let r0 = validate_manifold(&t);
            let r = validate_manifold(&s);
            assert!(r.valid, "{name}");
            assert_eq!(r.euler_characteristic, r0.euler_characteristic, "{name}");
            // new vertices: one per old simplex
            assert_eq!(r.vertices, r0.vertices + r0.edges + r0.faces + r0.tets, "{name}");
            assert_eq!(s.is_orientable(), t.is_orientable(), "{name}");
        }
    }

    #[test]
    fn knot_validation() {
        let t = fixtures::s3_two_vertex();
        let cl = t.classes();
        // a loop edge at a single vertex is a simple closed curve
        let loops: Vec<usize> = (0..cl.edge_count()).filter(|&e| cl.edge_ends(e).0 == cl.edge_ends(e).1).collect();
        assert!(!loops.is_empty());
        assert!(KnotSpec::new(vec![loops[0]]).validate(&cl).is_ok());
        assert!(KnotSpec::new(vec![loops[0], loops[0]]).validate(&cl).is_err());
        // a figure eight through one vertex repeats that vertex
        if loops.len() >= 2 {
            assert!(matches!(KnotSpec::new(vec![loops[0], loops[1]]).validate(&cl), Err(TopoError::Input(_))));
        }
    }

    #[test]
    fn implicit_complement_matches_explicit() {
        let t = fixtures::s3_two_vertex();
        let cl = t.classes();
        let e = (0..cl.edge_count()).find(|&e| cl.edge_ends(e).0 == cl.edge_ends(e).1).unwrap();
        let k = KnotSpec::new(vec![e]);
        let t1 = barycentric_subdivide(&t);
        let k1 = k.subdivide(&t, &t1);
        let t2 = barycentric_subdivide(&t1);
        let k2 = k1.subdivide(&t1, &t2);
        assert_eq!(k2.edges.len(), 4);
        let explicit = knot_complement(&t2, &k2).unwrap();
        let lazy = KnotComplement::new(&t, &k).unwrap();
        assert_eq!(lazy.num_tets(), explicit.num_tets());
        assert_eq!(Triangulation::materialize(&lazy).unwrap(), explicit);
        let b = lazy.boundary().unwrap();
        assert_eq!(b.faces.len(), explicit.boundary_faces().len());
        for r in 0..lazy.num_tets() {
            assert_eq!(lazy.rank(lazy.unrank(r)), Some(r));
        }
        assert!(validate_manifold(&explicit).valid);
    }
}
