//! ONE-IN-THREE SAT instances compiled into knots in closed 3-manifolds.
//!
//! An instance with `n` variables and `m` clauses becomes a triangulated
//! manifold `M` and a knot `K` that bounds an orientable surface of genus
//! `n + m` when the instance is satisfiable. The construction:
//!
//! 1. A branching surface: a planar base piece `F0` with boundary curves
//!    `K, u_1..u_n, c_1..c_m`, and for each literal a genus one piece with one
//!    boundary curve on its variable plus one per occurrence of the literal.
//! 2. Thickening: every triangle becomes a prism. The base is five prisms
//!    thick; a literal piece is one prism thick and its boundary walls are
//!    glued to the base's walls, at layer 0 (`u_i`) or 4 (`¬u_i`) on variable
//!    curves and at layer `2p` on clause curves for an occurrence in position
//!    `p`.
//! 3. Doubling the result along its boundary, then cutting each prism into
//!    14 tetrahedra.
//!
//! The knot is the base's boundary curve `K` on the bottom of layer 0.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Result, TopoError};
use crate::normal::{boundary_curve, quad_of, NormalVector, TetCoords};
use crate::perm::{Perm4, ALL};
use crate::subdivision::{BoundarySurface, KnotComplement, KnotSpec};
use crate::triangulation::{edge_index, Gluing, TetComplex, Triangulation};

/// Largest `n` the exhaustive solver accepts.
pub const ORACLE_CAP: usize = 24;

/// Variable `var` (0-based), possibly negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn is_true(&self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }

    /// Signed 1-based form used by DIMACS.
    pub fn to_signed(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    fn from_signed(x: i64, n: usize) -> Result<Self> {
        let v = x.unsigned_abs() as usize;
        if x == 0 || v > n {
            return Err(TopoError::Input(format!("literal {x} out of range for {n} variables")));
        }
        Ok(Literal { var: v - 1, negated: x < 0 })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬u{}", self.var + 1)
        } else {
            write!(f, "u{}", self.var + 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub n: usize,
    pub clauses: Vec<[Literal; 3]>,
}

#[derive(Serialize, Deserialize)]
struct CnfJson {
    n: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfInstance {
    pub fn new(n: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for c in &clauses {
            if let Some(l) = c.iter().find(|l| l.var >= n) {
                return Err(TopoError::Input(format!("literal {l} out of range for {n} variables")));
            }
        }
        Ok(CnfInstance { n, clauses })
    }

    /// Builds from signed 1-based literals.
    pub fn from_signed(n: usize, clauses: &[[i64; 3]]) -> Result<Self> {
        let cs = clauses
            .iter()
            .map(|c| Ok([Literal::from_signed(c[0], n)?, Literal::from_signed(c[1], n)?, Literal::from_signed(c[2], n)?]))
            .collect::<Result<_>>()?;
        Self::new(n, cs)
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// DIMACS CNF restricted to clauses of three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut lits: Vec<i64> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(TopoError::Input(format!("bad problem line: {line}")));
                }
                let n = parts[2].parse().map_err(|_| TopoError::Input(format!("bad variable count: {}", parts[2])))?;
                let m = parts[3].parse().map_err(|_| TopoError::Input(format!("bad clause count: {}", parts[3])))?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(TopoError::Input("clause before the problem line".into()));
            }
            for tok in line.split_whitespace() {
                lits.push(tok.parse().map_err(|_| TopoError::Input(format!("bad literal: {tok}")))?);
            }
        }
        let (n, m) = header.ok_or_else(|| TopoError::Input("missing problem line".into()))?;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for x in lits {
            if x == 0 {
                if cur.len() != 3 {
                    return Err(TopoError::Input(format!("clause {} has {} literals, expected 3", clauses.len() + 1, cur.len())));
                }
                clauses.push([cur[0], cur[1], cur[2]]);
                cur.clear();
            } else {
                cur.push(x);
            }
        }
        if !cur.is_empty() {
            return Err(TopoError::Input("last clause is not terminated by 0".into()));
        }
        if clauses.len() != m {
            return Err(TopoError::Input(format!("problem line promises {m} clauses, found {}", clauses.len())));
        }
        Self::from_signed(n, &clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0].to_signed(), c[1].to_signed(), c[2].to_signed()));
        }
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CnfJson = serde_json::from_str(text)?;
        let mut clauses = Vec::with_capacity(raw.clauses.len());
        for (j, c) in raw.clauses.iter().enumerate() {
            if c.len() != 3 {
                return Err(TopoError::Input(format!("clause {} has {} literals, expected 3", j + 1, c.len())));
            }
            clauses.push([c[0], c[1], c[2]]);
        }
        Self::from_signed(raw.n, &clauses)
    }

    pub fn to_json(&self) -> String {
        let raw = CnfJson { n: self.n, clauses: self.clauses.iter().map(|c| c.iter().map(|l| l.to_signed()).collect()).collect() };
        serde_json::to_string(&raw).expect("serializable")
    }

    /// Parses DIMACS or JSON, whichever the text looks like.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse_dimacs(text)
        }
    }

    /// Every clause has exactly one true literal.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.n && self.clauses.iter().all(|c| c.iter().filter(|l| l.is_true(assignment)).count() == 1)
    }

    /// Occurrences of `lit` as (clause, position), in clause order.
    pub fn occurrences(&self, lit: Literal) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, c) in self.clauses.iter().enumerate() {
            for (p, l) in c.iter().enumerate() {
                if *l == lit {
                    out.push((j, p));
                }
            }
        }
        out
    }
}

/// All satisfying assignments by exhaustive search, in increasing binary
/// order with `u1` as the lowest bit.
pub fn one_in_three_oracle(inst: &CnfInstance) -> Result<Vec<Vec<bool>>> {
    if inst.n > ORACLE_CAP {
        return Err(TopoError::Capacity(format!("{} variables exceed the exhaustive cap of {ORACLE_CAP}", inst.n)));
    }
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << inst.n) {
        let a: Vec<bool> = (0..inst.n).map(|i| bits >> i & 1 == 1).collect();
        if inst.is_satisfied_by(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

/// What a boundary curve of a piece is glued to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Knot,
    Variable(usize),
    Clause(usize),
}

/// A side of a triangle in a piece. Side `k` of a triangle joins its corners
/// `k+1` and `k+2` (mod 3); glued sides always pair corner `k+1` with the
/// partner's corner `k'+2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Glued { tri: usize, side: u8 },
    /// Edge `edge` of boundary curve `component`, running from corner `k+1`
    /// to corner `k+2` along the boundary orientation.
    Boundary { component: usize, edge: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Base,
    Literal(Literal),
}

/// A triangulated compact surface: a polygon with paired sides, fanned from
/// one corner. Each boundary curve has three vertices and there are no
/// interior vertices, so a genus `g` piece with `c` boundary curves has
/// `4g + 5c - 4` triangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub kind: PieceKind,
    pub genus: usize,
    pub boundary: Vec<Label>,
    pub triangles: Vec<[Side; 3]>,
    /// Prisms stacked over each triangle.
    pub layers: usize,
}

#[derive(Clone, Copy, Debug)]
enum Letter {
    Paired(usize),
    Bd(usize, u8),
}

/// Triangles of the fan over the polygon word
/// `[a1 b1 a1⁻¹ b1⁻¹]… β0 β0 β0 [x_j β_j β_j β_j x_j⁻¹]…`.
pub fn piece_triangles(genus: usize, boundaries: usize) -> Vec<[Side; 3]> {
    assert!(boundaries >= 1, "pieces have boundary");
    let mut word = Vec::new();
    for h in 0..genus {
        let (a, b) = (2 * h, 2 * h + 1);
        word.extend([Letter::Paired(a), Letter::Paired(b), Letter::Paired(a), Letter::Paired(b)]);
    }
    word.extend((0..3).map(|e| Letter::Bd(0, e)));
    for j in 1..boundaries {
        let x = 2 * genus + j - 1;
        word.push(Letter::Paired(x));
        word.extend((0..3).map(|e| Letter::Bd(j, e)));
        word.push(Letter::Paired(x));
    }
    let l = word.len();
    // polygon side k (1-based) sits in this triangle and side
    let place = |k: usize| -> (usize, u8) {
        if k == 1 {
            (0, 2)
        } else if k == l {
            (l - 3, 1)
        } else {
            (k - 2, 0)
        }
    };
    let mut tris = vec![[Side::Boundary { component: usize::MAX, edge: 0 }; 3]; l - 2];
    for i in 0..l - 3 {
        tris[i][1] = Side::Glued { tri: i + 1, side: 2 };
        tris[i + 1][2] = Side::Glued { tri: i, side: 1 };
    }
    let mut first: HashMap<usize, (usize, u8)> = HashMap::new();
    for (k, letter) in word.iter().enumerate() {
        let (t, s) = place(k + 1);
        match *letter {
            Letter::Bd(c, e) => tris[t][s as usize] = Side::Boundary { component: c, edge: e },
            Letter::Paired(id) => {
                if let Some((t2, s2)) = first.remove(&id) {
                    tris[t][s as usize] = Side::Glued { tri: t2, side: s2 };
                    tris[t2][s2 as usize] = Side::Glued { tri: t, side: s };
                } else {
                    first.insert(id, (t, s));
                }
            }
        }
    }
    tris
}

/// Pieces and where their boundary curves go.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingSurface {
    /// `F0` first, then `F_{u_i}`, `F_{¬u_i}` for each variable in turn.
    pub pieces: Vec<Piece>,
    /// (piece, boundary component, base layer): a literal piece's boundary
    /// glued to the base's wall for its label, at that layer.
    pub attachments: Vec<(usize, usize, usize)>,
}

impl BranchingSurface {
    /// Piece index of a literal.
    pub fn literal_piece(lit: Literal) -> usize {
        1 + 2 * lit.var + lit.negated as usize
    }

    pub fn triangle_count(&self) -> usize {
        self.pieces.iter().map(|p| p.triangles.len()).sum()
    }

    /// Piece boundary curves glued along each label, counting the base's own.
    pub fn curves_along(&self, label: Label) -> usize {
        let base = self.pieces[0].boundary.iter().filter(|&&l| l == label).count();
        base + self.attachments.iter().filter(|&&(p, c, _)| self.pieces[p].boundary[c] == label).count()
    }
}

pub fn build_branching_surface(inst: &CnfInstance) -> BranchingSurface {
    let (n, m) = (inst.n, inst.m());
    let mut base_labels = vec![Label::Knot];
    base_labels.extend((0..n).map(Label::Variable));
    base_labels.extend((0..m).map(Label::Clause));
    let mut pieces = vec![Piece { kind: PieceKind::Base, genus: 0, triangles: piece_triangles(0, base_labels.len()), boundary: base_labels, layers: 5 }];
    let mut attachments = Vec::new();
    for var in 0..n {
        for lit in [Literal::pos(var), Literal::neg(var)] {
            let occ = inst.occurrences(lit);
            let mut labels = vec![Label::Variable(var)];
            labels.extend(occ.iter().map(|&(j, _)| Label::Clause(j)));
            let idx = pieces.len();
            attachments.push((idx, 0, if lit.negated { 4 } else { 0 }));
            for (c, &(_, p)) in occ.iter().enumerate() {
                attachments.push((idx, c + 1, 2 * p));
            }
            pieces.push(Piece { kind: PieceKind::Literal(lit), genus: 1, triangles: piece_triangles(1, labels.len()), boundary: labels, layers: 1 });
        }
    }
    BranchingSurface { pieces, attachments }
}

// Prism vertex labels: centre, rectangle centres, bottom and top corners.
const CENTRE: u8 = 0;
const fn rect(s: u8) -> u8 {
    1 + s
}
const fn bot(i: u8) -> u8 {
    4 + i
}
const fn top(i: u8) -> u8 {
    7 + i
}

pub const TETS_PER_PRISM: usize = 14;

/// The 14 tetrahedra of a prism as labels; local vertex 0 is always the
/// centre, so face 0 is on the prism's boundary.
fn prism_tets() -> [[u8; 4]; TETS_PER_PRISM] {
    let mut out = [[0u8; 4]; TETS_PER_PRISM];
    out[0] = [CENTRE, bot(0), bot(1), bot(2)];
    out[1] = [CENTRE, top(0), top(1), top(2)];
    for s in 0..3u8 {
        let (i, j) = ((s + 1) % 3, (s + 2) % 3);
        let ring = [(bot(i), bot(j)), (bot(j), top(j)), (top(j), top(i)), (top(i), bot(i))];
        for (e, &(x, y)) in ring.iter().enumerate() {
            out[2 + 4 * s as usize + e] = [CENTRE, rect(s), x, y];
        }
    }
    out
}

/// Where a prism sits in the branching surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrismInfo {
    pub piece: usize,
    pub layer: usize,
    pub triangle: usize,
}

/// Output of [`reduce`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub triangulation: Triangulation,
    pub knot: KnotSpec,
    pub genus: usize,
    pub surface: BranchingSurface,
    /// Prisms of the first copy; tetrahedron `14p + i` of either copy lies
    /// in prism `p`, and the second copy starts at `14 * prisms.len()`.
    pub prisms: Vec<PrismInfo>,
    prism_of: HashMap<(usize, usize, usize), usize>,
}

struct Builder {
    tets: Vec<[u8; 4]>,
    gluings: Vec<[Option<Gluing>; 4]>,
}

impl Builder {
    /// Glues face `fa` of `a` to the face of `b` whose labels are the images
    /// of its labels under `map`.
    fn glue(&mut self, a: usize, fa: u8, b: usize, map: impl Fn(u8) -> u8) {
        let (la, lb) = (self.tets[a], self.tets[b]);
        let mut images = [0u8; 4];
        for v in (0..4).filter(|&v| v != fa as usize) {
            let target = map(la[v]);
            images[v] = lb.iter().position(|&x| x == target).expect("label present") as u8;
        }
        images[fa as usize] = 6 - images.iter().enumerate().filter(|&(v, _)| v != fa as usize).map(|(_, &i)| i).sum::<u8>();
        let perm = Perm4::new(images).expect("labels distinct");
        let fb = perm.apply(fa);
        debug_assert!(self.gluings[a][fa as usize].is_none() && self.gluings[b][fb as usize].is_none());
        self.gluings[a][fa as usize] = Some(Gluing { tet: b, face: fb, perm });
        self.gluings[b][fb as usize] = Some(Gluing { tet: a, face: fa, perm: perm.inverse() });
    }

    /// Glues side `s` of prism `pa` to side `t` of prism `pb`, pairing corner
    /// `s+1` with `t+2` and keeping levels.
    fn glue_sides(&mut self, pa: usize, s: u8, pb: usize, t: u8) {
        let corner = move |i: u8| if i == (s + 1) % 3 { (t + 2) % 3 } else { (t + 1) % 3 };
        let map = move |l: u8| match l {
            CENTRE => CENTRE,
            1..=3 => rect(t),
            4..=6 => bot(corner(l - 4)),
            _ => top(corner(l - 7)),
        };
        for e in 0..4 {
            let a = pa * TETS_PER_PRISM + 2 + 4 * s as usize + e;
            let want: HashSet<u8> = self.tets[a][2..].iter().map(|&l| map(l)).collect();
            let b = (0..4)
                .map(|f| pb * TETS_PER_PRISM + 2 + 4 * t as usize + f)
                .find(|&b| self.tets[b][2..].iter().copied().collect::<HashSet<u8>>() == want)
                .unwrap();
            self.glue(a, 0, b, map);
        }
    }
}

/// Compiles an instance into `(M, K, g)` with `g = n + m`.
pub fn reduce(inst: &CnfInstance) -> Result<Reduction> {
    let surface = build_branching_surface(inst);
    let mut prisms = Vec::new();
    let mut prism_of = HashMap::new();
    for (pi, piece) in surface.pieces.iter().enumerate() {
        for layer in 0..piece.layers {
            for tri in 0..piece.triangles.len() {
                prism_of.insert((pi, layer, tri), prisms.len());
                prisms.push(PrismInfo { piece: pi, layer, triangle: tri });
            }
        }
    }
    let template = prism_tets();
    let half = prisms.len() * TETS_PER_PRISM;
    let mut b = Builder { tets: (0..2 * prisms.len()).flat_map(|_| template).collect(), gluings: vec![[None; 4]; 2 * half] };

    // inside each prism: faces with equal labels
    let mut inner: Vec<(usize, u8, usize)> = Vec::new();
    for a in 0..TETS_PER_PRISM {
        for c in a + 1..TETS_PER_PRISM {
            for fa in 0..4u8 {
                let face: HashSet<u8> = (0..4).filter(|&v| v != fa as usize).map(|v| template[a][v]).collect();
                if (0..4).any(|fc| (0..4).filter(|&v| v != fc).map(|v| template[c][v]).collect::<HashSet<u8>>() == face) {
                    inner.push((a, fa, c));
                }
            }
        }
    }
    for p in 0..2 * prisms.len() {
        for &(a, fa, c) in &inner {
            b.glue(p * TETS_PER_PRISM + a, fa, p * TETS_PER_PRISM + c, |l| l);
        }
    }

    let base = &surface.pieces[0];
    let sides_of = |piece: &Piece| -> HashMap<(usize, u8), (usize, u8)> {
        let mut out = HashMap::new();
        for (t, sides) in piece.triangles.iter().enumerate() {
            for (s, side) in sides.iter().enumerate() {
                if let Side::Boundary { component, edge } = *side {
                    out.insert((component, edge), (t, s as u8));
                }
            }
        }
        out
    };
    let base_sides = sides_of(base);
    for copy in 0..2 {
        let off = copy * prisms.len();
        // side gluings within pieces
        for (&(pi, layer, tri), &p) in prism_of.iter().collect::<BTreeMap<_, _>>() {
            for (s, side) in surface.pieces[pi].triangles[tri].iter().enumerate() {
                if let Side::Glued { tri: t2, side: s2 } = *side {
                    if (t2, s2) > (tri, s as u8) {
                        b.glue_sides(off + p, s as u8, off + prism_of[&(pi, layer, t2)], s2);
                    }
                }
            }
        }
        // stacking the base
        for layer in 0..base.layers - 1 {
            for tri in 0..base.triangles.len() {
                let (lo, hi) = (off + prism_of[&(0, layer, tri)], off + prism_of[&(0, layer + 1, tri)]);
                b.glue(lo * TETS_PER_PRISM + 1, 0, hi * TETS_PER_PRISM, |l| if l == CENTRE { CENTRE } else { l - 3 });
            }
        }
        // literal walls onto base walls, reversing the boundary orientation
        for &(pi, comp, layer) in &surface.attachments {
            let piece = &surface.pieces[pi];
            let target = base.boundary.iter().position(|&l| l == piece.boundary[comp]).unwrap();
            let own = sides_of(piece);
            for e in 0..3u8 {
                let (t, s) = own[&(comp, e)];
                let (bt, bs) = base_sides[&(target, 2 - e)];
                b.glue_sides(off + prism_of[&(pi, 0, t)], s, off + prism_of[&(0, layer, bt)], bs);
            }
        }
    }
    // doubling
    for x in 0..half {
        for f in 0..4u8 {
            if b.gluings[x][f as usize].is_none() {
                b.glue(x, f, x + half, |l| l);
            }
        }
    }
    let triangulation = Triangulation::new(b.gluings)?;

    let cl = triangulation.classes();
    let mut knot = Vec::new();
    for e in 0..3u8 {
        let (t, s) = base_sides[&(0, e)];
        let x = prism_of[&(0, 0, t)] * TETS_PER_PRISM;
        let (i, j) = ((s + 1) % 3, (s + 2) % 3);
        knot.push(cl.edge_of[x][edge_index(1 + i, 1 + j) as usize]);
    }
    knot.sort_unstable();
    Ok(Reduction { triangulation, knot: KnotSpec::new(knot), genus: inst.n + inst.m(), surface, prisms, prism_of })
}

impl Reduction {
    pub fn to_json(&self) -> String {
        let t: serde_json::Value = serde_json::from_str(&self.triangulation.to_json()).expect("valid json");
        serde_json::to_string(&serde_json::json!({
            "triangulation": t,
            "knot": self.knot.edges,
            "genus": self.genus,
        }))
        .expect("serializable")
    }

    fn tet(&self, copy: usize, piece: usize, layer: usize, tri: usize, local: usize) -> usize {
        copy * self.prisms.len() * TETS_PER_PRISM + self.prism_of[&(piece, layer, tri)] * TETS_PER_PRISM + local
    }

    /// The spanning surface for a satisfying assignment, as faces of the
    /// triangulation: the bottom of the base, the bottoms of the chosen
    /// literal pieces, and the base's walls up to where each chosen piece is
    /// attached.
    pub fn witness_faces(&self, inst: &CnfInstance, assignment: &[bool]) -> Result<Vec<(usize, u8)>> {
        if assignment.len() != inst.n {
            return Err(TopoError::Witness(format!("assignment has {} values for {} variables", assignment.len(), inst.n)));
        }
        if !inst.is_satisfied_by(assignment) {
            let j = inst.clauses.iter().position(|c| c.iter().filter(|l| l.is_true(assignment)).count() != 1).unwrap();
            return Err(TopoError::Witness(format!("clause {} does not have exactly one true literal", j + 1)));
        }
        let base = &self.surface.pieces[0];
        let mut faces = Vec::new();
        for tri in 0..base.triangles.len() {
            faces.push((self.tet(0, 0, 0, tri, 0), 0));
        }
        let mut wall_height: HashMap<Label, usize> = HashMap::new();
        for var in 0..inst.n {
            let lit = if assignment[var] { Literal::pos(var) } else { Literal::neg(var) };
            let pi = BranchingSurface::literal_piece(lit);
            for tri in 0..self.surface.pieces[pi].triangles.len() {
                faces.push((self.tet(0, pi, 0, tri, 0), 0));
            }
            for &(p, comp, layer) in self.surface.attachments.iter().filter(|a| a.0 == pi) {
                wall_height.insert(self.surface.pieces[p].boundary[comp], layer);
            }
        }
        for (t, sides) in base.triangles.iter().enumerate() {
            for (s, side) in sides.iter().enumerate() {
                let Side::Boundary { component, .. } = *side else { continue };
                let height = if component == 0 { 0 } else { wall_height[&base.boundary[component]] };
                for layer in 0..height {
                    for e in 0..4 {
                        faces.push((self.tet(0, 0, layer, t, 2 + 4 * s + e), 0));
                    }
                }
            }
        }
        faces.sort_unstable();
        Ok(faces)
    }

    /// A certificate for `(M, K, n + m)` from a satisfying assignment.
    pub fn assemble(&self, inst: &CnfInstance, assignment: &[bool]) -> Result<Certificate> {
        let kc = KnotComplement::new(&self.triangulation, &self.knot)?;
        self.assemble_in(&kc, inst, assignment)
    }

    /// As [`Reduction::assemble`], reusing a built complement.
    pub fn assemble_in(&self, kc: &KnotComplement, inst: &CnfInstance, assignment: &[bool]) -> Result<Certificate> {
        let faces = self.witness_faces(inst, assignment)?;
        let w = self.push_off(kc, &faces, assignment)?;
        let surface = kc.boundary()?;
        let parity_cycle = odd_cycle(&surface, &w)?;
        Ok(Certificate { w, parity_cycle })
    }

    /// Normal coordinates in the knot complement of the frontier of a
    /// one-sided neighbourhood of the twice subdivided surface. The side is
    /// the first copy's tetrahedra in the base and the chosen pieces.
    fn push_off(&self, kc: &KnotComplement, faces: &[(usize, u8)], assignment: &[bool]) -> Result<NormalVector> {
        let t = &self.triangulation;
        let cl = t.classes();
        let mut sf = HashSet::new();
        let mut se = HashSet::new();
        let mut sv = HashSet::new();
        for &(x, f) in faces {
            sf.insert(cl.face_of[x][f as usize]);
            for a in (0..4u8).filter(|&a| a != f) {
                sv.insert(cl.vertex_of[x][a as usize]);
                for b in (a + 1..4).filter(|&b| b != f) {
                    se.insert(cl.edge_of[x][edge_index(a, b) as usize]);
                }
            }
        }
        let chosen: HashSet<usize> = (0..assignment.len())
            .map(|v| BranchingSurface::literal_piece(if assignment[v] { Literal::pos(v) } else { Literal::neg(v) }))
            .chain([0])
            .collect();
        let half = self.prisms.len() * TETS_PER_PRISM;
        let mut entries: Vec<(usize, TetCoords)> = Vec::new();
        for x in 0..half {
            if !chosen.contains(&self.prisms[x / TETS_PER_PRISM].piece) || !(0..4).any(|v| sv.contains(&cl.vertex_of[x][v])) {
                continue;
            }
            for (si, sigma) in ALL.iter().enumerate() {
                let s = |i: u8| sigma.apply(i);
                // largest i with the face on σ(0..=i) in the surface
                let level: i8 = if !sv.contains(&cl.vertex_of[x][s(0) as usize]) {
                    -1
                } else if !se.contains(&cl.edge_of[x][edge_index(s(0), s(1)) as usize]) {
                    0
                } else if !sf.contains(&cl.face_of[x][s(3) as usize]) {
                    1
                } else {
                    2
                };
                if level < 0 {
                    continue;
                }
                let t1 = x * 24 + si;
                for (pi_idx, pi) in ALL.iter().enumerate() {
                    let mut inside = [false; 4];
                    let mut top = 0u8;
                    for j in 0..4u8 {
                        top = top.max(pi.apply(j));
                        inside[j as usize] = top as i8 <= level;
                    }
                    let count = inside.iter().filter(|&&b| b).count();
                    if count == 0 {
                        continue;
                    }
                    let Some(r) = kc.rank(t1 * 24 + pi_idx) else { continue };
                    let members: Vec<u8> = (0..4u8).filter(|&j| inside[j as usize]).collect();
                    let ty = match count {
                        1 => members[0] as usize,
                        2 => 4 + quad_of(members[0], members[1]),
                        3 => (0..4u8).find(|j| !inside[*j as usize]).unwrap() as usize,
                        _ => return Err(TopoError::Invariant("a tetrahedron lies in the surface".into())),
                    };
                    let mut d: TetCoords = Default::default();
                    d[ty] = BigUint::one();
                    entries.push((r, d));
                }
            }
        }
        NormalVector::from_tets(kc.num_tets(), entries)
    }
}

/// A closed walk on the boundary surface meeting the curve of `w` an odd
/// number of times: a fundamental cycle of a breadth-first spanning tree.
pub fn odd_cycle(surface: &BoundarySurface, w: &NormalVector) -> Result<Vec<u64>> {
    let weights = boundary_curve(surface, w).edge_weights(surface)?;
    let odd = |code: u64| weights.get(&code).is_some_and(|x| x.bit(0));
    let mut codes: Vec<u64> = surface.edges.keys().copied().collect();
    codes.sort_unstable();
    let mut adj: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for &c in &codes {
        let (a, b) = surface.edges[&c];
        adj.entry(a).or_default().push((b, c));
        if a != b {
            adj.entry(b).or_default().push((a, c));
        }
    }
    let Some(&start) = adj.keys().min() else {
        return Err(TopoError::Witness("empty boundary".into()));
    };
    // parent edge and parity from the root
    let mut seen: HashMap<usize, (Option<(usize, u64)>, bool)> = HashMap::from([(start, (None, false))]);
    let mut queue = VecDeque::from([start]);
    let mut tree: HashSet<u64> = HashSet::new();
    while let Some(v) = queue.pop_front() {
        let pv = seen[&v].1;
        for &(u, c) in &adj[&v] {
            if let Entry::Vacant(slot) = seen.entry(u) {
                slot.insert((Some((v, c)), pv ^ odd(c)));
                tree.insert(c);
                queue.push_back(u);
            }
        }
    }
    let path_to_root = |mut v: usize| -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        while let Some((p, c)) = seen[&v].0 {
            out.push((v, c));
            v = p;
        }
        out
    };
    for &c in &codes {
        if tree.contains(&c) {
            continue;
        }
        let (a, b) = surface.edges[&c];
        if seen[&a].1 ^ seen[&b].1 ^ odd(c) {
            // a -> root -> b, then b -> a along c, with the common part cut
            let up: Vec<(usize, u64)> = path_to_root(a);
            let down: Vec<(usize, u64)> = path_to_root(b);
            let on_down: HashSet<usize> = down.iter().map(|&(v, _)| v).chain([start]).collect();
            let mut cycle = Vec::new();
            let mut meet = a;
            for &(v, e) in &up {
                if on_down.contains(&v) {
                    meet = v;
                    break;
                }
                cycle.push(e);
                meet = seen[&v].0.unwrap().0;
            }
            let tail: Vec<u64> = down.iter().take_while(|&&(v, _)| v != meet).map(|&(_, e)| e).collect();
            cycle.extend(tail.into_iter().rev());
            cycle.push(c);
            return Ok(cycle);
        }
    }
    Err(TopoError::Witness("boundary curve meets every cycle evenly".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::is_null_homologous;
    use crate::triangulation::{validate_manifold, Dsu};

    fn two_clauses() -> CnfInstance {
        CnfInstance::from_signed(3, &[[1, 2, 3], [1, -2, -3]]).unwrap()
    }

    /// Euler characteristic and boundary curve count of a piece, computed
    /// from its triangle gluings alone.
    fn piece_topology(tris: &[[Side; 3]]) -> (i64, usize) {
        let corner = |t: usize, k: usize| 3 * t + k;
        let mut v = Dsu::new(3 * tris.len());
        let mut glued = 0;
        for (t, sides) in tris.iter().enumerate() {
            for (s, side) in sides.iter().enumerate() {
                if let Side::Glued { tri, side } = *side {
                    let (s2, t2) = (side as usize, tri);
                    v.union(corner(t, (s + 1) % 3), corner(t2, (s2 + 2) % 3));
                    v.union(corner(t, (s + 2) % 3), corner(t2, (s2 + 1) % 3));
                    glued += 1;
                }
            }
        }
        let verts = (0..3 * tris.len()).filter(|&x| v.find(x) == x).count() as i64;
        let edges = 3 * tris.len() as i64 - glued / 2;
        let mut curves: HashSet<usize> = HashSet::new();
        for sides in tris {
            for side in sides {
                if let Side::Boundary { component, .. } = side {
                    curves.insert(*component);
                }
            }
        }
        (verts - edges + tris.len() as i64, curves.len())
    }

    #[test]
    fn piece_templates_have_the_right_topology() {
        for g in 0..4 {
            for c in 1..6 {
                let tris = piece_triangles(g, c);
                assert_eq!(tris.len(), 4 * g + 5 * c - 4);
                let (chi, curves) = piece_topology(&tris);
                assert_eq!(chi, 2 - 2 * g as i64 - c as i64, "g={g} c={c}");
                assert_eq!(curves, c);
                // each boundary curve has its three edges
                for comp in 0..c {
                    let edges: Vec<u8> = tris
                        .iter()
                        .flatten()
                        .filter_map(|s| match s {
                            Side::Boundary { component, edge } if *component == comp => Some(*edge),
                            _ => None,
                        })
                        .collect();
                    assert_eq!(edges.len(), 3);
                }
            }
        }
    }

    #[test]
    fn branching_surface_of_two_clause_instance() {
        let inst = two_clauses();
        let b = build_branching_surface(&inst);
        assert_eq!(b.pieces[0].boundary.len(), 6);
        let u1 = &b.pieces[BranchingSurface::literal_piece(Literal::pos(0))];
        assert_eq!(u1.boundary.len(), 3);
        assert_eq!(u1.triangles.len(), 15);
        for i in 0..inst.n {
            assert_eq!(b.curves_along(Label::Variable(i)), 3);
        }
        for j in 0..inst.m() {
            assert_eq!(b.curves_along(Label::Clause(j)), 4);
        }
        assert_eq!(b.curves_along(Label::Knot), 1);
    }

    #[test]
    fn unused_variable_has_a_one_curve_piece() {
        let inst = CnfInstance::from_signed(4, &[[1, 2, 3]]).unwrap();
        let b = build_branching_surface(&inst);
        let p = &b.pieces[BranchingSurface::literal_piece(Literal::neg(3))];
        assert_eq!(p.boundary, vec![Label::Variable(3)]);
        assert_eq!(p.triangles.len(), 5);
    }

    #[test]
    fn prism_is_fourteen_tets_around_a_centre() {
        let tets = prism_tets();
        assert_eq!(tets.len(), 14);
        // boundary faces: the two ends and four triangles on each rectangle
        let mut faces: HashMap<Vec<u8>, usize> = HashMap::new();
        for t in &tets {
            for f in 0..4 {
                let mut face: Vec<u8> = (0..4).filter(|&v| v != f).map(|v| t[v]).collect();
                face.sort_unstable();
                *faces.entry(face).or_default() += 1;
            }
        }
        assert!(faces.values().all(|&c| c <= 2));
        assert_eq!(faces.values().filter(|&&c| c == 1).count(), 14);
        assert!(tets.iter().all(|t| t[0] == CENTRE));
    }

    #[test]
    fn reduction_of_two_clause_instance() {
        let inst = two_clauses();
        let r = reduce(&inst).unwrap();
        assert_eq!(r.genus, 5);
        assert_eq!(r.triangulation.num_tets(), 980 * 3 + 1120 * 2 + 140);
        let rep = validate_manifold(&r.triangulation);
        assert!(rep.valid && rep.closed, "{:?}", rep.problems);
        assert_eq!(rep.euler_characteristic, 0);
        assert!(r.triangulation.is_orientable());
        assert_eq!(r.knot.edges.len(), 3);
        assert!(is_null_homologous(&r.triangulation, &r.knot).unwrap());
    }

    #[test]
    fn witness_needs_one_in_three() {
        let inst = two_clauses();
        let r = reduce(&inst).unwrap();
        assert!(matches!(r.witness_faces(&inst, &[true, false, false]), Err(TopoError::Witness(_))));
        assert!(matches!(r.witness_faces(&inst, &[true]), Err(TopoError::Witness(_))));
        assert!(r.witness_faces(&inst, &[false, true, false]).is_ok());
    }

    #[test]
    fn witness_faces_form_a_surface_bounded_by_the_knot() {
        let inst = two_clauses();
        let r = reduce(&inst).unwrap();
        let cl = r.triangulation.classes();
        let faces = r.witness_faces(&inst, &[false, true, false]).unwrap();
        let mut count: HashMap<usize, usize> = HashMap::new();
        let mut face_classes = HashSet::new();
        for &(x, f) in &faces {
            assert!(face_classes.insert(cl.face_of[x][f as usize]), "face listed twice");
            for a in (0..4u8).filter(|&a| a != f) {
                for b in (a + 1..4).filter(|&b| b != f) {
                    *count.entry(cl.edge_of[x][edge_index(a, b) as usize]).or_default() += 1;
                }
            }
        }
        let boundary: Vec<usize> = count.iter().filter(|&(_, &c)| c == 1).map(|(&e, _)| e).collect();
        let mut boundary = boundary;
        boundary.sort_unstable();
        assert_eq!(boundary, r.knot.edges);
        assert!(count.values().all(|&c| c <= 2));
        let verts: HashSet<usize> = faces
            .iter()
            .flat_map(|&(x, f)| (0..4).filter(move |&v| v != f as usize).map(move |v| (x, v)))
            .map(|(x, v)| cl.vertex_of[x][v])
            .collect();
        let chi = verts.len() as i64 - count.len() as i64 + faces.len() as i64;
        assert_eq!(chi, 1 - 2 * 5);
    }

    #[test]
    fn oracle_finds_one_hot_assignments() {
        let inst = CnfInstance::from_signed(3, &[[1, 2, 3]]).unwrap();
        let sols = one_in_three_oracle(&inst).unwrap();
        assert_eq!(sols, vec![vec![true, false, false], vec![false, true, false], vec![false, false, true]]);
    }

    #[test]
    fn oracle_handles_contradictory_clauses() {
        // u1 or not u1 holds exactly once, so u2 must be false
        let inst = CnfInstance::from_signed(2, &[[1, -1, 2]]).unwrap();
        assert_eq!(one_in_three_oracle(&inst).unwrap(), vec![vec![false, false], vec![true, false]]);
        // every pair of u1, u2, u3 forced true by extra clauses
        let inst = CnfInstance::from_signed(3, &[[1, 2, 3], [-1, -2, 3], [-1, 2, -3], [1, -2, -3]]).unwrap();
        let brute: Vec<Vec<bool>> = (0..8u32)
            .map(|b| (0..3).map(|i| b >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|a| inst.is_satisfied_by(a))
            .collect();
        assert_eq!(one_in_three_oracle(&inst).unwrap(), brute);
        let inst = CnfInstance::from_signed(2, &[[1, 1, 2], [1, 2, 2]]).unwrap();
        assert!(one_in_three_oracle(&inst).unwrap().is_empty());
    }

    #[test]
    fn oracle_has_a_cap() {
        let inst = CnfInstance::new(ORACLE_CAP + 1, vec![]).unwrap();
        assert!(matches!(one_in_three_oracle(&inst), Err(TopoError::Capacity(_))));
    }

    #[test]
    fn dimacs_and_json_round_trip() {
        let inst = two_clauses();
        assert_eq!(CnfInstance::parse(&inst.to_dimacs()).unwrap(), inst);
        assert_eq!(CnfInstance::parse(&inst.to_json()).unwrap(), inst);
        let text = "c comment\np cnf 3 1\n1 -2\n3 0\n";
        assert_eq!(CnfInstance::parse_dimacs(text).unwrap().clauses[0], [Literal::pos(0), Literal::neg(1), Literal::pos(2)]);
    }

    #[test]
    fn malformed_cnf_is_rejected() {
        for text in ["p cnf 2 1\n1 2 0\n", "p cnf 2 1\n1 2 3 0\n", "1 2 3 0\n", "p cnf 3 2\n1 2 3 0\n", "p cnf 3 1\n1 2 3\n"] {
            assert!(matches!(CnfInstance::parse_dimacs(text), Err(TopoError::Input(_))), "{text}");
        }
        assert!(CnfInstance::from_json(r#"{"n": 2, "clauses": [[1, 2]]}"#).is_err());
        assert!(CnfInstance::from_json(r#"{"n": 2, "clauses": [[1, 2, 0]]}"#).is_err());
    }
}
