//! Brute-force topology of small normal surfaces.
//!
//! Builds every elementary disk explicitly and glues them along their arcs.
//! Shares nothing with the interval-pairing path in [`crate::normal`] beyond
//! the coordinate layout, so tests can use it as a reference.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Result, TopoError};
use crate::normal::{NormalVector, DISK_TYPES};
use crate::triangulation::TetComplex;

/// Default limit on the number of disks.
pub const DEFAULT_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleComponent {
    pub vector: NormalVector,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub boundary_curves: usize,
}

struct Dsu {
    parent: Vec<usize>,
    // parity relative to the parent
    flip: Vec<bool>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), flip: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (r, f) = self.find(p);
        self.parent[x] = r;
        self.flip[x] ^= f;
        (r, self.flip[x])
    }

    /// Joins with the constraint `side(a) ^ side(b) == odd`; false on a
    /// contradiction.
    fn union(&mut self, a: usize, b: usize, odd: bool) -> bool {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            return fa ^ fb == odd;
        }
        self.parent[rb] = ra;
        self.flip[rb] = fa ^ fb ^ odd;
        true
    }
}

fn quad_pairs(q: usize) -> ((u8, u8), (u8, u8)) {
    let p = q as u8 + 1;
    let mut rest = (1..4u8).filter(|&v| v != p);
    ((0, p), (rest.next().unwrap(), rest.next().unwrap()))
}

/// Corners of the disk in cyclic order, as tetrahedron edges `(from, to)`
/// with `from` on the cut-off side.
fn cycle(ty: usize) -> Vec<(u8, u8)> {
    if ty < 4 {
        let v = ty as u8;
        (0..4u8).filter(|&u| u != v).map(|u| (v, u)).collect()
    } else {
        let ((p, q), (r, s)) = quad_pairs(ty - 4);
        vec![(p, r), (p, s), (q, s), (q, r)]
    }
}

struct Disk {
    tet: usize,
    ty: usize,
    /// 1-based index among disks of this type, counted from vertex `ty` for
    /// triangles and from the side holding vertex 0 for quadrilaterals.
    k: usize,
}

/// Position from `corner` of the arc that disk `d` has in face `f`, if any.
fn arc_position(d: &Disk, coords: &[usize; DISK_TYPES], f: u8) -> Option<(u8, usize)> {
    if d.ty < 4 {
        let v = d.ty as u8;
        return (f != v).then_some((v, d.k));
    }
    let ((p, q), (r, s)) = quad_pairs(d.ty - 4);
    let n = coords[d.ty];
    // corner cut off in face f is the vertex alone on its side
    let (corner, j) = match f {
        _ if f == p => (q, d.k),
        _ if f == q => (p, d.k),
        _ if f == r => (s, n + 1 - d.k),
        _ => (r, n + 1 - d.k),
    };
    Some((corner, coords[corner as usize] + j))
}

/// Splits `v` into connected components and computes each one's topology
/// directly from its disks. Assumes `v` is admissible.
pub fn components<C: TetComplex + ?Sized>(c: &C, v: &NormalVector, cap: usize) -> Result<Vec<OracleComponent>> {
    let mut small: BTreeMap<usize, [usize; DISK_TYPES]> = BTreeMap::new();
    let mut total = 0usize;
    for (x, d) in v.iter() {
        let mut a = [0usize; DISK_TYPES];
        for i in 0..DISK_TYPES {
            a[i] = d[i].to_usize().filter(|n| *n <= cap).ok_or_else(|| TopoError::Capacity("too many disks for the oracle".into()))?;
            total += a[i];
        }
        if total > cap {
            return Err(TopoError::Capacity(format!("more than {cap} disks")));
        }
        small.insert(x, a);
    }
    let mut disks = Vec::with_capacity(total);
    for (&x, a) in &small {
        for ty in 0..DISK_TYPES {
            for k in 1..=a[ty] {
                disks.push(Disk { tet: x, ty, k });
            }
        }
    }
    // arc (tet, face, corner, position) -> disk
    let mut arcs: HashMap<(usize, u8, u8, usize), usize> = HashMap::new();
    for (i, d) in disks.iter().enumerate() {
        for f in 0..4u8 {
            if let Some((corner, j)) = arc_position(d, &small[&d.tet], f) {
                arcs.insert((d.tet, f, corner, j), i);
            }
        }
    }

    // direction of the arc in face f under the disk's cyclic order
    let direction = |d: &Disk, corner: u8, f: u8| -> (u8, u8) {
        let cyc = cycle(d.ty);
        let pos = |e: (u8, u8)| cyc.iter().position(|&(a, b)| (a == e.0 && b == e.1) || (a == e.1 && b == e.0)).unwrap();
        let (u1, u2) = {
            let mut it = (0..4u8).filter(|&u| u != f && u != corner);
            (it.next().unwrap(), it.next().unwrap())
        };
        let (i1, i2) = (pos((corner, u1)), pos((corner, u2)));
        if (i1 + 1) % cyc.len() == i2 {
            (u1, u2)
        } else {
            (u2, u1)
        }
    };

    let mut dsu = Dsu::new(disks.len());
    let mut bad = vec![false; disks.len()];
    let mut boundary_arcs: Vec<(usize, usize, u8, u8, usize)> = Vec::new();
    for (&(x, f, corner, j), &i) in &arcs {
        match c.gluing(x, f) {
            None => boundary_arcs.push((i, x, f, corner, j)),
            Some(g) => {
                if (g.tet, g.face) < (x, f) {
                    continue;
                }
                let gc = g.perm.apply(corner);
                let Some(&other) = arcs.get(&(g.tet, g.face, gc, j)) else {
                    return Err(TopoError::Input(format!("arc in tetrahedron {x} face {f} has no partner")));
                };
                let (u1, _) = direction(&disks[i], corner, f);
                let (w1, _) = direction(&disks[other], gc, g.face);
                let same = g.perm.apply(u1) == w1;
                if !dsu.union(i, other, same) {
                    bad[i] = true;
                }
            }
        }
    }

    // points on edges: (tet, lower vertex, upper vertex, position from lower)
    let weight = |x: usize, a: u8, b: u8| -> usize {
        let d = &small[&x];
        let skip = crate::normal::quad_of(a, b);
        d[a as usize] + d[b as usize] + (0..3).filter(|&q| q != skip).map(|q| d[4 + q]).sum::<usize>()
    };
    let point = |x: usize, a: u8, b: u8, j: usize| -> (usize, u8, u8, usize) {
        if a < b {
            (x, a, b, j)
        } else {
            (x, b, a, weight(x, a, b) + 1 - j)
        }
    };
    let mut point_ids: HashMap<(usize, u8, u8, usize), usize> = HashMap::new();
    let mut point_disk: Vec<usize> = Vec::new();
    let mut arc_points: Vec<[usize; 2]> = Vec::with_capacity(arcs.len());
    let mut arc_keys: Vec<(usize, u8, u8, usize)> = arcs.keys().copied().collect();
    arc_keys.sort_unstable();
    let mut arc_index: HashMap<(usize, u8, u8, usize), usize> = HashMap::new();
    for key in &arc_keys {
        let (x, f, corner, j) = *key;
        let mut ends = [0; 2];
        let mut it = (0..4u8).filter(|&u| u != f && u != corner);
        for end in &mut ends {
            let u = it.next().unwrap();
            let p = point(x, corner, u, j);
            let n = point_ids.len();
            *end = *point_ids.entry(p).or_insert_with(|| {
                point_disk.push(arcs[key]);
                n
            });
        }
        arc_index.insert(*key, arc_points.len());
        arc_points.push(ends);
    }
    // glue points across faces
    let mut pts = crate::triangulation::Dsu::new(point_ids.len());
    let mut arc_dsu = crate::triangulation::Dsu::new(arc_points.len());
    for key in &arc_keys {
        let (x, f, corner, j) = *key;
        let Some(g) = c.gluing(x, f) else { continue };
        let gc = g.perm.apply(corner);
        let partner = (g.tet, g.face, gc, j);
        arc_dsu.union(arc_index[key], arc_index[&partner]);
        for u in (0..4u8).filter(|&u| u != f && u != corner) {
            let here = point_ids[&point(x, corner, u, j)];
            let there = point_ids[&point(g.tet, gc, g.perm.apply(u), j)];
            pts.union(here, there);
        }
    }

    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_of = vec![0; disks.len()];
    for i in 0..disks.len() {
        let (r, _) = dsu.find(i);
        let n = roots.len();
        comp_of[i] = *roots.entry(r).or_insert(n);
    }
    let m = roots.len();
    let mut chi = vec![0i64; m];
    let mut orientable = vec![true; m];
    let mut entries: Vec<Vec<(usize, [BigUint; DISK_TYPES])>> = vec![Vec::new(); m];
    for (i, d) in disks.iter().enumerate() {
        let k = comp_of[i];
        chi[k] += 1;
        if bad[i] {
            orientable[k] = false;
        }
        let mut u: [BigUint; DISK_TYPES] = Default::default();
        u[d.ty] = BigUint::from(1u8);
        entries[k].push((d.tet, u));
    }
    for p in 0..point_ids.len() {
        if pts.find(p) == p {
            chi[comp_of[point_disk[p]]] += 1;
        }
    }
    for (a, key) in arc_keys.iter().enumerate() {
        if arc_dsu.find(a) == a {
            chi[comp_of[arcs[key]]] -= 1;
        }
    }

    // boundary curves: boundary arcs joined at shared boundary points
    let mut curves = crate::triangulation::Dsu::new(boundary_arcs.len());
    let mut at_point: HashMap<usize, usize> = HashMap::new();
    for (b, &(_, x, f, corner, j)) in boundary_arcs.iter().enumerate() {
        for end in arc_points[arc_index[&(x, f, corner, j)]] {
            let p = pts.find(end);
            if let Some(&other) = at_point.get(&p) {
                curves.union(b, other);
            } else {
                at_point.insert(p, b);
            }
        }
    }
    let mut boundary = vec![0usize; m];
    for b in 0..boundary_arcs.len() {
        if curves.find(b) == b {
            boundary[comp_of[boundary_arcs[b].0]] += 1;
        }
    }

    let t = v.num_tets();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        out.push(OracleComponent {
            vector: NormalVector::from_tets(t, std::mem::take(&mut entries[k]))?,
            euler_characteristic: chi[k],
            orientable: orientable[k],
            boundary_curves: boundary[k],
        });
    }
    out.sort_by_key(|c| c.vector.to_dense());
    Ok(out)
}
