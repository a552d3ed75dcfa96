//! Small named triangulations used by tests and the `gen fixture` command.
//! See `docs/fixtures.md` for what each one is and how it was found.

use crate::perm::Perm4;
use crate::triangulation::{Gluing, TetComplex, Triangulation};

type Row = [Option<(usize, u8, [u8; 4])>; 4];

fn build(rows: &[Row]) -> Triangulation {
    let gl = rows
        .iter()
        .map(|row| {
            let mut out = [None; 4];
            for (f, g) in row.iter().enumerate() {
                out[f] = g.map(|(tet, face, p)| Gluing { tet, face, perm: Perm4::new(p).unwrap() });
            }
            out
        })
        .collect();
    Triangulation::new(gl).expect("fixture gluing table")
}

/// One tetrahedron with faces 0↔1 and 2↔3 identified.
fn one_tet(p01: [u8; 4], p23: [u8; 4]) -> Triangulation {
    let a = Perm4::new(p01).unwrap();
    let b = Perm4::new(p23).unwrap();
    build(&[[
        Some((0, 1, p01)),
        Some((0, 0, a.inverse().images())),
        Some((0, 3, p23)),
        Some((0, 2, b.inverse().images())),
    ]])
}

/// A single tetrahedron with no gluings.
pub fn ball() -> Triangulation {
    build(&[[None; 4]])
}

/// One tetrahedron, faces 0 and 1 folded together; a 3-ball with 3 vertices.
pub fn folded_ball() -> Triangulation {
    build(&[[Some((0, 1, [1, 0, 2, 3])), Some((0, 0, [1, 0, 2, 3])), None, None]])
}

/// One tetrahedron, faces 0 and 1 glued with a twist; a solid torus.
pub fn solid_torus() -> Triangulation {
    let p = Perm4::new([1, 2, 3, 0]).unwrap();
    build(&[[Some((0, 1, p.images())), Some((0, 0, p.inverse().images())), None, None]])
}

/// Two tetrahedra forming a solid torus with a one-vertex boundary torus.
pub fn solid_torus_two() -> Triangulation {
    build(&[
        [Some((1, 1, [1, 2, 0, 3])), Some((1, 0, [3, 0, 2, 1])), None, None],
        [Some((0, 1, [1, 3, 2, 0])), Some((0, 0, [2, 0, 1, 3])), Some((1, 3, [0, 1, 3, 2])), Some((1, 2, [0, 1, 3, 2]))],
    ])
}

/// Two tetrahedra forming a 3-ball.
pub fn two_tet_ball() -> Triangulation {
    build(&[
        [Some((1, 0, [0, 3, 2, 1])), None, Some((0, 3, [0, 1, 3, 2])), Some((0, 2, [0, 1, 3, 2]))],
        [Some((0, 0, [0, 3, 2, 1])), Some((1, 2, [0, 2, 1, 3])), Some((1, 1, [0, 2, 1, 3])), None],
    ])
}

pub fn s3_one_vertex() -> Triangulation {
    one_tet([1, 0, 2, 3], [1, 2, 3, 0])
}

pub fn s3_two_vertex() -> Triangulation {
    one_tet([1, 0, 2, 3], [0, 1, 3, 2])
}

pub fn lens_4_1() -> Triangulation {
    one_tet([1, 2, 3, 0], [1, 2, 3, 0])
}

pub fn lens_5_2() -> Triangulation {
    one_tet([1, 2, 3, 0], [2, 0, 3, 1])
}

pub fn s3_two_tet() -> Triangulation {
    build(&[
        [Some((1, 0, [0, 2, 1, 3])), Some((1, 1, [2, 1, 0, 3])), Some((0, 3, [0, 1, 3, 2])), Some((0, 2, [0, 1, 3, 2]))],
        [Some((0, 0, [0, 2, 1, 3])), Some((0, 1, [2, 1, 0, 3])), Some((1, 3, [0, 1, 3, 2])), Some((1, 2, [0, 1, 3, 2]))],
    ])
}

/// Real projective space; first homology ℤ/2.
pub fn rp3() -> Triangulation {
    build(&[
        [Some((1, 0, [0, 3, 1, 2])), Some((1, 1, [2, 1, 3, 0])), Some((0, 3, [0, 1, 3, 2])), Some((0, 2, [0, 1, 3, 2]))],
        [Some((0, 0, [0, 2, 3, 1])), Some((0, 1, [3, 1, 0, 2])), Some((1, 3, [2, 0, 3, 1])), Some((1, 2, [1, 3, 0, 2]))],
    ])
}

/// First homology ℤ/3.
pub fn lens_3_1() -> Triangulation {
    build(&[
        [Some((1, 1, [1, 0, 3, 2])), Some((0, 2, [3, 2, 0, 1])), Some((0, 1, [2, 3, 1, 0])), Some((1, 2, [1, 0, 3, 2]))],
        [Some((1, 3, [3, 0, 1, 2])), Some((0, 0, [1, 0, 3, 2])), Some((0, 3, [1, 0, 3, 2])), Some((1, 0, [1, 2, 3, 0]))],
    ])
}

/// First homology ℤ/7.
pub fn lens_7() -> Triangulation {
    build(&[
        [Some((1, 0, [0, 1, 2, 3])), Some((1, 3, [2, 3, 0, 1])), Some((0, 3, [2, 0, 3, 1])), Some((0, 2, [1, 3, 0, 2]))],
        [Some((0, 0, [0, 1, 2, 3])), Some((1, 2, [1, 2, 3, 0])), Some((1, 1, [3, 0, 1, 2])), Some((0, 1, [2, 3, 0, 1]))],
    ])
}

/// First homology ℤ/2 ⊕ ℤ/2.
pub fn quaternionic() -> Triangulation {
    build(&[
        [Some((1, 3, [3, 2, 1, 0])), Some((1, 0, [1, 0, 3, 2])), Some((1, 2, [0, 1, 2, 3])), Some((1, 1, [2, 3, 0, 1]))],
        [Some((0, 1, [1, 0, 3, 2])), Some((0, 3, [2, 3, 0, 1])), Some((0, 2, [0, 1, 2, 3])), Some((0, 0, [3, 2, 1, 0]))],
    ])
}

/// S² × S¹ with a single vertex; first homology ℤ.
pub fn s2xs1() -> Triangulation {
    build(&[
        [Some((1, 0, [0, 2, 3, 1])), Some((0, 3, [1, 3, 0, 2])), Some((1, 3, [0, 2, 3, 1])), Some((0, 1, [2, 0, 3, 1]))],
        [Some((0, 0, [0, 3, 1, 2])), Some((1, 2, [3, 2, 0, 1])), Some((1, 1, [2, 3, 1, 0])), Some((0, 2, [0, 3, 1, 2]))],
    ])
}

/// The twisted S¹-bundle over S²; closed and non-orientable.
pub fn twisted_s2xs1() -> Triangulation {
    build(&[
        [Some((1, 1, [1, 3, 2, 0])), Some((1, 2, [0, 2, 3, 1])), Some((1, 0, [2, 1, 0, 3])), Some((1, 3, [2, 1, 0, 3]))],
        [Some((0, 2, [2, 1, 0, 3])), Some((0, 0, [3, 0, 2, 1])), Some((0, 1, [0, 3, 1, 2])), Some((0, 3, [2, 1, 0, 3]))],
    ])
}

/// Two tetrahedra glued so that one edge is identified with itself reversed.
pub fn bad_edge() -> Triangulation {
    build(&[
        [Some((0, 2, [2, 3, 0, 1])), None, Some((0, 0, [2, 3, 0, 1])), Some((1, 1, [3, 2, 0, 1]))],
        [None, Some((0, 3, [2, 3, 1, 0])), Some((1, 3, [0, 1, 3, 2])), Some((1, 2, [0, 1, 3, 2]))],
    ])
}

/// Replaces tetrahedron `x` by four tetrahedra coned from a new interior
/// vertex. The cone over face `i` keeps the old labels except that the new
/// vertex takes label `i`; it reuses index `x` for `i = 0`.
pub fn one_four_move(t: &Triangulation, x: usize) -> Triangulation {
    let n = t.num_tets();
    let idx = |i: u8| if i == 0 { x } else { n + i as usize - 1 };
    let mut gl: Vec<[Option<Gluing>; 4]> = t.gluings().to_vec();
    gl.extend(std::iter::repeat_n([None; 4], 3));
    for i in 0..4u8 {
        let mut row = [None; 4];
        for j in 0..4u8 {
            if j != i {
                row[j as usize] = Some(Gluing { tet: idx(j), face: i, perm: Perm4::transposition(i, j) });
            }
        }
        row[i as usize] = t.gluing(x, i).map(|g| {
            if g.tet == x {
                Gluing { tet: idx(g.face), ..g }
            } else {
                g
            }
        });
        gl[idx(i)] = row;
    }
    for y in 0..n {
        if y == x {
            continue;
        }
        for f in 0..4 {
            if let Some(g) = gl[y][f] {
                if g.tet == x {
                    gl[y][f] = Some(Gluing { tet: idx(g.face), ..g });
                }
            }
        }
    }
    Triangulation::new(gl).expect("1-4 move keeps the gluing table consistent")
}

/// Six tetrahedra: [`three_tet`] with one tetrahedron stellarly subdivided.
pub fn rp3_six() -> Triangulation {
    one_four_move(&three_tet(), 0)
}

/// Three tetrahedra: [`rp3`] after a 2-3 move.
pub fn three_tet() -> Triangulation {
    two_three_move(&rp3(), 0, 0).expect("rp3 admits a 2-3 move on face 0 of tet 0")
}

/// Replaces the two distinct tetrahedra meeting at face `f` of tetrahedron
/// `x` by three tetrahedra around a new edge joining their apexes.
pub fn two_three_move(t: &Triangulation, x: usize, f: u8) -> Option<Triangulation> {
    let g = t.gluing(x, f)?;
    let y = g.tet;
    if y == x {
        return None;
    }
    let n = t.num_tets();
    // shared face vertices in x's labels
    let s: Vec<u8> = (0..4u8).filter(|&v| v != f).collect();
    // new tet k is [apex_x, apex_y, s[k+1], s[k+2]], indices mod 3
    let new_idx = |k: usize| match k {
        0 => x,
        1 => y,
        _ => n,
    };
    let verts = |k: usize| (s[(k + 1) % 3], s[(k + 2) % 3]);
    // x's face s[k] becomes face 1 of tet k, y's face g(s[k]) becomes face 0
    let map_x = |k: usize| {
        let (a, b) = verts(k);
        let mut m = [0u8; 4];
        m[f as usize] = 0;
        m[a as usize] = 2;
        m[b as usize] = 3;
        m[s[k] as usize] = 1;
        Perm4::new(m).unwrap()
    };
    let map_y = |k: usize| {
        let (a, b) = verts(k);
        let mut m = [0u8; 4];
        m[g.face as usize] = 1;
        m[g.perm.apply(a) as usize] = 2;
        m[g.perm.apply(b) as usize] = 3;
        m[g.perm.apply(s[k]) as usize] = 0;
        Perm4::new(m).unwrap()
    };
    // old (tet, face) → (new tet, new face, old→new label map)
    let relocate = |tet: usize, face: u8| -> (usize, u8, Perm4) {
        if tet == x {
            let k = s.iter().position(|&v| v == face).unwrap();
            (new_idx(k), 1, map_x(k))
        } else if tet == y {
            let k = s.iter().position(|&v| g.perm.apply(v) == face).unwrap();
            (new_idx(k), 0, map_y(k))
        } else {
            (tet, face, Perm4::IDENTITY)
        }
    };
    let mut gl: Vec<[Option<Gluing>; 4]> = t.gluings().to_vec();
    gl.push([None; 4]);
    gl[x] = [None; 4];
    gl[y] = [None; 4];
    let mut out = gl.clone();
    for tet in 0..n {
        for face in 0..4u8 {
            if (tet == x && face == f) || (tet == y && face == g.face) {
                continue;
            }
            let (nt, nf, m) = relocate(tet, face);
            let old = t.gluing(tet, face);
            out[nt][nf as usize] = old.map(|h| {
                let (ot, of, om) = relocate(h.tet, h.face);
                Gluing { tet: ot, face: of, perm: om.compose(&h.perm).compose(&m.inverse()) }
            });
        }
    }
    // tets k and k+1 share the face through both apexes and s[k+2]
    for k in 0..3 {
        let p = Perm4::new([0, 1, 3, 2]).unwrap();
        out[new_idx(k)][2] = Some(Gluing { tet: new_idx((k + 1) % 3), face: 3, perm: p });
        out[new_idx((k + 1) % 3)][3] = Some(Gluing { tet: new_idx(k), face: 2, perm: p });
    }
    Triangulation::new(out).ok()
}

/// Every fixture, named. Names containing "nonorientable" are the only
/// non-orientable ones.
pub fn all() -> Vec<(&'static str, Triangulation)> {
    let mut v = vec![
        ("ball", ball()),
        ("folded_ball", folded_ball()),
        ("two_tet_ball", two_tet_ball()),
        ("solid_torus", solid_torus()),
        ("solid_torus_two", solid_torus_two()),
    ];
    v.extend(closed());
    v
}

/// Closed fixtures that pass manifold validation.
pub fn closed() -> Vec<(&'static str, Triangulation)> {
    vec![
        ("s3_one_vertex", s3_one_vertex()),
        ("s3_two_vertex", s3_two_vertex()),
        ("lens_4_1", lens_4_1()),
        ("lens_5_2", lens_5_2()),
        ("s3_two_tet", s3_two_tet()),
        ("rp3", rp3()),
        ("lens_3_1", lens_3_1()),
        ("lens_7", lens_7()),
        ("quaternionic", quaternionic()),
        ("s2xs1", s2xs1()),
        ("twisted_s2xs1_nonorientable", twisted_s2xs1()),
        ("three_tet", three_tet()),
        ("rp3_six", rp3_six()),
        ("s3_stellar", one_four_move(&s3_one_vertex(), 0)),
    ]
}

pub fn by_name(name: &str) -> Option<Triangulation> {
    if name == "bad_edge" {
        return Some(bad_edge());
    }
    all().into_iter().find(|(n, _)| *n == name).map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::validate_manifold;

    #[test]
    fn moves_preserve_validity() {
        for (name, t) in closed() {
            for x in 0..t.num_tets() {
                let u = one_four_move(&t, x);
                assert_eq!(u.num_tets(), t.num_tets() + 3);
                assert!(validate_manifold(&u).valid, "{name} 1-4 at {x}");
                assert_eq!(u.is_orientable(), t.is_orientable());
            }
        }
        let mut moved = 0;
        for (name, t) in closed() {
            for x in 0..t.num_tets() {
                for f in 0..4 {
                    if let Some(u) = two_three_move(&t, x, f) {
                        moved += 1;
                        assert_eq!(u.num_tets(), t.num_tets() + 1);
                        assert!(validate_manifold(&u).valid, "{name} 2-3 at {x}/{f}");
                        assert_eq!(u.is_orientable(), t.is_orientable());
                    }
                }
            }
        }
        assert!(moved > 0);
    }

    #[test]
    fn sizes() {
        assert_eq!(three_tet().num_tets(), 3);
        assert_eq!(rp3_six().num_tets(), 6);
    }
}
