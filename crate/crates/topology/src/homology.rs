//! Whether a knot bounds an integral 2-chain.
//!
//! We decide `b ∈ im ∂₂` for the knot's 1-cycle `b`. Column operations never
//! change the image, and subtracting image vectors from `b` never changes
//! membership, so every column with a unit entry is used once to clear its
//! row and then dropped. Whatever is left has no unit entries and is small in
//! practice; it is diagonalized densely.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Result, TopoError};
use crate::subdivision::KnotSpec;
use crate::triangulation::{edge_index, Classes, Triangulation};

/// Signed edge-class entries of the oriented boundary of each face class.
pub fn boundary_two(cl: &Classes) -> Vec<Vec<(usize, i64)>> {
    cl.faces
        .iter()
        .map(|sides| {
            let (x, f) = sides[0];
            let v: Vec<u8> = (0..4u8).filter(|&v| v != f).collect();
            let mut col: HashMap<usize, i64> = HashMap::new();
            for (a, b, s) in [(v[1], v[2], 1), (v[0], v[2], -1), (v[0], v[1], 1)] {
                let e = cl.edge_of[x][edge_index(a, b) as usize];
                *col.entry(e).or_default() += s * cl.edge_sign(x, a, b);
            }
            let mut col: Vec<(usize, i64)> = col.into_iter().filter(|&(_, c)| c != 0).collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// The knot as a 1-cycle with coefficients ±1 on its edge classes.
pub fn knot_cycle(cl: &Classes, k: &KnotSpec) -> Result<HashMap<usize, i64>> {
    k.validate(cl)?;
    let mut out = HashMap::new();
    let mut remaining: HashSet<usize> = k.edges.iter().copied().collect();
    let first = k.edges[0];
    let (start, mut at) = cl.edge_ends(first);
    out.insert(first, 1);
    remaining.remove(&first);
    while at != start || !remaining.is_empty() {
        let next = remaining.iter().copied().find(|&e| {
            let (a, b) = cl.edge_ends(e);
            a == at || b == at
        });
        let Some(e) = next else {
            return Err(TopoError::Input("knot edges do not close up".into()));
        };
        let (a, b) = cl.edge_ends(e);
        if a == at {
            out.insert(e, 1);
            at = b;
        } else {
            out.insert(e, -1);
            at = a;
        }
        remaining.remove(&e);
    }
    Ok(out)
}

pub fn is_null_homologous(t: &Triangulation, k: &KnotSpec) -> Result<bool> {
    let cl = t.classes();
    let b = knot_cycle(&cl, k)?;
    in_image(cl.edge_count(), boundary_two(&cl), b)
}

/// Whether `b` is an integer combination of the sparse columns.
pub fn in_image(rows: usize, cols: Vec<Vec<(usize, i64)>>, b: HashMap<usize, i64>) -> Result<bool> {
    let overflow = || TopoError::Capacity("boundary matrix entry overflowed 64 bits during elimination".into());
    let mut cols: Vec<HashMap<usize, i64>> = cols.into_iter().map(|c| c.into_iter().collect()).collect();
    let mut b = b;
    b.retain(|_, v| *v != 0);
    let mut row_cols: Vec<HashSet<usize>> = vec![HashSet::new(); rows];
    for (j, c) in cols.iter().enumerate() {
        for &r in c.keys() {
            row_cols[r].insert(j);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = cols.iter().enumerate().map(|(j, c)| Reverse((c.len(), j))).collect();
    while let Some(Reverse((len, j))) = heap.pop() {
        if !alive[j] || cols[j].len() != len {
            continue;
        }
        if cols[j].is_empty() {
            alive[j] = false;
            continue;
        }
        // the unit entry whose row touches the fewest columns
        let Some(r) = cols[j].iter().filter(|(_, v)| v.abs() == 1).map(|(&r, _)| r).min_by_key(|&r| (row_cols[r].len(), r)) else {
            continue;
        };
        let s = cols[j][&r];
        let pivot: Vec<(usize, i64)> = cols[j].iter().map(|(&r, &v)| (r, v)).collect();
        let others: Vec<usize> = row_cols[r].iter().copied().filter(|&k| k != j).collect();
        for k in others {
            let m = cols[k][&r].checked_mul(s).ok_or_else(overflow)?;
            for &(pr, pv) in &pivot {
                let delta = m.checked_mul(pv).ok_or_else(overflow)?;
                let e = cols[k].entry(pr).or_insert(0);
                *e = e.checked_sub(delta).ok_or_else(overflow)?;
                if *e == 0 {
                    cols[k].remove(&pr);
                    row_cols[pr].remove(&k);
                } else {
                    row_cols[pr].insert(k);
                }
            }
            heap.push(Reverse((cols[k].len(), k)));
        }
        if let Some(&br) = b.get(&r) {
            let m = br.checked_mul(s).ok_or_else(overflow)?;
            for &(pr, pv) in &pivot {
                let delta = m.checked_mul(pv).ok_or_else(overflow)?;
                let e = b.entry(pr).or_insert(0);
                *e = e.checked_sub(delta).ok_or_else(overflow)?;
                if *e == 0 {
                    b.remove(&pr);
                }
            }
        }
        for &(pr, _) in &pivot {
            row_cols[pr].remove(&j);
        }
        alive[j] = false;
        cols[j].clear();
    }
    if b.is_empty() {
        return Ok(true);
    }
    let rest: Vec<usize> = (0..cols.len()).filter(|&j| alive[j] && !cols[j].is_empty()).collect();
    let mut row_ids: Vec<usize> = rest.iter().flat_map(|&j| cols[j].keys().copied()).chain(b.keys().copied()).collect();
    row_ids.sort_unstable();
    row_ids.dedup();
    let pos: HashMap<usize, usize> = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); rest.len()]; row_ids.len()];
    for (c, &j) in rest.iter().enumerate() {
        for (&r, &v) in &cols[j] {
            dense[pos[&r]][c] = BigInt::from(v);
        }
    }
    let mut rhs = vec![BigInt::zero(); row_ids.len()];
    for (&r, &v) in &b {
        rhs[pos[&r]] = BigInt::from(v);
    }
    Ok(dense_solvable(dense, rhs))
}

/// Diagonalizes `a` by unimodular row and column operations, applying the row
/// operations to `rhs`, then reads off solvability.
pub fn dense_solvable(mut a: Vec<Vec<BigInt>>, mut rhs: Vec<BigInt>) -> bool {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    while rank < rows && rank < cols {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((i, j)) = best else { break };
        a.swap(rank, i);
        rhs.swap(rank, i);
        for row in a.iter_mut() {
            row.swap(rank, j);
        }
        loop {
            let p = a[rank][rank].clone();
            let mut clean = true;
            for i in rank + 1..rows {
                if a[i][rank].is_zero() {
                    continue;
                }
                let q = a[i][rank].div_floor(&p);
                for j in rank..cols {
                    let d = &q * &a[rank][j];
                    a[i][j] -= d;
                }
                let d = &q * &rhs[rank];
                rhs[i] -= d;
                if !a[i][rank].is_zero() {
                    clean = false;
                }
            }
            for j in rank + 1..cols {
                if a[rank][j].is_zero() {
                    continue;
                }
                let q = a[rank][j].div_floor(&p);
                for i in rank..rows {
                    let d = &q * &a[i][rank];
                    a[i][j] -= d;
                }
                if !a[rank][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // move a smaller remainder into the pivot position
            let mut best = (rank, rank);
            for i in rank..rows {
                if !a[i][rank].is_zero() && a[i][rank].abs() < a[best.0][best.1].abs() {
                    best = (i, rank);
                }
            }
            for j in rank..cols {
                if !a[rank][j].is_zero() && a[rank][j].abs() < a[best.0][best.1].abs() {
                    best = (rank, j);
                }
            }
            a.swap(rank, best.0);
            rhs.swap(rank, best.0);
            for row in a.iter_mut() {
                row.swap(rank, best.1);
            }
        }
        rank += 1;
    }
    (0..rows).all(|i| if i < rank { rhs[i].is_multiple_of(&a[i][i]) } else { rhs[i].is_zero() })
}
