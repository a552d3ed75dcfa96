#![allow(dead_code)]

use knotgenus_topology::normal::{matching_system, NormalVector, DISK_TYPES};
use knotgenus_topology::sat::{CnfInstance, Literal};
use knotgenus_topology::{TetComplex, Triangulation};
use rand::Rng;

/// Extreme rays of the admissible cone with the given quadrilateral type per
/// tetrahedron (`None` allows no quadrilaterals), by double description.
pub fn extreme_rays(t: &Triangulation, quads: &[Option<usize>]) -> Vec<Vec<i128>> {
    let d = DISK_TYPES * t.num_tets();
    assert!(d <= 64);
    let allowed: Vec<bool> = (0..d)
        .map(|i| {
            let ty = i % DISK_TYPES;
            ty < 4 || quads[i / DISK_TYPES] == Some(ty - 4)
        })
        .collect();
    let mut rays: Vec<Vec<i128>> = (0..d)
        .filter(|&i| allowed[i])
        .map(|i| {
            let mut r = vec![0; d];
            r[i] = 1;
            r
        })
        .collect();
    let zeros = |r: &[i128]| -> u64 { r.iter().enumerate().filter(|(_, x)| **x == 0).fold(0u64, |m, (i, _)| m | 1 << i) };
    for eq in matching_system(t).equations {
        let mut h = vec![0i128; d];
        h[eq[0]] += 1;
        h[eq[1]] += 1;
        h[eq[2]] -= 1;
        h[eq[3]] -= 1;
        let s: Vec<i128> = rays.iter().map(|r| r.iter().zip(&h).map(|(a, b)| a * b).sum()).collect();
        let masks: Vec<u64> = rays.iter().map(|r| zeros(r)).collect();
        let mut next: Vec<Vec<i128>> = rays.iter().zip(&s).filter(|(_, v)| **v == 0).map(|(r, _)| r.clone()).collect();
        for p in (0..rays.len()).filter(|&i| s[i] > 0) {
            for n in (0..rays.len()).filter(|&i| s[i] < 0) {
                let common = masks[p] & masks[n];
                let blocked = (0..rays.len()).any(|r| r != p && r != n && masks[r] & common == common);
                if blocked {
                    continue;
                }
                let mut r: Vec<i128> = rays[n].iter().zip(&rays[p]).map(|(a, b)| s[p] * a - s[n] * b).collect();
                let g = r.iter().fold(0i128, |g, &x| gcd(g, x));
                r.iter_mut().for_each(|x| *x /= g);
                next.push(r);
            }
        }
        next.sort();
        next.dedup();
        rays = next;
    }
    rays
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn to_vector(r: &[i128]) -> NormalVector {
    NormalVector::from_u64(&r.iter().map(|&x| x as u64).collect::<Vec<_>>()).unwrap()
}

/// A random admissible vector: a small combination of extreme rays sharing
/// one quadrilateral choice. None if the chosen cone is trivial.
pub fn random_admissible(t: &Triangulation, rng: &mut impl Rng, max_coeff: u64) -> Option<NormalVector> {
    let quads: Vec<Option<usize>> = (0..t.num_tets()).map(|_| if rng.gen_bool(0.25) { None } else { Some(rng.gen_range(0..3)) }).collect();
    let rays = extreme_rays(t, &quads);
    if rays.is_empty() {
        return None;
    }
    let mut v = NormalVector::zero(t.num_tets());
    for _ in 0..rng.gen_range(1..=3) {
        let r = &rays[rng.gen_range(0..rays.len())];
        let k = rng.gen_range(1..=max_coeff);
        v = v.add(&to_vector(r).scaled(&k.into())).unwrap();
    }
    Some(v)
}

/// A random instance satisfied by a random hidden assignment: every clause
/// gets exactly one literal that the assignment makes true.
pub fn planted_instance(rng: &mut impl Rng, n: usize, m: usize) -> (CnfInstance, Vec<bool>) {
    let hidden: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let lit = |var: usize, truth: bool| if hidden[var] == truth { Literal::pos(var) } else { Literal::neg(var) };
    let clauses = (0..m)
        .map(|_| {
            let mut c = [0; 3].map(|_| lit(rng.gen_range(0..n), false));
            c[rng.gen_range(0..3)] = lit(rng.gen_range(0..n), true);
            c
        })
        .collect();
    (CnfInstance::new(n, clauses).unwrap(), hidden)
}
