#![allow(dead_code)]

use knotgenus_core::{Interval, Pairing, PairingSystem, WeightList, WeightVec};
use num_bigint::{BigInt, BigUint};
use rand::Rng;

pub fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo.into(), hi.into()).unwrap()
}

pub fn pairing(a: i64, b: i64, c: i64, d: i64, rev: bool) -> Pairing {
    Pairing::new(iv(a, b), iv(c, d), rev).unwrap()
}

pub fn system(n: i64, ps: Vec<Pairing>) -> PairingSystem {
    PairingSystem::new(n.into(), ps).unwrap()
}

/// A random pairing inside `[1, n]`. Widths are drawn on a log scale so that
/// both narrow and wide pairings are common, and about a third of the
/// preserving ones are periodic.
pub fn random_pairing<R: Rng>(rng: &mut R, n: i64) -> Pairing {
    let max_w = n.max(1);
    let w = if rng.gen_bool(0.3) {
        rng.gen_range(1..=max_w.min(3))
    } else {
        let e = rng.gen_range(0.0..(max_w as f64).ln().max(0.0) + 1e-9);
        (e.exp() as i64).clamp(1, max_w)
    };
    let rev = rng.gen_bool(0.4);
    let a = rng.gen_range(1..=n - w + 1);
    let c = if !rev && rng.gen_bool(0.35) && a + w <= n - w + 1 + w {
        let t_max = (n - w + 1 - a).max(0).min(w);
        a + rng.gen_range(0..=t_max)
    } else {
        rng.gen_range(1..=n - w + 1)
    };
    Pairing::new(iv(a, a + w - 1), iv(c, c + w - 1), rev).unwrap()
}

pub fn random_system<R: Rng>(rng: &mut R, max_n: i64, max_k: usize) -> PairingSystem {
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(0..=max_k);
    let ps = (0..k).map(|_| random_pairing(rng, n)).collect();
    PairingSystem::new(n.into(), ps).unwrap()
}

/// Sparse random weights of dimension `d` with total mass bounded by `budget`
/// per coordinate.
pub fn random_weights<R: Rng>(rng: &mut R, n: &BigInt, d: usize) -> WeightList {
    let n: i64 = n.try_into().unwrap();
    if n == 0 {
        return WeightList::empty(d);
    }
    let mut cuts: Vec<i64> = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(1..=n)).collect();
    cuts.push(1);
    cuts.push(n + 1);
    cuts.sort();
    cuts.dedup();
    let mut entries = Vec::new();
    for w in cuts.windows(2) {
        if rng.gen_bool(0.3) {
            continue;
        }
        let dense: Vec<BigUint> = (0..d).map(|_| BigUint::from(rng.gen_range(0u32..5))).collect();
        entries.push((iv(w[0], w[1] - 1), WeightVec::from_dense(&dense)));
    }
    WeightList::new(d, entries).unwrap()
}
