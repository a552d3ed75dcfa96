//! Brute-force references: every point is materialized and joined to its
//! images with a disjoint-set forest. Linear in `n`, so only for small systems.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{OrbitError, Result};
use crate::interval::Pairing;
use crate::system::PairingSystem;
use crate::weights::{WeightList, WeightVec};

pub const DEFAULT_CAP: u64 = 1_000_000;

struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b) as usize] = a.min(b);
        }
    }
}

fn small(x: &BigInt) -> usize {
    x.to_usize().expect("coordinate below the cap")
}

fn checked_width(sys: &PairingSystem, cap: u64) -> Result<usize> {
    match sys.n.to_u64() {
        Some(n) if n <= cap => Ok(n as usize),
        _ => Err(OrbitError::Capacity { n: sys.n.to_string(), cap }),
    }
}

fn join(dsu: &mut Dsu, p: &Pairing) {
    let (a, b, d) = (small(p.a()), small(p.b()), small(p.d()));
    let t = small(p.c()) - a;
    for x in a..=b {
        let y = if p.reversing { a + d - x } else { x + t };
        dsu.union((x - 1) as u32, (y - 1) as u32);
    }
}

/// Orbit label (the least point, zero-based) of every point of `[1, n]`.
pub fn orbit_labels(sys: &PairingSystem, cap: u64) -> Result<Vec<u32>> {
    let n = checked_width(sys, cap)?;
    let mut dsu = Dsu::new(n);
    for p in &sys.pairings {
        join(&mut dsu, p);
    }
    Ok((0..n as u32).map(|x| dsu.find(x)).collect())
}

pub fn count_orbits_oracle(sys: &PairingSystem, cap: u64) -> Result<BigInt> {
    let labels = orbit_labels(sys, cap)?;
    Ok(labels.iter().enumerate().filter(|(i, l)| *i as u32 == **l).count().into())
}

/// Weight of every orbit, sorted, so that two runs can be compared as multisets.
pub fn weighted_count_oracle(sys: &PairingSystem, weights: &WeightList, cap: u64) -> Result<Vec<WeightVec>> {
    let labels = orbit_labels(sys, cap)?;
    weights.check_against(&sys.n)?;
    let n = labels.len();
    let mut sums: Vec<Option<WeightVec>> = vec![None; n];
    for (i, l) in labels.iter().enumerate() {
        if i as u32 == *l {
            sums[i] = Some(WeightVec::zero());
        }
    }
    for (iv, w) in weights.entries() {
        for x in small(&iv.lo)..=small(&iv.hi) {
            let root = labels[x - 1] as usize;
            sums[root].as_mut().unwrap().add_assign(w);
        }
    }
    let mut out: Vec<WeightVec> = sums.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}
