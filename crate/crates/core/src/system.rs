//! Pairing systems and the whole-system operations used by the orbit count.

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coord::Coord;
use crate::error::{OrbitError, Result};
use crate::interval::{trim, Interval, Pairing};

/// Pairings acting on `[1, n]`, plus the number of orbits already split off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingSystem {
    pub n: BigInt,
    pub pairings: Vec<Pairing>,
    pub orbit_counter: BigInt,
}

impl PairingSystem {
    /// Validates bounds and widths. Pairings are stored in canonical form.
    pub fn new(n: BigInt, pairings: Vec<Pairing>) -> Result<Self> {
        if n < BigInt::zero() {
            return Err(OrbitError::Parse(format!("negative width {n}")));
        }
        let mut out = Vec::with_capacity(pairings.len());
        for p in pairings {
            let p = Pairing::new(p.domain, p.range, p.reversing)?;
            for iv in [&p.domain, &p.range] {
                if iv.hi > n {
                    return Err(OrbitError::OutOfBounds {
                        lo: iv.lo.to_string(),
                        hi: iv.hi.to_string(),
                        n: n.to_string(),
                    });
                }
            }
            out.push(p);
        }
        Ok(PairingSystem { n, pairings: out, orbit_counter: BigInt::zero() })
    }

    pub fn k(&self) -> usize {
        self.pairings.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SystemJson = serde_json::from_str(text).map_err(|e| OrbitError::Parse(e.to_string()))?;
        raw.into_system()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemJson::from_system(self)).expect("system serializes")
    }
}

/// Sort key for the linear order on pairings: `(d, -c, -a, preserving)`,
/// with the list index last so that the earliest of identical pairings wins.
pub(crate) type OrderKey<C> = (C, Reverse<C>, Reverse<C>, bool, Reverse<usize>);

pub(crate) fn order_key<C: Coord>(p: &Pairing<C>, id: usize) -> OrderKey<C> {
    (p.d().clone(), Reverse(p.c().clone()), Reverse(p.a().clone()), !p.reversing, Reverse(id))
}

/// Index of the maximal pairing.
pub fn maximal_pairing(sys: &PairingSystem) -> Result<usize> {
    sys.pairings
        .iter()
        .enumerate()
        .max_by(|(i, p), (j, q)| order_key(*p, *i).cmp(&order_key(*q, *j)))
        .map(|(i, _)| i)
        .ok_or(OrbitError::EmptySystem)
}

/// `X = 4^k * prod(width)`.
pub fn complexity_x(sys: &PairingSystem) -> BigInt {
    complexity_of(sys.pairings.iter())
}

pub(crate) fn complexity_of<'a, C: Coord>(ps: impl Iterator<Item = &'a Pairing<C>>) -> BigInt {
    let mut x = BigInt::one();
    for p in ps {
        x *= 4u32;
        x *= p.width().to_big();
    }
    x
}

/// Maximal runs of `[1, n]` touched by no domain or range.
pub(crate) fn static_runs(n: &BigInt, pairings: &[Pairing]) -> Vec<Interval> {
    let mut ivs: Vec<&Interval> = pairings.iter().flat_map(|p| [&p.domain, &p.range]).collect();
    ivs.sort_by(|x, y| x.lo.cmp(&y.lo));
    let mut runs = Vec::new();
    let mut next = BigInt::one();
    for iv in ivs {
        if iv.lo > next {
            runs.push(Interval { lo: next.clone(), hi: &iv.lo - 1 });
        }
        if iv.hi >= next {
            next = &iv.hi + 1;
        }
    }
    if &next <= n {
        runs.push(Interval { lo: next, hi: n.clone() });
    }
    runs
}

/// Shifts a non-static coordinate down past the removed runs below it.
pub(crate) fn shift_past(runs: &[Interval], removed_prefix: &[BigInt], x: &BigInt) -> BigInt {
    let below = runs.partition_point(|r| &r.hi < x);
    x - &removed_prefix[below]
}

/// Removes every static run. Returns the new system and the total removed width.
pub fn contract(sys: &PairingSystem) -> (PairingSystem, BigInt) {
    let runs = static_runs(&sys.n, &sys.pairings);
    let mut prefix = vec![BigInt::zero()];
    for r in &runs {
        let last = prefix.last().unwrap().clone();
        prefix.push(last + r.width());
    }
    let removed = prefix.last().unwrap().clone();
    let shift = |iv: &Interval| Interval { lo: shift_past(&runs, &prefix, &iv.lo), hi: shift_past(&runs, &prefix, &iv.hi) };
    let pairings = sys
        .pairings
        .iter()
        .map(|p| Pairing { domain: shift(&p.domain), range: shift(&p.range), reversing: p.reversing })
        .collect();
    let out = PairingSystem { n: &sys.n - &removed, pairings, orbit_counter: &sys.orbit_counter + &removed };
    (out, removed)
}

/// Truncation width for the maximal pairing `i`:
/// `max(max_{j != i} d_j, c_i - 1)`.
pub(crate) fn truncation_point<C: Coord>(p: &Pairing<C>, other_max_d: Option<&C>) -> C {
    let c1 = p.c().clone() - C::one();
    match other_max_d {
        Some(d) if *d > c1 => d.clone(),
        _ => c1,
    }
}

/// Shortens `p` so it lives in `[1, to]`. `None` when it disappears.
pub(crate) fn shorten<C: Coord>(p: &Pairing<C>, to: &C) -> Option<Pairing<C>> {
    if p.d() <= to {
        return Some(p.clone());
    }
    if p.c() > to {
        return None;
    }
    let delta = p.d().clone() - to.clone();
    let range = Interval::raw(p.c().clone(), to.clone());
    let domain = if p.reversing {
        Interval::raw(p.a().clone() + delta, p.b().clone())
    } else {
        if p.b().clone() - delta.clone() < p.a().clone() {
            return None;
        }
        Interval::raw(p.a().clone(), p.b().clone() - delta)
    };
    Some(Pairing { domain, range, reversing: p.reversing })
}

/// Truncates the maximal pairing as far as the other pairings allow.
///
/// The system must be in the state Step (5) leaves behind: the maximal
/// pairing alone reaches past every other range, and if it is a reflection
/// it has been trimmed.
pub fn truncate(sys: &PairingSystem) -> Result<PairingSystem> {
    let i = maximal_pairing(sys)?;
    let p = &sys.pairings[i];
    if trim(p) != *p {
        return Err(OrbitError::Internal(format!("maximal pairing {p} is an untrimmed reflection")));
    }
    let other = sys.pairings.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.d()).max();
    let to = truncation_point(p, other);
    if to >= sys.n {
        return Err(OrbitError::Internal(format!("nothing to truncate: [{}, {}] meets several ranges", to, sys.n)));
    }
    let mut pairings = sys.pairings.clone();
    match shorten(p, &to) {
        Some(q) => pairings[i] = q,
        None => {
            pairings.remove(i);
        }
    }
    Ok(PairingSystem { n: to, pairings, orbit_counter: sys.orbit_counter.clone() })
}

#[derive(Serialize, Deserialize)]
struct PairingJson {
    domain: [String; 2],
    range: [String; 2],
    reversing: bool,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: String,
    pairings: Vec<PairingJson>,
}

pub(crate) fn parse_big(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| OrbitError::Parse(format!("not an integer: {s:?}")))
}

pub(crate) fn parse_interval(v: &[String; 2]) -> Result<Interval> {
    Interval::new(parse_big(&v[0])?, parse_big(&v[1])?)
}

impl SystemJson {
    fn into_system(self) -> Result<PairingSystem> {
        let n = parse_big(&self.n)?;
        let mut ps = Vec::with_capacity(self.pairings.len());
        for p in self.pairings {
            ps.push(Pairing::new(parse_interval(&p.domain)?, parse_interval(&p.range)?, p.reversing)?);
        }
        PairingSystem::new(n, ps)
    }

    fn from_system(sys: &PairingSystem) -> Self {
        let iv = |i: &Interval| [i.lo.to_string(), i.hi.to_string()];
        SystemJson {
            n: sys.n.to_string(),
            pairings: sys
                .pairings
                .iter()
                .map(|p| PairingJson { domain: iv(&p.domain), range: iv(&p.range), reversing: p.reversing })
                .collect(),
        }
    }
}
