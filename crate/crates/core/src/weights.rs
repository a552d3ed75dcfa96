//! Nonnegative integer weights on points, carried through the orbit count so
//! that every orbit reports the sum of the weights of its points.

use std::collections::BTreeMap;
use std::ops::Bound::{Excluded, Included};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coord::{one, Coord};
use crate::error::{OrbitError, Result};
use crate::interval::{Interval, Pairing};
use crate::system::{parse_big, parse_interval};

/// A sparse vector of nonnegative integers. Zero entries are never stored,
/// so equality and ordering are those of the underlying vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVec {
    entries: BTreeMap<u32, BigUint>,
}

impl WeightVec {
    pub fn zero() -> Self {
        WeightVec { entries: BTreeMap::new() }
    }

    pub fn unit(i: u32) -> Self {
        WeightVec { entries: BTreeMap::from([(i, BigUint::one())]) }
    }

    pub fn from_dense(v: &[BigUint]) -> Self {
        let entries = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as u32, x.clone())).collect();
        WeightVec { entries }
    }

    pub fn from_sparse(pairs: Vec<(u32, BigUint)>) -> Self {
        let mut out = WeightVec::zero();
        for (i, x) in pairs {
            out.add_at(i, x);
        }
        out
    }

    pub fn to_dense(&self, d: usize) -> Vec<BigUint> {
        let mut v = vec![BigUint::zero(); d];
        for (i, x) in &self.entries {
            v[*i as usize] = x.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: u32) -> BigUint {
        self.entries.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// One past the largest index with a nonzero entry.
    pub fn support_len(&self) -> usize {
        self.entries.last_key_value().map_or(0, |(i, _)| *i as usize + 1)
    }

    fn add_at(&mut self, i: u32, x: BigUint) {
        if x.is_zero() {
            return;
        }
        *self.entries.entry(i).or_default() += x;
    }

    pub fn add_assign(&mut self, other: &WeightVec) {
        for (i, x) in &other.entries {
            *self.entries.entry(*i).or_default() += x;
        }
    }

    /// Adds an owned vector, iterating over the smaller of the two.
    pub fn add_owned(&mut self, mut other: WeightVec) {
        if other.entries.len() > self.entries.len() {
            std::mem::swap(self, &mut other);
        }
        for (i, x) in other.entries {
            *self.entries.entry(i).or_default() += x;
        }
    }

    pub fn scaled(&self, k: &BigUint) -> WeightVec {
        if k.is_zero() {
            return WeightVec::zero();
        }
        WeightVec { entries: self.entries.iter().map(|(i, x)| (*i, x * k)).collect() }
    }

    pub(crate) fn to_strings(&self, d: usize) -> Vec<String> {
        self.to_dense(d).iter().map(|x| x.to_string()).collect()
    }
}

/// Sorted disjoint intervals with nonzero weights. Points not covered carry
/// weight zero; adjacent entries always differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightList {
    d: usize,
    entries: Vec<(Interval, WeightVec)>,
}

impl WeightList {
    /// Validates ordering and dimension, drops zero entries and coalesces
    /// equal neighbours.
    pub fn new(d: usize, entries: Vec<(Interval, WeightVec)>) -> Result<Self> {
        let mut out: Vec<(Interval, WeightVec)> = Vec::with_capacity(entries.len());
        let mut prev_hi: Option<BigInt> = None;
        for (iv, w) in entries {
            if w.support_len() > d {
                return Err(OrbitError::Dimension { expected: d, found: w.support_len() });
            }
            if iv.lo < BigInt::one() || iv.lo > iv.hi {
                return Err(OrbitError::WeightList(format!("bad interval {iv}")));
            }
            if let Some(h) = &prev_hi {
                if iv.lo <= *h {
                    return Err(OrbitError::WeightList(format!("interval {iv} overlaps or precedes its predecessor")));
                }
            }
            prev_hi = Some(iv.hi.clone());
            if w.is_zero() {
                continue;
            }
            if let Some((last, lw)) = out.last_mut() {
                if last.hi.clone() + 1 == iv.lo && *lw == w {
                    last.hi = iv.hi;
                    continue;
                }
            }
            out.push((iv, w));
        }
        Ok(WeightList { d, entries: out })
    }

    /// Builds a list from possibly overlapping intervals, summing the
    /// weights where they overlap.
    pub fn from_additive(d: usize, entries: Vec<(Interval, WeightVec)>) -> Result<Self> {
        let mut map = WeightMap::<BigInt>::default();
        for (iv, w) in entries {
            if w.support_len() > d {
                return Err(OrbitError::Dimension { expected: d, found: w.support_len() });
            }
            if iv.lo < BigInt::one() {
                return Err(OrbitError::WeightList(format!("bad interval {iv}")));
            }
            map.add(&iv.lo, &iv.hi, w);
        }
        Ok(map.to_list(d))
    }

    pub fn empty(d: usize) -> Self {
        WeightList { d, entries: Vec::new() }
    }

    /// The same weight at every point of `[1, n]`.
    pub fn uniform(n: &BigInt, d: usize, w: WeightVec) -> Result<Self> {
        if n < &BigInt::one() {
            return Ok(Self::empty(d));
        }
        Self::new(d, vec![(Interval::new(BigInt::one(), n.clone())?, w)])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[(Interval, WeightVec)] {
        &self.entries
    }

    pub(crate) fn check_against(&self, n: &BigInt) -> Result<()> {
        match self.entries.last() {
            Some((iv, _)) if iv.hi > *n => Err(OrbitError::WeightList(format!("interval {iv} leaves [1, {n}]"))),
            _ => Ok(()),
        }
    }

    /// Sum over points of the weight.
    pub fn total(&self) -> WeightVec {
        let mut t = WeightVec::zero();
        for (iv, w) in &self.entries {
            t.add_assign(&w.scaled(&iv.width().to_biguint().expect("positive width")));
        }
        t
    }

    /// Number of maximal constant runs covering `[1, n]`, zero runs included.
    pub fn runs(&self, n: &BigInt) -> usize {
        let mut map = WeightMap::<BigInt>::default();
        for (iv, w) in &self.entries {
            map.segs.insert(iv.lo.clone(), (iv.hi.clone(), w.clone()));
        }
        map.runs(n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: WeightListJson = serde_json::from_str(text).map_err(|e| OrbitError::Parse(e.to_string()))?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for e in raw.entries {
            if e.weight.len() != raw.d {
                return Err(OrbitError::Dimension { expected: raw.d, found: e.weight.len() });
            }
            let mut dense = Vec::with_capacity(raw.d);
            for x in &e.weight {
                let v = parse_big(x)?;
                dense.push(v.to_biguint().ok_or_else(|| OrbitError::Parse(format!("negative weight {v}")))?);
            }
            entries.push((parse_interval(&e.interval)?, WeightVec::from_dense(&dense)));
        }
        WeightList::new(raw.d, entries)
    }

    pub fn to_json(&self) -> String {
        let raw = WeightListJson {
            d: self.d,
            entries: self
                .entries
                .iter()
                .map(|(iv, w)| EntryJson { interval: [iv.lo.to_string(), iv.hi.to_string()], weight: w.to_strings(self.d) })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("weights serialize")
    }
}

/// Per-orbit weights: each entry stands for `width` orbits that all have the
/// entry's weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitWeightReport {
    pub d: usize,
    pub entries: Vec<(Interval, WeightVec)>,
    pub orbit_count: BigInt,
}

impl OrbitWeightReport {
    /// The multiset of orbit weights, sorted. Panics past `cap` orbits.
    pub fn orbit_weights(&self, cap: usize) -> Vec<WeightVec> {
        let mut out = Vec::new();
        for (iv, w) in &self.entries {
            let k = iv.width().to_usize().filter(|k| out.len() + k <= cap).expect("orbit count under the cap");
            out.extend(std::iter::repeat_n(w.clone(), k));
        }
        out.sort();
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ReportJson {
            d: usize,
            orbit_count: String,
            entries: Vec<EntryJson>,
        }
        let raw = ReportJson {
            d: self.d,
            orbit_count: self.orbit_count.to_string(),
            entries: self
                .entries
                .iter()
                .map(|(iv, w)| EntryJson { interval: [iv.lo.to_string(), iv.hi.to_string()], weight: w.to_strings(self.d) })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("report serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    interval: [String; 2],
    weight: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct WeightListJson {
    d: usize,
    entries: Vec<EntryJson>,
}

/// Working form of a weight list: `lo -> (hi, weight)` for nonzero runs.
#[derive(Clone, Debug)]
pub(crate) struct WeightMap<C: Coord> {
    pub(crate) segs: BTreeMap<C, (C, WeightVec)>,
}

impl<C: Coord> Default for WeightMap<C> {
    fn default() -> Self {
        WeightMap { segs: BTreeMap::new() }
    }
}

fn to_biguint<C: Coord>(x: &C) -> BigUint {
    x.to_big().to_biguint().expect("nonnegative count")
}

impl<C: Coord> WeightMap<C> {
    pub(crate) fn from_list(list: &WeightList) -> Option<Self> {
        let mut segs = BTreeMap::new();
        for (iv, w) in &list.entries {
            segs.insert(C::from_big(&iv.lo)?, (C::from_big(&iv.hi)?, w.clone()));
        }
        Some(WeightMap { segs })
    }

    pub(crate) fn to_list(&self, d: usize) -> WeightList {
        let entries = self.segs.iter().map(|(lo, (hi, w))| (Interval { lo: lo.to_big(), hi: hi.to_big() }, w.clone())).collect();
        WeightList { d, entries }
    }

    /// Makes `x` the start of a segment if it falls inside one.
    fn split_at(&mut self, x: &C) {
        let found = match self.segs.range(..x.clone()).next_back() {
            Some((lo, (hi, _))) if hi >= x => Some(lo.clone()),
            _ => None,
        };
        if let Some(lo) = found {
            let (hi, w) = self.segs.get_mut(&lo).unwrap();
            let old_hi = std::mem::replace(hi, x.clone() - one());
            let w = w.clone();
            self.segs.insert(x.clone(), (old_hi, w));
        }
    }

    /// Merges the segment starting at `x` into its left neighbour when they
    /// touch and carry the same weight.
    fn coalesce_at(&mut self, x: &C) {
        let Some((hi, w)) = self.segs.get(x) else { return };
        let Some((plo, (phi, pw))) = self.segs.range(..x.clone()).next_back() else { return };
        if phi.clone() + one() == *x && pw == w {
            let (plo, hi) = (plo.clone(), hi.clone());
            self.segs.remove(x);
            self.segs.get_mut(&plo).unwrap().0 = hi;
        }
    }

    /// Removes and returns the nonzero runs inside `[lo, hi]`.
    pub(crate) fn extract(&mut self, lo: &C, hi: &C) -> Vec<(C, C, WeightVec)> {
        self.split_at(lo);
        self.split_at(&(hi.clone() + one()));
        let keys: Vec<C> = self.segs.range((Included(lo.clone()), Included(hi.clone()))).map(|(k, _)| k.clone()).collect();
        keys.into_iter()
            .map(|k| {
                let (h, w) = self.segs.remove(&k).unwrap();
                (k, h, w)
            })
            .collect()
    }

    /// Adds `v` at every point of `[lo, hi]`.
    pub(crate) fn add(&mut self, lo: &C, hi: &C, v: WeightVec) {
        if v.is_zero() || lo > hi {
            return;
        }
        let end = hi.clone() + one();
        self.split_at(lo);
        self.split_at(&end);
        let inside: Vec<(C, C)> =
            self.segs.range((Included(lo.clone()), Excluded(end.clone()))).map(|(k, (h, _))| (k.clone(), h.clone())).collect();
        let mut cursor = lo.clone();
        let mut v = Some(v);
        let last = inside.len();
        let tail_gap = inside.last().is_none_or(|(_, h)| h < hi);
        for (idx, (k, h)) in inside.into_iter().enumerate() {
            let vr = v.as_ref().unwrap();
            if k > cursor {
                self.segs.insert(cursor.clone(), (k.clone() - one(), vr.clone()));
            }
            let seg = &mut self.segs.get_mut(&k).unwrap().1;
            if idx + 1 == last && !tail_gap {
                seg.add_owned(v.take().unwrap());
            } else {
                seg.add_assign(vr);
            }
            cursor = h + one();
        }
        if cursor <= *hi {
            self.segs.insert(cursor, (hi.clone(), v.take().unwrap()));
        }
        self.coalesce_at(lo);
        self.coalesce_at(&end);
    }

    /// Moves the weight on `range(p)` into the domain so that every orbit
    /// keeps its total. Afterwards the range carries zero weight.
    pub(crate) fn transfer(&mut self, p: &Pairing<C>) {
        let segs = self.extract(p.c(), p.d());
        if p.reversing {
            debug_assert!(p.b() < p.c(), "transfer by an untrimmed reflection");
            let s = p.a().clone() + p.d().clone();
            for (r, h, v) in segs {
                self.add(&(s.clone() - h), &(s.clone() - r), v);
            }
        } else if p.is_periodic() {
            let t = p.translation();
            let a = p.a().clone();
            let top = p.c().clone() - one();
            let mut uniform = WeightVec::zero();
            for (r, h, v) in segs {
                let (q, rem) = (h - r.clone() + one()).div_rem(&t);
                if !q.is_zero() {
                    uniform.add_owned(v.scaled(&to_biguint(&q)));
                }
                if rem.is_zero() {
                    continue;
                }
                let start = a.clone() + (r - a.clone()).mod_floor(&t);
                let end = start.clone() + rem - one();
                if end <= top {
                    self.add(&start, &end, v);
                } else {
                    self.add(&start, &top, v.clone());
                    self.add(&a, &(end - t.clone()), v);
                }
            }
            self.add(&a, &top, uniform);
        } else {
            let t = p.translation();
            for (r, h, v) in segs {
                self.add(&(r - t.clone()), &(h - t.clone()), v);
            }
        }
    }

    /// Number of maximal constant runs of `[1, n]`, zero runs included.
    pub(crate) fn runs(&self, n: &C) -> usize {
        let mut count = 0;
        let mut next = C::one();
        for (lo, (hi, _)) in &self.segs {
            if *lo > next {
                count += 1;
            }
            count += 1;
            next = hi.clone() + one();
        }
        if next <= *n {
            count += 1;
        }
        count
    }

    pub(crate) fn total(&self) -> WeightVec {
        let mut t = WeightVec::zero();
        for (lo, (hi, w)) in &self.segs {
            t.add_assign(&w.scaled(&to_biguint(&(hi.clone() - lo.clone() + one()))));
        }
        t
    }

    /// Splits the static run `[lo, hi]` into constant pieces (zero pieces
    /// included), appends them to `out` under consecutive labels, and removes
    /// them from the map.
    pub(crate) fn emit_run(&mut self, lo: &C, hi: &C, label: &mut BigInt, out: &mut Vec<(Interval, WeightVec)>) {
        let mut push = |from: &C, to: &C, w: WeightVec, label: &mut BigInt| {
            let width = (to.clone() - from.clone() + one()).to_big();
            let next = &*label + &width;
            out.push((Interval { lo: label.clone(), hi: &next - 1 }, w));
            *label = next;
        };
        let mut cursor = lo.clone();
        for (r, h, w) in self.extract(lo, hi) {
            if r > cursor {
                push(&cursor, &(r.clone() - one()), WeightVec::zero(), label);
            }
            push(&r, &h, w, label);
            cursor = h + one();
        }
        if cursor <= *hi {
            push(&cursor, hi, WeightVec::zero(), label);
        }
    }

    /// Renumbers after static runs (already emptied) have been removed.
    /// `shift(x)` gives the new coordinate of a surviving point.
    pub(crate) fn renumber(&mut self, shift: impl Fn(&C) -> C) {
        let old = std::mem::take(&mut self.segs);
        let mut last: Option<C> = None;
        for (lo, (hi, w)) in old {
            let (nlo, nhi) = (shift(&lo), shift(&hi));
            if let Some(l) = &last {
                let prev = self.segs.get_mut(l).unwrap();
                if prev.0.clone() + one() == nlo && prev.1 == w {
                    prev.0 = nhi;
                    continue;
                }
            }
            self.segs.insert(nlo.clone(), (nhi, w));
            last = Some(nlo);
        }
    }
}

/// Transfers weights by `p` on a standalone list. Reflections are trimmed
/// first.
pub fn transfer(p: &Pairing, list: &WeightList) -> WeightList {
    let p = crate::interval::trim(p);
    let mut map = WeightMap::<BigInt>::from_list(list).expect("BigInt holds every coordinate");
    map.transfer(&p);
    map.to_list(list.d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(xs: &[u32]) -> WeightVec {
        WeightVec::from_dense(&xs.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>())
    }
    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo.into(), hi.into()).unwrap()
    }
    fn p(a: i64, b: i64, c: i64, d: i64, rev: bool) -> Pairing {
        Pairing::new(iv(a, b), iv(c, d), rev).unwrap()
    }
    fn at(list: &WeightList, x: i64) -> WeightVec {
        let x = BigInt::from(x);
        list.entries().iter().find(|(i, _)| i.contains(&x)).map_or(WeightVec::zero(), |(_, w)| w.clone())
    }

    #[test]
    fn vector_arithmetic() {
        let mut a = w(&[1, 0, 2]);
        a.add_assign(&w(&[0, 3, 1, 4]));
        assert_eq!(a, w(&[1, 3, 3, 4]));
        assert_eq!(a.scaled(&BigUint::from(2u32)), w(&[2, 6, 6, 8]));
        assert!(a.scaled(&BigUint::zero()).is_zero());
        assert_eq!(a.to_dense(5)[4], BigUint::zero());
        assert_eq!(WeightVec::from_sparse(vec![(3, 1u32.into()), (1, 2u32.into()), (3, 1u32.into())]), w(&[0, 2, 0, 2]));
    }

    #[test]
    fn list_normalizes() {
        let l = WeightList::new(1, vec![(iv(1, 2), w(&[1])), (iv(3, 4), w(&[1])), (iv(6, 6), w(&[0]))]).unwrap();
        assert_eq!(l.entries().len(), 1);
        assert_eq!(l.entries()[0].0, iv(1, 4));
        assert_eq!(l.runs(&BigInt::from(7)), 2);
        assert!(WeightList::new(1, vec![(iv(1, 3), w(&[1])), (iv(3, 4), w(&[2]))]).is_err());
        assert!(matches!(WeightList::new(1, vec![(iv(1, 3), w(&[1, 1]))]), Err(OrbitError::Dimension { .. })));
    }

    #[test]
    fn transfer_case_one() {
        let l = WeightList::new(1, vec![(iv(4, 5), w(&[3]))]).unwrap();
        let out = transfer(&p(1, 2, 4, 5, false), &l);
        assert_eq!(out.entries(), &[(iv(1, 2), w(&[3]))]);
    }

    #[test]
    fn transfer_case_two() {
        let l = WeightList::new(1, vec![(iv(3, 7), w(&[1]))]).unwrap();
        let out = transfer(&p(1, 5, 3, 7, false), &l);
        assert_eq!(at(&out, 1), w(&[3]));
        assert_eq!(at(&out, 2), w(&[2]));
        for x in 3..=7 {
            assert!(at(&out, x).is_zero());
        }
    }

    #[test]
    fn transfer_case_two_wraps() {
        let l = WeightList::new(1, vec![(iv(6, 9), w(&[1])), (iv(10, 10), w(&[5]))]).unwrap();
        let out = transfer(&p(1, 7, 4, 10, false), &l);
        assert_eq!(at(&out, 1), w(&[6]));
        assert_eq!(at(&out, 2), w(&[1]));
        assert_eq!(at(&out, 3), w(&[2]));
    }

    #[test]
    fn transfer_case_three() {
        let l = WeightList::new(1, vec![(iv(7, 7), w(&[2]))]).unwrap();
        let out = transfer(&p(1, 3, 7, 9, true), &l);
        assert_eq!(out.entries(), &[(iv(3, 3), w(&[2]))]);
        let l = WeightList::new(1, vec![(iv(1, 9), w(&[1]))]).unwrap();
        let out = transfer(&p(1, 6, 4, 9, true), &l);
        assert_eq!(at(&out, 1), w(&[2]));
        assert_eq!(at(&out, 5), w(&[1]));
        assert!(at(&out, 6).is_zero());
    }

    #[test]
    fn add_coalesces() {
        let mut m = WeightMap::<i64>::default();
        m.add(&1, &3, w(&[1]));
        m.add(&4, &6, w(&[1]));
        assert_eq!(m.segs.len(), 1);
        m.add(&2, &2, w(&[1]));
        assert_eq!(m.segs.len(), 3);
        assert_eq!(m.runs(&8), 4);
        assert_eq!(m.total(), w(&[7]));
    }

    #[test]
    fn json_round_trip() {
        let l = WeightList::new(2, vec![(iv(1, 2), w(&[1, 0])), (iv(5, 9), w(&[0, 7]))]).unwrap();
        assert_eq!(WeightList::from_json(&l.to_json()).unwrap(), l);
        assert!(WeightList::from_json(r#"{"d": 2, "entries": [{"interval": ["1","2"], "weight": ["1"]}]}"#).is_err());
    }

    #[test]
    fn owned_add_matches_borrowed() {
        let mut a = w(&[1, 0, 2]);
        let mut b = a.clone();
        a.add_owned(w(&[0, 3, 1, 4, 5]));
        b.add_assign(&w(&[0, 3, 1, 4, 5]));
        assert_eq!(a, b);
        assert_eq!(a.nnz(), 5);
    }

    #[test]
    fn additive_list_sums_overlaps() {
        let l = WeightList::from_additive(2, vec![(iv(1, 5), w(&[1])), (iv(3, 8), w(&[0, 2])), (iv(4, 4), w(&[1]))]).unwrap();
        assert_eq!(at(&l, 2), w(&[1]));
        assert_eq!(at(&l, 3), w(&[1, 2]));
        assert_eq!(at(&l, 4), w(&[2, 2]));
        assert_eq!(at(&l, 6), w(&[0, 2]));
        assert_eq!(at(&l, 9), WeightVec::zero());
        assert_eq!(l.entries().len(), 5);
    }
}
