//! How many domains and ranges cover each point, kept as a partition of
//! `[1, n]` into runs of constant count so that static points are found
//! without scanning every pairing.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound::{Excluded, Included};

use crate::coord::{one, Coord};

#[derive(Clone, Debug)]
pub(crate) struct Coverage<C: Coord> {
    n: C,
    /// `lo -> (hi, count)`; neighbouring runs always have different counts.
    segs: BTreeMap<C, (C, u32)>,
    /// Starts of the runs with count zero.
    zeros: BTreeSet<C>,
    /// Points that dropped to count zero since the last `take_fresh`.
    fresh: Vec<C>,
}

impl<C: Coord> Coverage<C> {
    pub(crate) fn new(n: C) -> Self {
        let mut c = Coverage { n: n.clone(), segs: BTreeMap::new(), zeros: BTreeSet::new(), fresh: Vec::new() };
        if n >= one() {
            c.segs.insert(one(), (n, 0));
            c.zeros.insert(one());
        }
        c
    }

    fn split_at(&mut self, x: &C) {
        if *x > self.n {
            return;
        }
        let found = match self.segs.range(..x.clone()).next_back() {
            Some((lo, (hi, _))) if hi >= x => Some(lo.clone()),
            _ => None,
        };
        if let Some(lo) = found {
            let (hi, count) = self.segs.get_mut(&lo).unwrap();
            let old_hi = std::mem::replace(hi, x.clone() - one());
            let count = *count;
            self.segs.insert(x.clone(), (old_hi, count));
            if count == 0 {
                self.zeros.insert(x.clone());
            }
        }
    }

    fn coalesce_at(&mut self, x: &C) {
        let Some(&(ref hi, count)) = self.segs.get(x) else { return };
        let Some((plo, &(ref phi, pcount))) = self.segs.range(..x.clone()).next_back() else { return };
        if phi.clone() + one() == *x && pcount == count {
            let (plo, hi) = (plo.clone(), hi.clone());
            self.segs.remove(x);
            self.zeros.remove(x);
            self.segs.get_mut(&plo).unwrap().0 = hi;
        }
    }

    /// Adds `delta` to the count of every point in `[lo, hi]`.
    pub(crate) fn add(&mut self, lo: &C, hi: &C, delta: i32) {
        let end = hi.clone() + one();
        self.split_at(lo);
        self.split_at(&end);
        let keys: Vec<C> = self.segs.range((Included(lo.clone()), Excluded(end.clone()))).map(|(k, _)| k.clone()).collect();
        for k in keys {
            let seg = self.segs.get_mut(&k).unwrap();
            let before = seg.1;
            seg.1 = (before as i64 + delta as i64).try_into().expect("coverage count stays nonnegative");
            match (before == 0, seg.1 == 0) {
                (true, false) => {
                    self.zeros.remove(&k);
                }
                (false, true) => {
                    self.fresh.push(k.clone());
                    self.zeros.insert(k);
                }
                _ => {}
            }
        }
        self.coalesce_at(lo);
        self.coalesce_at(&end);
    }

    /// Maximal runs covered by nothing, in increasing order.
    pub(crate) fn static_runs(&self) -> Vec<(C, C)> {
        self.zeros.iter().map(|lo| (lo.clone(), self.segs[lo].0.clone())).collect()
    }

    /// The maximal uncovered run containing `x`, if `x` is uncovered.
    pub(crate) fn zero_run_at(&self, x: &C) -> Option<(C, C)> {
        let (lo, (hi, count)) = self.segs.range(..=x.clone()).next_back()?;
        (*count == 0 && hi >= x).then(|| (lo.clone(), hi.clone()))
    }

    pub(crate) fn take_fresh(&mut self) -> Vec<C> {
        std::mem::take(&mut self.fresh)
    }

    pub(crate) fn has_static(&self) -> bool {
        !self.zeros.is_empty()
    }

    /// Drops `(to, n]`, which must already be uncovered.
    pub(crate) fn truncate(&mut self, to: &C) {
        self.split_at(&(to.clone() + one()));
        let tail: Vec<C> = self.segs.range(to.clone() + one()..).map(|(k, _)| k.clone()).collect();
        for k in tail {
            let (_, count) = self.segs.remove(&k).unwrap();
            debug_assert_eq!(count, 0, "truncated point still covered");
            self.zeros.remove(&k);
        }
        self.n = to.clone();
    }

    #[cfg(test)]
    pub(crate) fn count_at(&self, x: &C) -> u32 {
        self.segs.range(..=x.clone()).next_back().map_or(0, |(_, (_, c))| *c)
    }

    #[cfg(test)]
    pub(crate) fn segment_count(&self) -> usize {
        self.segs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_static_runs() {
        let mut c = Coverage::<i64>::new(10);
        assert_eq!(c.static_runs(), vec![(1, 10)]);
        c.add(&2, &4, 1);
        c.add(&4, &6, 1);
        assert_eq!(c.static_runs(), vec![(1, 1), (7, 10)]);
        assert_eq!(c.count_at(&4), 2);
        c.add(&4, &6, -1);
        assert_eq!(c.static_runs(), vec![(1, 1), (5, 10)]);
        assert_eq!(c.segment_count(), 3);
        c.add(&2, &4, -1);
        assert_eq!(c.segment_count(), 1);
        c.add(&9, &10, 1);
        c.add(&9, &10, -1);
        c.truncate(&8);
        assert_eq!(c.static_runs(), vec![(1, 8)]);
        assert!(c.has_static());
    }
}
