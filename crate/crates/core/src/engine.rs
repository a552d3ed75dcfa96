//! The orbit-counting loop.
//!
//! Each cycle runs the six steps in order: delete identities, contract static
//! runs, trim overlapping reflections, merge periodic pairings, transmit
//! everything under the maximal pairing, truncate. Only pairings touched since
//! the previous cycle are re-examined in the first, third and fourth steps, and
//! static points come from an incrementally maintained coverage count, so a
//! cycle costs time proportional to the pairings it actually changes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Bound::Included;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coord::{fits_machine_word, one, Coord};
use crate::coverage::Coverage;
use crate::error::{OrbitError, Result};
use crate::interval::{can_merge, merge_periodic, transmit, trim, Interval, Pairing};
use crate::system::{complexity_of, order_key, shorten, truncation_point, OrderKey, PairingSystem};
use crate::weights::{OrbitWeightReport, WeightList, WeightMap, WeightVec};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Record a trace row after every step.
    pub trace: bool,
    /// Record the whole system at the start of every cycle.
    pub snapshots: bool,
    /// Record constant-run counts around every transfer and check that the
    /// total weight is conserved after every step.
    pub instrument_weights: bool,
    /// Renumber every static run away in every Step (2). By default only the
    /// static run at the top is dropped, and interior runs are renumbered away
    /// only when one of them is all that separates the domain and range of a
    /// translation, the one situation where a leftover static run changes what
    /// the later steps do. Both modes perform the same pairing operations up
    /// to an order preserving renumbering, so cycle counts and `X` agree.
    pub eager_contraction: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub cycle: u64,
    pub step: u8,
    pub n: BigInt,
    pub k: usize,
    pub x: BigInt,
}

/// Rows in execution order. Row `(0, 0)` is the input; a cycle that stops in
/// Step (2) has no rows past step 2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle,step,n,k,x\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{}", r.cycle, r.step, r.n, r.k, r.x).unwrap();
        }
        out
    }

    /// `X` at the start of every cycle, followed by `X` at termination.
    pub fn x_at_cycle_starts(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.rows.iter().filter(|r| r.step == 0 || r.step == 6).map(|r| r.x.clone()).collect();
        if let Some(last) = self.rows.last() {
            if last.step != 6 && last.step != 0 {
                out.push(last.x.clone());
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub orbits: BigInt,
    /// Cycles that reached Step (6).
    pub cycles: u64,
    pub initial_k: usize,
    pub trace: Option<Trace>,
    pub snapshots: Vec<PairingSystem>,
    pub report: Option<OrbitWeightReport>,
    /// `(runs before, runs after)` for every transfer, when instrumented.
    pub transfer_growth: Vec<(usize, usize)>,
    /// False if an instrumented run ever saw the total weight change.
    pub conserved: bool,
    /// Step (2) executions that renumbered interior static runs.
    pub full_contractions: u64,
}

/// Number of orbits of the pairings on `[1, n]`.
pub fn count_orbits(sys: &PairingSystem) -> BigInt {
    run(sys, None, &RunOptions::default()).expect("valid system").orbits
}

/// Orbit count together with the per-step trace.
pub fn count_orbits_traced(sys: &PairingSystem) -> (BigInt, Trace) {
    let out = run(sys, None, &RunOptions { trace: true, ..Default::default() }).expect("valid system");
    (out.orbits, out.trace.unwrap())
}

/// Per-orbit weight sums.
pub fn weighted_count(sys: &PairingSystem, weights: &WeightList) -> Result<OrbitWeightReport> {
    Ok(run(sys, Some(weights), &RunOptions::default())?.report.unwrap())
}

pub fn run(sys: &PairingSystem, weights: Option<&WeightList>, opts: &RunOptions) -> Result<RunOutcome> {
    if let Some(w) = weights {
        w.check_against(&sys.n)?;
    }
    if fits_machine_word(&sys.n) {
        Engine::<i64>::start(sys, weights, opts)?.finish()
    } else {
        Engine::<BigInt>::start(sys, weights, opts)?.finish()
    }
}

struct WeightState<C: Coord> {
    d: usize,
    map: WeightMap<C>,
    out: Vec<(Interval, WeightVec)>,
    label: BigInt,
    initial_total: WeightVec,
}

struct Engine<C: Coord> {
    n: C,
    slots: Vec<Option<Pairing<C>>>,
    order: BTreeSet<OrderKey<C>>,
    by_c: BTreeSet<(C, usize)>,
    /// Periodic pairings keyed by the start of their periodic interval.
    periodic: BTreeSet<(C, usize)>,
    /// Multiset of periodic interval widths, to bound merge searches.
    periodic_widths: BTreeMap<C, usize>,
    cover: Coverage<C>,
    /// Translations whose domain and range are separated, as `(b, c, id)`.
    gapped: BTreeSet<(C, C, usize)>,
    /// Gapped translations indexed since the last hidden-gap check.
    gap_check: Vec<usize>,
    full_contractions: u64,
    dirty: Vec<usize>,
    is_dirty: Vec<bool>,
    live: usize,
    counter: BigInt,
    cycles: u64,
    initial_k: usize,
    weights: Option<WeightState<C>>,
    opts: RunOptions,
    trace: Vec<TraceRow>,
    snapshots: Vec<PairingSystem>,
    growth: Vec<(usize, usize)>,
    conserved: bool,
}

fn convert<C: Coord>(x: &BigInt) -> Result<C> {
    C::from_big(x).ok_or_else(|| OrbitError::Internal(format!("{x} does not fit the coordinate type")))
}

impl<C: Coord> Engine<C> {
    fn start(sys: &PairingSystem, weights: Option<&WeightList>, opts: &RunOptions) -> Result<Self> {
        let n: C = convert(&sys.n)?;
        let weights = match weights {
            Some(list) => Some(WeightState {
                d: list.dim(),
                map: WeightMap::from_list(list).ok_or_else(|| OrbitError::Internal("weight coordinate overflow".into()))?,
                out: Vec::new(),
                label: BigInt::one(),
                initial_total: list.total(),
            }),
            None => None,
        };
        let mut e = Engine {
            cover: Coverage::new(n.clone()),
            gapped: BTreeSet::new(),
            gap_check: Vec::new(),
            full_contractions: 0,
            n,
            slots: Vec::with_capacity(sys.pairings.len()),
            order: BTreeSet::new(),
            by_c: BTreeSet::new(),
            periodic: BTreeSet::new(),
            periodic_widths: BTreeMap::new(),
            dirty: Vec::new(),
            is_dirty: Vec::new(),
            live: 0,
            counter: BigInt::zero(),
            cycles: 0,
            initial_k: sys.pairings.len(),
            weights,
            opts: opts.clone(),
            trace: Vec::new(),
            snapshots: Vec::new(),
            growth: Vec::new(),
            conserved: true,
        };
        for p in &sys.pairings {
            let q = Pairing::from_big(p).ok_or_else(|| OrbitError::Internal("pairing coordinate overflow".into()))?;
            e.insert(q);
        }
        e.record(0, 0);
        Ok(e)
    }

    fn mark(&mut self, id: usize) {
        if !self.is_dirty[id] {
            self.is_dirty[id] = true;
            self.dirty.push(id);
        }
    }

    fn index(&mut self, id: usize, p: &Pairing<C>) {
        self.order.insert(order_key(p, id));
        self.by_c.insert((p.c().clone(), id));
        if p.is_periodic() && !p.is_identity() {
            self.periodic.insert((p.a().clone(), id));
            *self.periodic_widths.entry(p.d().clone() - p.a().clone() + one()).or_insert(0) += 1;
        }
        if !p.reversing && p.c().clone() > p.b().clone() + one() {
            self.gapped.insert((p.b().clone(), p.c().clone(), id));
            self.gap_check.push(id);
        }
        self.cover.add(&p.domain.lo, &p.domain.hi, 1);
        self.cover.add(&p.range.lo, &p.range.hi, 1);
    }

    fn unindex(&mut self, id: usize, p: &Pairing<C>) {
        self.order.remove(&order_key(p, id));
        self.by_c.remove(&(p.c().clone(), id));
        if p.is_periodic() && !p.is_identity() {
            self.periodic.remove(&(p.a().clone(), id));
            let w = p.d().clone() - p.a().clone() + one();
            let slot = self.periodic_widths.get_mut(&w).expect("indexed width");
            *slot -= 1;
            if *slot == 0 {
                self.periodic_widths.remove(&w);
            }
        }
        if !p.reversing && p.c().clone() > p.b().clone() + one() {
            self.gapped.remove(&(p.b().clone(), p.c().clone(), id));
        }
        self.cover.add(&p.domain.lo, &p.domain.hi, -1);
        self.cover.add(&p.range.lo, &p.range.hi, -1);
    }

    fn insert(&mut self, p: Pairing<C>) -> usize {
        let id = self.slots.len();
        self.index(id, &p);
        self.slots.push(Some(p));
        self.is_dirty.push(false);
        self.mark(id);
        self.live += 1;
        id
    }

    fn remove(&mut self, id: usize) -> Pairing<C> {
        let p = self.slots[id].take().expect("live pairing");
        self.unindex(id, &p);
        self.live -= 1;
        p
    }

    fn replace(&mut self, id: usize, p: Pairing<C>) {
        let old = self.slots[id].take().expect("live pairing");
        self.unindex(id, &old);
        self.index(id, &p);
        self.slots[id] = Some(p);
        self.mark(id);
    }

    fn live_pairings(&self) -> impl Iterator<Item = &Pairing<C>> {
        self.slots.iter().flatten()
    }

    fn record(&mut self, cycle: u64, step: u8) {
        if self.opts.trace {
            let x = complexity_of(self.live_pairings());
            self.trace.push(TraceRow { cycle, step, n: self.n.to_big(), k: self.live, x });
        }
        if self.opts.instrument_weights {
            if let Some(ws) = &self.weights {
                let mut total = ws.map.total();
                for (iv, w) in &ws.out {
                    total.add_assign(&w.scaled(&iv.width().to_biguint().unwrap()));
                }
                if total != ws.initial_total {
                    self.conserved = false;
                }
            }
        }
    }

    fn snapshot(&mut self) {
        if self.opts.snapshots {
            let pairings = self.live_pairings().map(|p| p.to_big()).collect();
            self.snapshots.push(PairingSystem { n: self.n.to_big(), pairings, orbit_counter: self.counter.clone() });
        }
    }

    fn finish(mut self) -> Result<RunOutcome> {
        let mut cycle = 0u64;
        loop {
            cycle += 1;
            self.snapshot();
            let dirty: Vec<usize> = std::mem::take(&mut self.dirty);
            for &id in &dirty {
                self.is_dirty[id] = false;
            }

            // (1) identities
            for &id in &dirty {
                if self.slots[id].as_ref().is_some_and(|p| p.is_identity()) {
                    self.remove(id);
                }
            }
            self.record(cycle, 1);

            // (2) contraction
            if self.opts.eager_contraction {
                self.contract();
            } else {
                self.contract_top();
                if self.hidden_gap() {
                    self.full_contractions += 1;
                    self.contract();
                }
            }
            self.record(cycle, 2);
            if self.live == 0 {
                debug_assert!(self.n.is_zero());
                break;
            }

            // (3) trimming
            for &id in &dirty {
                if let Some(p) = &self.slots[id] {
                    if p.needs_trim() {
                        let q = trim(p);
                        self.replace(id, q);
                    }
                }
            }
            self.record(cycle, 3);

            // (4) mergers
            self.merge_all(&dirty)?;
            self.record(cycle, 4);
            for id in std::mem::take(&mut self.dirty) {
                self.is_dirty[id] = false;
            }

            // (5) transmission
            let top = self.order.iter().next_back().expect("pairings remain").4 .0;
            let gi = self.slots[top].clone().unwrap();
            let movers: Vec<usize> =
                self.by_c.range((gi.c().clone(), 0)..).map(|(_, id)| *id).filter(|&id| id != top).collect();
            for id in movers {
                let q = transmit(self.slots[id].as_ref().unwrap(), &gi)?;
                self.replace(id, q);
            }
            self.record(cycle, 5);

            // (6) truncation
            let other = self.order.iter().rev().find(|k| k.4 .0 != top).map(|k| k.0.clone());
            let to = truncation_point(&gi, other.as_ref());
            if to >= self.n {
                return Err(OrbitError::Internal(format!("cannot truncate below {} at cycle {cycle}", self.n)));
            }
            if let Some(ws) = self.weights.as_mut() {
                let n = self.n.clone();
                let before = if self.opts.instrument_weights { ws.map.runs(&n) } else { 0 };
                ws.map.transfer(&gi);
                if self.opts.instrument_weights {
                    self.growth.push((before, ws.map.runs(&n)));
                }
            }
            match shorten(&gi, &to) {
                Some(q) => self.replace(top, q),
                None => {
                    self.remove(top);
                }
            }
            self.cover.truncate(&to);
            self.n = to;
            self.cycles += 1;
            self.record(cycle, 6);
        }
        let report = self.weights.take().map(|ws| OrbitWeightReport { d: ws.d, entries: ws.out, orbit_count: self.counter.clone() });
        Ok(RunOutcome {
            orbits: self.counter,
            cycles: self.cycles,
            initial_k: self.initial_k,
            trace: self.opts.trace.then_some(Trace { rows: self.trace }),
            snapshots: self.snapshots,
            report,
            transfer_growth: self.growth,
            conserved: self.conserved,
            full_contractions: self.full_contractions,
        })
    }

    fn contract(&mut self) {
        if !self.cover.has_static() {
            return;
        }
        let runs = self.cover.static_runs();
        let mut prefix: Vec<C> = Vec::with_capacity(runs.len() + 1);
        prefix.push(C::zero());
        for (lo, hi) in &runs {
            let w = hi.clone() - lo.clone() + one();
            prefix.push(prefix.last().unwrap().clone() + w);
            if let Some(ws) = self.weights.as_mut() {
                ws.map.emit_run(lo, hi, &mut ws.label, &mut ws.out);
            }
        }
        let removed = prefix.last().unwrap().clone();
        let shift = |x: &C| -> C {
            let below = runs.partition_point(|(_, hi)| hi < x);
            x.clone() - prefix[below].clone()
        };
        if let Some(ws) = self.weights.as_mut() {
            ws.map.renumber(&shift);
        }
        self.counter += removed.to_big();
        self.n = self.n.clone() - removed;

        let shifted: Vec<Option<Pairing<C>>> = self
            .slots
            .iter()
            .map(|s| {
                s.as_ref().map(|p| Pairing {
                    domain: Interval { lo: shift(&p.domain.lo), hi: shift(&p.domain.hi) },
                    range: Interval { lo: shift(&p.range.lo), hi: shift(&p.range.hi) },
                    reversing: p.reversing,
                })
            })
            .collect();
        self.order.clear();
        self.by_c.clear();
        self.periodic.clear();
        self.periodic_widths.clear();
        self.gapped.clear();
        self.cover = Coverage::new(self.n.clone());
        for (id, p) in shifted.iter().enumerate() {
            if let Some(p) = p {
                self.index(id, p);
            }
        }
        self.slots = shifted;
        self.gap_check.clear();
        self.cover.take_fresh();
    }

    /// Whether some translation has only static points between its domain
    /// and range, so that full contraction would make it periodic. Only
    /// pairings and static points that changed since the last call are
    /// examined.
    fn hidden_gap(&mut self) -> bool {
        let fresh = self.cover.take_fresh();
        let check = std::mem::take(&mut self.gap_check);
        let mut found = false;
        for id in check {
            if let Some(p) = &self.slots[id] {
                if !p.reversing && p.c().clone() > p.b().clone() + one() {
                    if let Some((_, hi)) = self.cover.zero_run_at(&(p.b().clone() + one())) {
                        found |= hi.clone() + one() == *p.c();
                    }
                }
            }
        }
        for x in fresh {
            if found {
                break;
            }
            if x > self.n {
                continue;
            }
            if let Some((lo, hi)) = self.cover.zero_run_at(&x) {
                let (b, c) = (lo - one(), hi + one());
                found |= self.gapped.range((b.clone(), c.clone(), 0)..=(b, c, usize::MAX)).next().is_some();
            }
        }
        found
    }

    /// Drops the static points above every pairing.
    fn contract_top(&mut self) {
        let top = self.order.iter().next_back().map_or_else(C::zero, |k| k.0.clone());
        if top >= self.n {
            return;
        }
        if let Some(ws) = self.weights.as_mut() {
            ws.map.emit_run(&(top.clone() + one()), &self.n, &mut ws.label, &mut ws.out);
        }
        self.counter += (self.n.clone() - top.clone()).to_big();
        self.cover.truncate(&top);
        self.n = top;
    }

    /// Finds a periodic pairing that can merge with `id`.
    fn merge_partner(&self, id: usize) -> Option<usize> {
        let p = self.slots[id].as_ref()?;
        if !p.is_periodic() || p.is_identity() {
            return None;
        }
        let widest = self.periodic_widths.keys().next_back()?.clone();
        let from = p.a().clone() - widest + one();
        self.periodic
            .range((Included((from, 0)), Included((p.d().clone(), usize::MAX))))
            .map(|(_, j)| *j)
            .find(|&j| j != id && can_merge(p, self.slots[j].as_ref().unwrap()))
    }

    fn merge_all(&mut self, dirty: &[usize]) -> Result<()> {
        let mut work: Vec<usize> = dirty.to_vec();
        while let Some(id) = work.pop() {
            if let Some(j) = self.merge_partner(id) {
                let p = self.remove(id);
                let q = self.remove(j);
                let m = merge_periodic(&p, &q)?;
                work.push(self.insert(m));
            }
        }
        Ok(())
    }
}
