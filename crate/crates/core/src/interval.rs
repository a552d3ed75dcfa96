//! Intervals of integers and the pairings between them.

use std::fmt;

use num_bigint::BigInt;

use crate::coord::{one, Coord};
use crate::error::{OrbitError, Result};

/// The integers `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval<C = BigInt> {
    pub lo: C,
    pub hi: C,
}

impl<C: Coord> Interval<C> {
    pub fn new(lo: C, hi: C) -> Result<Self> {
        if lo > hi || lo < one() {
            return Err(OrbitError::BadInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Interval { lo, hi })
    }

    /// Builds without validation; callers guarantee `lo <= hi`.
    pub(crate) fn raw(lo: C, hi: C) -> Self {
        debug_assert!(lo <= hi, "raw interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn width(&self) -> C {
        self.hi.clone() - self.lo.clone() + one()
    }

    pub fn contains(&self, x: &C) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval<C>) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn shifted(&self, by: &C) -> Self {
        Interval { lo: self.lo.clone() + by.clone(), hi: self.hi.clone() + by.clone() }
    }

    /// Image under the reflection `y -> s - y`.
    pub fn reflected(&self, s: &C) -> Self {
        Interval { lo: s.clone() - self.hi.clone(), hi: s.clone() - self.lo.clone() }
    }

    pub fn to_big(&self) -> Interval<BigInt> {
        Interval { lo: self.lo.to_big(), hi: self.hi.to_big() }
    }

    pub fn from_big(i: &Interval<BigInt>) -> Option<Self> {
        Some(Interval { lo: C::from_big(&i.lo)?, hi: C::from_big(&i.hi)? })
    }
}

impl<C: fmt::Display> fmt::Display for Interval<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An isometry between two equal-width intervals, stored with
/// `domain.lo <= range.lo`.
///
/// A preserving pairing is the translation `x -> x + t`; a reversing one maps
/// `domain.lo` to `range.hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing<C = BigInt> {
    pub domain: Interval<C>,
    pub range: Interval<C>,
    pub reversing: bool,
}

impl<C: Coord> Pairing<C> {
    /// Checks widths and puts the pairing in canonical form.
    pub fn new(domain: Interval<C>, range: Interval<C>, reversing: bool) -> Result<Self> {
        if domain.lo > domain.hi || domain.lo < one() {
            return Err(OrbitError::BadInterval { lo: domain.lo.to_string(), hi: domain.hi.to_string() });
        }
        if range.lo > range.hi || range.lo < one() {
            return Err(OrbitError::BadInterval { lo: range.lo.to_string(), hi: range.hi.to_string() });
        }
        if domain.width() != range.width() {
            return Err(OrbitError::WidthMismatch {
                domain: domain.width().to_string(),
                range: range.width().to_string(),
            });
        }
        Ok(Self::canonical(domain, range, reversing))
    }

    /// Swaps domain and range (taking the inverse) when needed.
    pub(crate) fn canonical(domain: Interval<C>, range: Interval<C>, reversing: bool) -> Self {
        debug_assert!(domain.width() == range.width());
        if domain.lo <= range.lo {
            Pairing { domain, range, reversing }
        } else {
            Pairing { domain: range, range: domain, reversing }
        }
    }

    pub fn preserving(domain: Interval<C>, range: Interval<C>) -> Result<Self> {
        Self::new(domain, range, false)
    }

    pub fn reversing(domain: Interval<C>, range: Interval<C>) -> Result<Self> {
        Self::new(domain, range, true)
    }

    pub fn a(&self) -> &C {
        &self.domain.lo
    }
    pub fn b(&self) -> &C {
        &self.domain.hi
    }
    pub fn c(&self) -> &C {
        &self.range.lo
    }
    pub fn d(&self) -> &C {
        &self.range.hi
    }

    pub fn width(&self) -> C {
        self.domain.width()
    }

    /// Translation distance `c - a`.
    pub fn translation(&self) -> C {
        self.c().clone() - self.a().clone()
    }

    /// True when the pairing fixes every point it touches.
    pub fn is_identity(&self) -> bool {
        self.domain == self.range && (!self.reversing || self.domain.lo == self.domain.hi)
    }

    pub fn is_periodic(&self) -> bool {
        !self.reversing && self.c().clone() <= self.b().clone() + one()
    }

    pub(crate) fn needs_trim(&self) -> bool {
        self.reversing && self.b() >= self.c() && self.domain.lo != self.domain.hi
    }

    pub fn to_big(&self) -> Pairing<BigInt> {
        Pairing { domain: self.domain.to_big(), range: self.range.to_big(), reversing: self.reversing }
    }

    pub fn from_big(p: &Pairing<BigInt>) -> Option<Self> {
        Some(Pairing {
            domain: Interval::from_big(&p.domain)?,
            range: Interval::from_big(&p.range)?,
            reversing: p.reversing,
        })
    }
}

impl<C: fmt::Display> fmt::Display for Pairing<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.reversing { "~>" } else { "->" };
        write!(f, "{}{}{}", self.domain, arrow, self.range)
    }
}

/// Evaluates the pairing at `x`, using the inverse when `x` lies only in the range.
pub fn apply<C: Coord>(p: &Pairing<C>, x: &C) -> Result<C> {
    if p.domain.contains(x) {
        Ok(if p.reversing {
            p.a().clone() + p.d().clone() - x.clone()
        } else {
            x.clone() + p.translation()
        })
    } else if p.range.contains(x) {
        Ok(if p.reversing {
            p.a().clone() + p.d().clone() - x.clone()
        } else {
            x.clone() - p.translation()
        })
    } else {
        Err(OrbitError::Domain { x: x.to_string() })
    }
}

pub fn is_periodic<C: Coord>(p: &Pairing<C>) -> bool {
    p.is_periodic()
}

/// Replaces an overlapping reflection by one with disjoint domain and range.
/// The fixed midpoint, when there is one, is left unpaired.
pub fn trim<C: Coord>(p: &Pairing<C>) -> Pairing<C> {
    if !p.needs_trim() {
        return p.clone();
    }
    let s = p.a().clone() + p.d().clone();
    let two = C::one() + C::one();
    let (half_floor, rem) = s.div_rem(&two);
    let half_ceil = if rem.is_zero() { half_floor.clone() } else { half_floor.clone() + one() };
    let domain = Interval::raw(p.a().clone(), half_ceil - one());
    let range = Interval::raw(half_floor + one(), p.d().clone());
    Pairing { domain, range, reversing: true }
}

/// The periodic interval `[a, d]` of a periodic pairing.
pub fn periodic_interval<C: Coord>(p: &Pairing<C>) -> Interval<C> {
    Interval::raw(p.a().clone(), p.d().clone())
}

/// Width of the intersection of two intervals (zero when disjoint).
pub(crate) fn overlap_width<C: Coord>(x: &Interval<C>, y: &Interval<C>) -> C {
    let lo = std::cmp::max(&x.lo, &y.lo).clone();
    let hi = std::cmp::min(&x.hi, &y.hi).clone();
    if hi < lo {
        C::zero()
    } else {
        hi - lo + one()
    }
}

pub(crate) fn can_merge<C: Coord>(p1: &Pairing<C>, p2: &Pairing<C>) -> bool {
    p1.is_periodic()
        && p2.is_periodic()
        && overlap_width(&periodic_interval(p1), &periodic_interval(p2)) >= p1.translation() + p2.translation()
}

/// Replaces two sufficiently overlapping periodic pairings by one periodic
/// pairing of period `gcd(t1, t2)` on the union of their periodic intervals.
pub fn merge_periodic<C: Coord>(p1: &Pairing<C>, p2: &Pairing<C>) -> Result<Pairing<C>> {
    if !p1.is_periodic() || !p2.is_periodic() {
        return Err(OrbitError::MergeCondition("both pairings must be periodic".into()));
    }
    if !can_merge(p1, p2) {
        return Err(OrbitError::MergeCondition(format!(
            "periodic intervals of {p1} and {p2} overlap in fewer than t1 + t2 points"
        )));
    }
    let g = p1.translation().gcd(&p2.translation());
    let lo = std::cmp::min(p1.a(), p2.a()).clone();
    let hi = std::cmp::max(p1.d(), p2.d()).clone();
    Ok(Pairing {
        domain: Interval::raw(lo.clone(), hi.clone() - g.clone()),
        range: Interval::raw(lo + g, hi),
        reversing: false,
    })
}

/// Pulls `mover` back through `by` as far as possible: the result is
/// `by^-r o mover` or `by^-r o mover o by^s` with `r`, `s` maximal.
///
/// `by` is trimmed first. The result may be an identity; the caller deletes it.
pub fn transmit<C: Coord>(mover: &Pairing<C>, by: &Pairing<C>) -> Result<Pairing<C>> {
    let by = trim(by);
    if !by.range.contains_interval(&mover.range) {
        return Err(OrbitError::Transmission(format!(
            "range {} of the mover is not inside range {} of the transmitting pairing",
            mover.range, by.range
        )));
    }
    let moves_domain = by.range.contains_interval(&mover.domain);
    let (domain, range, reversing) = if by.reversing {
        let s = by.a().clone() + by.d().clone();
        let range = mover.range.reflected(&s);
        let domain = if moves_domain { mover.domain.reflected(&s) } else { mover.domain.clone() };
        let flips = if moves_domain { 2 } else { 1 };
        (domain, range, mover.reversing ^ (flips == 1))
    } else {
        let t = by.translation();
        let r = (mover.c().clone() - by.c().clone()).div_floor(&t) + one();
        let range = mover.range.shifted(&(-(r * t.clone())));
        let domain = if moves_domain {
            let s = (mover.a().clone() - by.c().clone()).div_floor(&t) + one();
            mover.domain.shifted(&(-(s * t)))
        } else {
            mover.domain.clone()
        };
        (domain, range, mover.reversing)
    };
    Ok(Pairing::canonical(domain, range, reversing))
}
