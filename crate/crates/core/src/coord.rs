//! Coordinate types for the orbit engine.
//!
//! Everything public speaks `BigInt`. The engine itself is generic so that
//! systems whose width fits comfortably in a machine word run on `i64`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub trait Coord:
    Clone + Ord + Hash + Debug + Display + Integer + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn to_big(&self) -> BigInt;
    fn from_big(v: &BigInt) -> Option<Self>;

    fn from_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize fits every coordinate type")
    }
}

impl Coord for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl Coord for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

/// Largest width for which the `i64` engine is used. Leaves headroom so that
/// sums like `a + d` and `r * t` never overflow.
pub(crate) fn fits_machine_word(n: &BigInt) -> bool {
    n.bits() <= 60
}

pub(crate) fn one<C: Coord>() -> C {
    C::one()
}
