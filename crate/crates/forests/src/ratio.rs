//! Exact rational arithmetic helpers.
//!
//! Every bound in this crate is an exact rational; nothing is ever compared
//! through floating point. `Rat` is arbitrary precision because potential
//! sums accumulate fractions with pairwise-coprime denominators and the lcm
//! outgrows `i64` quickly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_usize(v: usize) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Smallest integer >= `r`, as i64. Bound values in this crate stay far
/// below i64 range (they are at most the order of the graph).
pub fn ceil_i64(r: &Rat) -> i64 {
    use num::ToPrimitive;
    r.ceil()
        .to_integer()
        .to_i64()
        .expect("ceiling out of i64 range")
}

pub fn is_nonnegative(r: &Rat) -> bool {
    !r.is_negative()
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Serde helper: emits a rational as `{num, den}` decimal strings.
pub fn serialize_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    RatJson::of(r).serialize(s)
}

/// Serialized form of a rational: decimal strings so arbitrary precision
/// survives JSON without loss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatJson {
    pub num: String,
    pub den: String,
}

impl RatJson {
    pub fn of(r: &Rat) -> Self {
        RatJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_matches_hand_values() {
        assert_eq!(ceil_i64(&rat(30, 9)), 4);
        assert_eq!(ceil_i64(&rat(-3, 2)), -1);
        assert_eq!(ceil_i64(&rat(6, 3)), 2);
        assert_eq!(ceil_i64(&rat_int(0)), 0);
    }

    #[test]
    fn json_form_is_reduced() {
        let r = rat(30, 9);
        let j = RatJson::of(&r);
        assert_eq!(j.num, "10");
        assert_eq!(j.den, "3");
    }
}
