//! Exact arithmetic in Z[1/2].
//!
//! Every scalar produced by this crate (measure values, Gram entries,
//! composition coefficients) lives in the ring of dyadic rationals
//! m * 2^e with m an odd integer. Keeping the mantissa odd gives a
//! unique normal form, so equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A dyadic rational `mantissa * 2^exponent`.
///
/// Invariant: `mantissa` is odd, or the value is zero and the exponent is 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    /// Builds `m * 2^e` and normalizes.
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// `numerator / 2^log2_denominator`, exact.
    pub fn from_fraction(numerator: i64, log2_denominator: u32) -> Self {
        Dyadic::new(BigInt::from(numerator), -(log2_denominator as i64))
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// True when the value is exactly `±2^k` for some integer k.
    pub fn is_pm_power_of_two(&self) -> bool {
        self.mantissa.abs().is_one()
    }

    /// Multiplies by 2^k (exact for any sign of k).
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Halves the value; exact in Z[1/2].
    pub fn half(&self) -> Self {
        self.shl(-1)
    }

    /// Exact quotient, defined only when the result is again dyadic
    /// (odd mantissas must divide exactly). Panics on division by zero.
    pub fn div_exact(&self, rhs: &Dyadic) -> Option<Dyadic> {
        assert!(!rhs.is_zero(), "division of dyadic by zero");
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        let (q, r) = num_integer_div_rem(&self.mantissa, &rhs.mantissa);
        if !r.is_zero() {
            return None;
        }
        Some(Dyadic::new(q, self.exponent - rhs.exponent))
    }

    /// Scales a slice of dyadics to integers over a common power of two.
    /// Returns the integer mantissas and the shared exponent `e` such that
    /// `values[i] = ints[i] * 2^e`.
    pub fn to_common_exponent(values: &[Dyadic]) -> (Vec<BigInt>, i64) {
        let min_e = values
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| d.exponent)
            .min()
            .unwrap_or(0);
        let ints = values
            .iter()
            .map(|d| {
                if d.is_zero() {
                    BigInt::zero()
                } else {
                    &d.mantissa << (d.exponent - min_e) as u64
                }
            })
            .collect();
        (ints, min_e)
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let q = a / b;
    let r = a - &q * b;
    (q, r)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &rhs.mantissa << (rhs.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: &self.mantissa * &rhs.mantissa, exponent: self.exponent + rhs.exponent }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl MulAssign<&Dyadic> for Dyadic {
    fn mul_assign(&mut self, rhs: &Dyadic) {
        *self = &*self * rhs;
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).mantissa.sign().cmp(&num_bigint::Sign::NoSign)
    }
}

impl fmt::Display for Dyadic {
    /// Reduced fraction with a power-of-two denominator: `3`, `-1/128`, `6` (= 3*2^1).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.mantissa << self.exponent as u64)
        } else {
            let den = BigInt::one() << (-self.exponent) as u64;
            write!(f, "{}/{}", self.mantissa, den)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Dyadic", 2)?;
        s.serialize_field("m", &self.mantissa.to_string())?;
        s.serialize_field("e", &self.exponent)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: String,
            e: i64,
        }
        let raw = Raw::deserialize(deserializer)?;
        let m: BigInt = raw.m.parse().map_err(|_| D::Error::custom("bad mantissa"))?;
        Ok(Dyadic::new(m, raw.e))
    }
}
