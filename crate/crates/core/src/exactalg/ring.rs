//! Coefficient rings used throughout the crate.
//!
//! A ring is a small context value (it may carry a modulus) and all arithmetic
//! goes through it, so element types stay plain data.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub trait Ring: Clone + Send + Sync + fmt::Debug + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Inverse of a unit, `None` for non-units.
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn coefficients(&self) -> Coefficients;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.inverse(a).is_some()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Exact integer image used when exporting matrices; rationals that are
    /// not integers are rendered through [`Ring::render`] instead.
    fn to_i64(&self, a: &Self::Elem) -> Option<i64>;

    fn render(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// Marker for rings in which every nonzero element is a unit.
pub trait Field: Ring {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct F2;

impl Ring for F2 {
    type Elem = u8;

    fn zero(&self) -> u8 {
        0
    }
    fn one(&self) -> u8 {
        1
    }
    fn from_i64(&self, v: i64) -> u8 {
        (v.rem_euclid(2)) as u8
    }
    fn add(&self, a: &u8, b: &u8) -> u8 {
        a ^ b
    }
    fn neg(&self, a: &u8) -> u8 {
        *a
    }
    fn mul(&self, a: &u8, b: &u8) -> u8 {
        a & b
    }
    fn is_zero(&self, a: &u8) -> bool {
        *a == 0
    }
    fn inverse(&self, a: &u8) -> Option<u8> {
        (*a == 1).then_some(1)
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::F2
    }
    fn to_i64(&self, a: &u8) -> Option<i64> {
        Some(*a as i64)
    }
    fn render(&self, a: &u8) -> String {
        a.to_string()
    }
}

impl Field for F2 {}

/// Prime field with a word-sized modulus (`p < 2^16`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self, Error> {
        if p < 2 || p >= 1 << 16 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 65536")));
        }
        Ok(Fp { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn pow(&self, base: u32, mut exp: u32) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u64;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }
}

impl Ring for Fp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn inverse(&self, a: &u32) -> Option<u32> {
        (*a != 0).then(|| self.pow(*a, self.p - 2))
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Fp(self.p)
    }
    fn to_i64(&self, a: &u32) -> Option<i64> {
        Some(*a as i64)
    }
    fn render(&self, a: &u32) -> String {
        a.to_string()
    }
}

impl Field for Fp {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inverse(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Q
    }
    fn to_i64(&self, a: &BigRational) -> Option<i64> {
        if a.is_integer() {
            i64::try_from(a.to_integer()).ok()
        } else {
            None
        }
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

impl Field for Rationals {}

/// Integers in machine words. Only unit (±1) pivots are ever divided by, so
/// entries stay small on chain complexes; overflow is a hard failure rather
/// than silent wraparound. Arbitrary-precision work happens in
/// [`crate::exactalg::snf`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = i64;

    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        a.checked_add(*b).expect("integer coefficient overflow")
    }
    fn neg(&self, a: &i64) -> i64 {
        a.checked_neg().expect("integer coefficient overflow")
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a.checked_mul(*b).expect("integer coefficient overflow")
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn inverse(&self, a: &i64) -> Option<i64> {
        (a.abs() == 1).then_some(*a)
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Z
    }
    fn to_i64(&self, a: &i64) -> Option<i64> {
        Some(*a)
    }
    fn render(&self, a: &i64) -> String {
        a.to_string()
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Runtime descriptor of a coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficients {
    F2,
    Fp(u32),
    Q,
    Z,
}

impl Coefficients {
    pub fn is_field(self) -> bool {
        !matches!(self, Coefficients::Z)
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Coefficients::F2 => 2,
            Coefficients::Fp(p) => p,
            Coefficients::Q | Coefficients::Z => 0,
        }
    }

    /// Normalizes `Fp(2)` to `F2` and validates the modulus.
    pub fn normalized(self) -> Result<Self, Error> {
        match self {
            Coefficients::Fp(2) => Ok(Coefficients::F2),
            Coefficients::Fp(p) => Fp::new(p).map(|_| self),
            other => Ok(other),
        }
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::F2 => write!(f, "f2"),
            Coefficients::Fp(p) => write!(f, "f{p}"),
            Coefficients::Q => write!(f, "q"),
            Coefficients::Z => write!(f, "z"),
        }
    }
}

impl FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().to_ascii_lowercase();
        let parsed = match t.as_str() {
            "f2" | "z2" | "gf2" => Coefficients::F2,
            "q" | "qq" | "rationals" => Coefficients::Q,
            "z" | "zz" | "integers" => Coefficients::Z,
            _ => {
                let digits = t
                    .strip_prefix("gf")
                    .or_else(|| t.strip_prefix("fp"))
                    .or_else(|| t.strip_prefix('f'))
                    .or_else(|| t.strip_prefix('z'))
                    .ok_or_else(|| Error::InvalidField(s.to_string()))?;
                let p: u32 = digits.parse().map_err(|_| Error::InvalidField(s.to_string()))?;
                Coefficients::Fp(p)
            }
        };
        parsed.normalized()
    }
}

impl Serialize for Coefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Reduces an arbitrary-precision integer into a prime field.
pub fn bigint_to_fp(v: &BigInt, p: u32) -> u32 {
    let m = BigInt::from(p);
    let mut r = v % &m;
    if r.is_negative() {
        r += m;
    }
    u32::try_from(r).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_coefficients() {
        assert_eq!("f2".parse::<Coefficients>().unwrap(), Coefficients::F2);
        assert_eq!("F3".parse::<Coefficients>().unwrap(), Coefficients::Fp(3));
        assert_eq!("f2".parse::<Coefficients>().unwrap(), "Fp2".parse::<Coefficients>().unwrap());
        assert_eq!("Q".parse::<Coefficients>().unwrap(), Coefficients::Q);
        assert_eq!("z".parse::<Coefficients>().unwrap(), Coefficients::Z);
        assert!("f4".parse::<Coefficients>().is_err());
        assert!("f65537".parse::<Coefficients>().is_err());
    }

    #[test]
    fn fp_inverse() {
        let f = Fp::new(7).unwrap();
        for a in 1..7 {
            let inv = f.inverse(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inverse(&0), None);
        assert_eq!(f.from_i64(-1), 6);
    }

    #[test]
    fn integer_units() {
        assert_eq!(Integers.inverse(&-1), Some(-1));
        assert_eq!(Integers.inverse(&2), None);
    }
}
