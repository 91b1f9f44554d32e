//! Exact scalar fields: arbitrary-precision rationals and prime fields.
//!
//! Every computation in this crate runs over a [`Scalar`] type. Values are
//! never rounded; rationals use big integers and prime-field elements carry
//! their modulus so that mixed arithmetic with the neutral constants produced
//! by `zero()`/`one()` stays well defined.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, Signed};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which exact field the tool is working over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldSpec {
    /// The rationals with arbitrary-precision integers.
    #[serde(rename = "Q")]
    Rationals,
    /// The prime field F_p, p < 2^61.
    #[serde(rename = "Fp")]
    Prime { p: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{p} is not a prime below 2^61")]
    BadPrime { p: u64 },
    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("denominator is divisible by the field characteristic")]
    ZeroDenominator,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p < (1 << 61) && is_prime_u64(p) {
            Ok(FieldSpec::Prime { p })
        } else {
            Err(FieldError::BadPrime { p })
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime { p } => *p,
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Prime { p } => FieldSpec::prime(*p).map(|_| ()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime { p } => write!(f, "F{p}"),
        }
    }
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// An exact field element. `zero()`/`one()` must be usable as neutral values
/// regardless of which concrete field instance the surrounding data lives in.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Embed a small integer.
    fn from_int(n: i64) -> Self;

    /// A multiplicative unit that carries the field size (for prime fields,
    /// the literal 1 mod p). Multiplying by it forces reduction.
    fn sized_one(char_p: u64) -> Self {
        let _ = char_p;
        Self::one()
    }

    /// Parse `"a"` or `"a/b"` as an element of the field described by `spec`.
    fn parse_in(spec: &FieldSpec, text: &str) -> Result<Self, FieldError>;

    /// Multiplicative inverse, `None` for zero.
    fn try_inverse(&self) -> Option<Self>;

    /// Render in the same syntax `parse_in` accepts.
    fn render(&self) -> String {
        format!("{self}")
    }

    /// The characteristic this value insists on (0 for rationals or for
    /// prime-field constants that have not yet met a sized value).
    fn characteristic_hint(&self) -> u64 {
        0
    }
}

/// Arbitrary-precision rational scalar.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        rat(n)
    }

    fn parse_in(spec: &FieldSpec, text: &str) -> Result<Self, FieldError> {
        debug_assert!(matches!(spec, FieldSpec::Rationals));
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let parse_int = |s: &str| {
            s.parse::<BigInt>().map_err(|e| FieldError::Parse {
                text: text.to_string(),
                reason: e.to_string(),
            })
        };
        let n = parse_int(num)?;
        let d = parse_int(den)?;
        if d.is_zero() {
            return Err(FieldError::Parse {
                text: text.to_string(),
                reason: "zero denominator".into(),
            });
        }
        Ok(BigRational::new(n, d))
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Element of a prime field F_p with p < 2^61.
///
/// `modulus == 0` marks an integer-mode constant (the result of `zero()`,
/// `one()`, `from_int` or sums thereof); binary operations adopt the modulus
/// of the other operand and reduce.
#[derive(Clone, Copy, Debug)]
pub struct Fp64 {
    val: i128,
    modulus: u64,
}

impl Fp64 {
    pub fn new(val: i128, p: u64) -> Self {
        debug_assert!(p >= 2);
        Fp64 {
            val: val.rem_euclid(p as i128),
            modulus: p,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn reduced(&self, p: u64) -> i128 {
        if p == 0 {
            self.val
        } else {
            self.val.rem_euclid(p as i128)
        }
    }

    fn join(a: &Fp64, b: &Fp64) -> u64 {
        match (a.modulus, b.modulus) {
            (0, m) | (m, 0) => m,
            (m, n) => {
                assert_eq!(m, n, "mixed prime-field moduli {m} and {n}");
                m
            }
        }
    }

    fn canon(val: i128, p: u64) -> Self {
        if p == 0 {
            Fp64 { val, modulus: 0 }
        } else {
            Fp64::new(val, p)
        }
    }
}

impl PartialEq for Fp64 {
    fn eq(&self, other: &Self) -> bool {
        let p = Fp64::join(self, other);
        self.reduced(p) == other.reduced(p)
    }
}

impl fmt::Display for Fp64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.val)
    }
}

impl Add for Fp64 {
    type Output = Fp64;
    fn add(self, rhs: Fp64) -> Fp64 {
        let p = Fp64::join(&self, &rhs);
        Fp64::canon(self.reduced(p) + rhs.reduced(p), p)
    }
}

impl Sub for Fp64 {
    type Output = Fp64;
    fn sub(self, rhs: Fp64) -> Fp64 {
        let p = Fp64::join(&self, &rhs);
        Fp64::canon(self.reduced(p) - rhs.reduced(p), p)
    }
}

impl Mul for Fp64 {
    type Output = Fp64;
    fn mul(self, rhs: Fp64) -> Fp64 {
        let p = Fp64::join(&self, &rhs);
        Fp64::canon(self.reduced(p) * rhs.reduced(p), p)
    }
}

impl Neg for Fp64 {
    type Output = Fp64;
    fn neg(self) -> Fp64 {
        Fp64::canon(-self.val, self.modulus)
    }
}

impl Div for Fp64 {
    type Output = Fp64;
    fn div(self, rhs: Fp64) -> Fp64 {
        let inv = rhs.try_inverse().expect("division by zero in Fp64");
        self * inv
    }
}

impl Zero for Fp64 {
    fn zero() -> Self {
        Fp64 { val: 0, modulus: 0 }
    }
    fn is_zero(&self) -> bool {
        self.reduced(self.modulus) == 0
    }
}

impl One for Fp64 {
    fn one() -> Self {
        Fp64 { val: 1, modulus: 0 }
    }
    fn is_one(&self) -> bool {
        if self.modulus == 0 {
            self.val == 1
        } else {
            self.reduced(self.modulus) == 1
        }
    }
}

impl Scalar for Fp64 {
    fn from_int(n: i64) -> Self {
        Fp64 {
            val: n as i128,
            modulus: 0,
        }
    }

    fn sized_one(char_p: u64) -> Self {
        if char_p == 0 {
            Fp64 { val: 1, modulus: 0 }
        } else {
            Fp64::new(1, char_p)
        }
    }

    fn parse_in(spec: &FieldSpec, text: &str) -> Result<Self, FieldError> {
        let p = match spec {
            FieldSpec::Prime { p } => *p,
            FieldSpec::Rationals => {
                return Err(FieldError::Parse {
                    text: text.to_string(),
                    reason: "prime-field scalar parsed with rational field spec".into(),
                })
            }
        };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let parse_int = |s: &str| {
            s.parse::<BigInt>().map_err(|e| FieldError::Parse {
                text: text.to_string(),
                reason: e.to_string(),
            })
        };
        let reduce = |n: BigInt| -> i128 {
            let p_big = BigInt::from(p);
            let mut r = n % &p_big;
            if r.is_negative() {
                r += &p_big;
            }
            // r is in [0, p), p < 2^61
            let (_, digits) = r.to_u64_digits();
            digits.first().copied().unwrap_or(0) as i128
        };
        let n = Fp64::new(reduce(parse_int(num)?), p);
        let d = Fp64::new(reduce(parse_int(den)?), p);
        let inv = d.try_inverse().ok_or(FieldError::ZeroDenominator)?;
        Ok(n * inv)
    }

    fn try_inverse(&self) -> Option<Self> {
        let p = self.modulus;
        if p == 0 {
            return match self.val {
                1 => Some(*self),
                -1 => Some(*self),
                _ => None,
            };
        }
        let a = self.reduced(p);
        if a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (p as i128, a);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            let r2 = r0 - q * r1;
            let s2 = s0 - q * s1;
            r0 = r1;
            r1 = r2;
            s0 = s1;
            s1 = s2;
        }
        debug_assert_eq!(r0, 1);
        Some(Fp64::new(s0, p))
    }

    fn characteristic_hint(&self) -> u64 {
        self.modulus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(97));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561));
        assert!(FieldSpec::prime(4).is_err());
    }

    #[test]
    fn rational_parse_roundtrip() {
        let q = FieldSpec::rationals();
        let x = Rational::parse_in(&q, "-3/6").unwrap();
        assert_eq!(x, ratio(-1, 2));
        assert_eq!(Rational::parse_in(&q, &x.render()).unwrap(), x);
        assert!(Rational::parse_in(&q, "1/0").is_err());
    }

    #[test]
    fn fp_arithmetic_and_neutral_values() {
        let spec = FieldSpec::prime(7).unwrap();
        let a = Fp64::parse_in(&spec, "10").unwrap(); // 3 mod 7
        let b = Fp64::parse_in(&spec, "1/2").unwrap(); // 4 mod 7
        assert_eq!(a + b, Fp64::new(0, 7));
        assert_eq!(a * b, Fp64::new(5, 7));
        // neutral constants meet sized values
        let e = <Fp64 as One>::one();
        assert_eq!(e + a, Fp64::new(4, 7));
        assert_eq!(-e * a, Fp64::new(4, 7));
        assert_eq!((a - a), <Fp64 as Zero>::zero());
        assert_eq!(a.try_inverse().unwrap() * a, e);
    }
}
