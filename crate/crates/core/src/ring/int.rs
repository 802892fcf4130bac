//! Integers that stay in a machine word until an operation overflows.
//!
//! Almost every entry the elimination kernels touch fits in an `i64`; the
//! torsion orders of large congruence subgroups do not. `Z` keeps the common
//! case allocation free and promotes to a `BigInt` only on overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary precision integer with an `i64` fast path.
///
/// Invariant: the `Big` variant never holds a value that fits in `i64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Z {
    Small(i64),
    Big(BigInt),
}

impl Z {
    pub const ZERO: Z = Z::Small(0);
    pub const ONE: Z = Z::Small(1);

    pub fn from_big(b: BigInt) -> Z {
        match b.to_i64() {
            Some(v) => Z::Small(v),
            None => Z::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Z::Small(v) => BigInt::from(*v),
            Z::Big(b) => b.clone(),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Z::Small(v) => Some(*v),
            Z::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Z::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Z::Small(1))
    }

    pub fn signum(&self) -> i32 {
        match self {
            Z::Small(v) => v.signum() as i32,
            Z::Big(b) => match b.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Z {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Floor division and the matching non-negative-divisor remainder.
    pub fn div_mod_floor(&self, other: &Z) -> (Z, Z) {
        assert!(!other.is_zero(), "division by zero");
        if let (Z::Small(a), Z::Small(b)) = (self, other) {
            if !(*a == i64::MIN && *b == -1) {
                let (q, r) = a.div_mod_floor(b);
                return (Z::Small(q), Z::Small(r));
            }
        }
        let (q, r) = self.to_big().div_mod_floor(&other.to_big());
        (Z::from_big(q), Z::from_big(r))
    }

    /// Quotient rounded to the nearest integer (ties toward +infinity).
    pub fn div_round(&self, other: &Z) -> Z {
        // round(a/b) = floor((2a + b) / 2b) for b > 0
        let (a, b) = if other.is_negative() { (-self, -other) } else { (self.clone(), other.clone()) };
        let num = &(&a + &a) + &b;
        let den = &b + &b;
        num.div_mod_floor(&den).0
    }

    /// Exact division; panics in debug builds when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Z) -> Z {
        let (q, r) = self.div_mod_floor(other);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn gcd(&self, other: &Z) -> Z {
        match (self, other) {
            (Z::Small(a), Z::Small(b)) if *a != i64::MIN && *b != i64::MIN => Z::Small(a.gcd(b)),
            _ => Z::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    pub fn pow(&self, e: u32) -> Z {
        let mut acc = Z::ONE;
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Number of decimal digits of |self| (1 for zero).
    pub fn decimal_digits(&self) -> usize {
        let s = self.abs().to_string();
        s.len()
    }

    /// Natural logarithm of |self| from the leading digits and the digit count.
    pub fn ln_abs(&self) -> f64 {
        assert!(!self.is_zero(), "log of zero");
        match self {
            Z::Small(v) => (v.unsigned_abs() as f64).ln(),
            Z::Big(b) => {
                let s = b.magnitude().to_string();
                let lead = &s[..s.len().min(17)];
                let mantissa: f64 = lead.parse::<f64>().unwrap();
                mantissa.ln() + ((s.len() - lead.len()) as f64) * std::f64::consts::LN_10
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Z::Small(v) => *v as f64,
            Z::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Z {
    fn default() -> Self {
        Z::ZERO
    }
}

impl From<i64> for Z {
    fn from(v: i64) -> Self {
        Z::Small(v)
    }
}

impl From<i32> for Z {
    fn from(v: i32) -> Self {
        Z::Small(v as i64)
    }
}

impl From<u64> for Z {
    fn from(v: u64) -> Self {
        Z::from_big(BigInt::from(v))
    }
}

impl From<usize> for Z {
    fn from(v: usize) -> Self {
        Z::from(v as u64)
    }
}

impl From<BigInt> for Z {
    fn from(b: BigInt) -> Self {
        Z::from_big(b)
    }
}

impl Ord for Z {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Z::Small(a), Z::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Z {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! checked_binop {
    ($tr:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a> $tr<&'a Z> for &'a Z {
            type Output = Z;
            fn $method(self, rhs: &'a Z) -> Z {
                if let (Z::Small(a), Z::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Z::Small(v);
                    }
                }
                Z::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $tr<Z> for Z {
            type Output = Z;
            fn $method(self, rhs: Z) -> Z {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Z> for Z {
            type Output = Z;
            fn $method(self, rhs: &'a Z) -> Z {
                (&self).$method(rhs)
            }
        }
    };
}

checked_binop!(Add, add, checked_add, +);
checked_binop!(Sub, sub, checked_sub, -);
checked_binop!(Mul, mul, checked_mul, *);

impl Neg for &Z {
    type Output = Z;
    fn neg(self) -> Z {
        match self {
            Z::Small(v) => match v.checked_neg() {
                Some(n) => Z::Small(n),
                None => Z::from_big(-BigInt::from(*v)),
            },
            Z::Big(b) => Z::from_big(-b.clone()),
        }
    }
}

impl Neg for Z {
    type Output = Z;
    fn neg(self) -> Z {
        -&self
    }
}

impl AddAssign<&Z> for Z {
    fn add_assign(&mut self, rhs: &Z) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Z> for Z {
    fn sub_assign(&mut self, rhs: &Z) {
        *self = &*self - rhs;
    }
}

impl Zero for Z {
    fn zero() -> Self {
        Z::ZERO
    }
    fn is_zero(&self) -> bool {
        Z::is_zero(self)
    }
}

impl One for Z {
    fn one() -> Self {
        Z::ONE
    }
}

impl fmt::Display for Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Z::Small(v) => write!(f, "{v}"),
            Z::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Z {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Z::from_big(s.trim().parse::<BigInt>()?))
    }
}

// Decimal strings keep JSON consumers from truncating large values.
impl Serialize for Z {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Z {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(Z::Small(v)),
        }
    }
}

impl Signed for Z {
    fn abs(&self) -> Self {
        Z::abs(self)
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Z::ZERO
        } else {
            self - other
        }
    }
    fn signum(&self) -> Self {
        Z::Small(Z::signum(self) as i64)
    }
    fn is_positive(&self) -> bool {
        Z::signum(self) > 0
    }
    fn is_negative(&self) -> bool {
        Z::is_negative(self)
    }
}

impl num_traits::Num for Z {
    type FromStrRadixErr = num_bigint::ParseBigIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Ok(Z::from_big(BigInt::from_str_radix(s, radix)?))
    }
}

impl std::ops::Div for Z {
    type Output = Z;
    fn div(self, rhs: Z) -> Z {
        Z::from_big(self.to_big() / rhs.to_big())
    }
}

impl std::ops::Rem for Z {
    type Output = Z;
    fn rem(self, rhs: Z) -> Z {
        Z::from_big(self.to_big() % rhs.to_big())
    }
}
